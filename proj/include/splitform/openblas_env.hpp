#pragma once

// OpenBLAS 0.3.20 selects its Cooperlake kernels on some AVX-512 hosts, and
// dgeev stalls there on matrices of a few hundred rows. Processes that call
// into LAPACK pin a compatible core type before the first BLAS call. The
// variable is read when libopenblas is loaded, so the process re-executes
// itself once with it set.

#include <unistd.h>

#include <cstdlib>
#include <strings.h>

extern "C" char* openblas_get_corename(void);

namespace splitform {

inline constexpr const char* kOpenblasCoretypeVar = "OPENBLAS_CORETYPE";
inline constexpr const char* kOpenblasFallbackCore = "Haswell";

/// Returns only if the loaded core is usable or the variable is already set.
inline void ensure_openblas_coretype(char** argv) {
  if (std::getenv(kOpenblasCoretypeVar) != nullptr) return;
  const char* core = openblas_get_corename();
  if (core == nullptr || ::strcasecmp(core, "cooperlake") != 0) return;
  ::setenv(kOpenblasCoretypeVar, kOpenblasFallbackCore, 1);
  ::execv("/proc/self/exe", argv);
  // exec failed: continue with the default core
}

}  // namespace splitform
