#pragma once

// Scalar two-point means on positive reals and the product mean.

#include <array>
#include <cmath>
#include <optional>
#include <string_view>
#include <utility>

#include "splitform/errors.hpp"

namespace splitform {

enum class MeanKind { arithmetic, logarithmic, geometric, harmonic, heronian, centroidal };

inline constexpr std::array<MeanKind, 6> kAllMeans = {
    MeanKind::arithmetic, MeanKind::logarithmic, MeanKind::geometric,
    MeanKind::harmonic,   MeanKind::heronian,    MeanKind::centroidal};

constexpr std::string_view to_string(MeanKind kind) {
  switch (kind) {
    case MeanKind::arithmetic: return "arithmetic";
    case MeanKind::logarithmic: return "logarithmic";
    case MeanKind::geometric: return "geometric";
    case MeanKind::harmonic: return "harmonic";
    case MeanKind::heronian: return "heronian";
    case MeanKind::centroidal: return "centroidal";
  }
  return "unknown";
}

inline std::optional<MeanKind> parse_mean_kind(std::string_view name) {
  for (auto kind : kAllMeans) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

namespace detail {

inline void require_positive(double x) {
  if (!std::isfinite(x)) throw DomainError("mean: non-finite argument", x);
  if (!(x > 0.0)) throw DomainError("mean: non-positive argument", x);
}

// Below this value of xi^2, xi = (b - a) / (b + a), the series branch is used.
// At the switch the truncation error is ~xi^8/9 ~ 1e-17. The quotient branch
// uses log1p of the exactly computed b - a, so it stays near eps relative.
inline constexpr double kLogMeanSeriesThreshold = 1.0e-4;

}  // namespace detail

/// (b - a) / (log b - log a), evaluated through a series in
/// xi = (b - a)/(b + a) when a and b are close. Assumes a, b > 0.
inline double log_mean_unchecked(double a, double b) {
  if (a > b) std::swap(a, b);
  const double xi = (b - a) / (b + a);
  const double f2 = xi * xi;
  if (f2 < detail::kLogMeanSeriesThreshold) {
    return 0.5 * (a + b) / (1.0 + f2 * (1.0 / 3.0 + f2 * (1.0 / 5.0 + f2 / 7.0)));
  }
  return (b - a) / std::log1p((b - a) / a);
}

/// The plain quotient without the series guard. Exposed for tests only;
/// loses accuracy as b -> a and is undefined at a == b.
inline double log_mean_raw(double a, double b) {
  if (a > b) std::swap(a, b);
  return (b - a) / std::log(b / a);
}

inline double log_mean(double a, double b) {
  detail::require_positive(a);
  detail::require_positive(b);
  return log_mean_unchecked(a, b);
}

/// Two-point mean of kind `kind`. Arguments are sorted first so every mean is
/// exactly symmetric in floating point.
inline double mean(MeanKind kind, double a, double b) {
  detail::require_positive(a);
  detail::require_positive(b);
  if (a > b) std::swap(a, b);
  switch (kind) {
    case MeanKind::arithmetic: return 0.5 * (a + b);
    case MeanKind::logarithmic: return log_mean_unchecked(a, b);
    case MeanKind::geometric: return a == b ? a : std::sqrt(a * b);
    case MeanKind::harmonic: return a == b ? a : 2.0 * a * b / (a + b);
    case MeanKind::heronian:
      return a == b ? a : (a + std::sqrt(a * b) + b) / 3.0;
    case MeanKind::centroidal:
      return a == b ? a : 2.0 * (a * a + a * b + b * b) / (3.0 * (a + b));
  }
  throw DomainError("mean: unknown kind", static_cast<double>(kind));
}

/// {a.b} = (a+ b- + a- b+)/2, which equals 2<a><b> - <ab>.
inline double product_mean(double a_minus, double a_plus, double b_minus, double b_plus) {
  for (double x : {a_minus, a_plus, b_minus, b_plus}) {
    if (!std::isfinite(x)) throw DomainError("product_mean: non-finite argument", x);
  }
  return 0.5 * (a_plus * b_minus + a_minus * b_plus);
}

}  // namespace splitform
