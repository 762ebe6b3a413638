// Acceptance criteria. `acceptance <n> [--strict]` evaluates criterion n and
// prints one PASS/FAIL line per check. The exit status is nonzero if the
// evaluation throws, or with --strict if any check fails.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "splitform/cli.hpp"
#include "splitform/linstab.hpp"
#include "splitform/openblas_env.hpp"

using namespace splitform;

namespace {

const GasModel kGas(1.4);
int failures = 0;

void check(int criterion, const std::string& name, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

constexpr OperatorFamily kFamilies[] = {OperatorFamily::fd2, OperatorFamily::fd4,
                                        OperatorFamily::cg, OperatorFamily::dg};

bool is_fd(OperatorFamily f) { return f == OperatorFamily::fd2 || f == OperatorFamily::fd4; }

// coarse and fine sizes: nodes for fd, elements of degree 3 for cg and dg
std::array<int, 2> sizes(OperatorFamily f) {
  return is_fd(f) ? std::array{32, 64} : std::array{8, 16};
}

void flux_properties() {
  const auto ranocha = check_flux(FluxId::ranocha, 1000, 0, kGas);
  check(1, "ranocha EC over 1000 pairs", ranocha.ec_residual <= 1e-11,
        fmt("scaled residual %.3g <= 1e-11", ranocha.ec_residual));
  check(1, "ranocha KEP over 1000 pairs", ranocha.kep_residual <= 1e-13,
        fmt("%.3g <= 1e-13", ranocha.kep_residual));
  check(1, "ranocha PEP", std::max(ranocha.pep_momentum_spread, ranocha.pep_energy_spread) <= 1e-12,
        fmt("spreads %.3g, %.3g <= 1e-12", ranocha.pep_momentum_spread, ranocha.pep_energy_spread));

  const auto shima = check_flux(FluxId::shima, 1000, 0, kGas);
  check(1, "shima KEP over 1000 pairs", shima.kep_residual <= 1e-13,
        fmt("%.3g <= 1e-13", shima.kep_residual));
  check(1, "shima PEP", std::max(shima.pep_momentum_spread, shima.pep_energy_spread) <= 1e-12,
        fmt("spreads %.3g, %.3g <= 1e-12", shima.pep_momentum_spread, shima.pep_energy_spread));
  const auto ul = prim_to_cons<1>({1.0, {0.1}, 20.0}, kGas);
  const auto ur = prim_to_cons<1>({2.0, {0.3}, 10.0}, kGas);
  const double r = ec_residual<1>(FluxId::shima, ul, ur, kGas) / ec_scale<1>(FluxId::shima, ul, ur, kGas);
  check(1, "shima fails EC on the regression pair", r > 1e-11, fmt("scaled residual %.3g > 1e-11", r));

  const auto central = check_flux(FluxId::central, 1000, 0, kGas);
  check(1, "central fails KEP", central.kep_residual > 1e-13,
        fmt("%.3g > 1e-13", central.kep_residual));
}

void harten() {
  struct Case {
    const char* name;
    HartenEntropy h;
  };
  for (const auto& c : {Case{"standard", HartenEntropy::standard()},
                        Case{"alpha 0.5", HartenEntropy::alpha_family(0.5)},
                        Case{"alpha 1", HartenEntropy::alpha_family(1.0)},
                        Case{"alpha 2", HartenEntropy::alpha_family(2.0)}}) {
    const auto r = harten_scan(c.h, kGas, 1000, 0);
    const double frac = r.solvable ? double(r.counterexamples.size()) / double(r.solvable) : 0.0;
    check(2, std::string("harten scan, ") + c.name, r.solvable > 0 && frac >= 0.99,
          fmt("%zu of %zu solvable trials with |residual| > 1e-6: %.4f >= 0.99",
              r.counterexamples.size(), r.solvable, frac));
  }
}

void sbp_entropy() {
  double defect = 0.0;
  for (auto f : kFamilies) {
    for (int n : {16, 32, 64}) {
      for (int degree : {1, 3, 5}) {
        const int count = is_fd(f) ? n : n / 4;
        defect = std::max(defect, build_operator(f, count, 0.0, 2.0, degree).sbp_defect());
      }
    }
  }
  check(3, "SBP property of fd2, fd4, cg, dg", defect <= 1e-13,
        fmt("max |MD + D^T M| = %.3g <= 1e-13", defect));

  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> d(0.1, 10.0);
  for (auto f : kFamilies) {
    const auto op = build_operator(f, is_fd(f) ? 32 : 8, 0.0, 2.0);
    const AdvectionSemidiscretization logm(op, MeanKind::logarithmic);
    const AdvectionSemidiscretization arith(op, MeanKind::arithmetic);
    double worst_log = 0.0, worst_sq = 0.0;
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd u(op.size());
      for (auto& x : u) x = d(rng);
      worst_log = std::max(worst_log, std::abs(logm.entropy_rate(u, ScalarEntropy::u_log_u)));
      worst_sq = std::max(worst_sq, std::abs(arith.entropy_rate(u, ScalarEntropy::square)));
    }
    const std::string fam(to_string(f));
    check(3, "log mean conserves u log u - u, " + fam, worst_log <= 1e-12,
          fmt("max |rate| %.3g <= 1e-12", worst_log));
    check(3, "arithmetic mean conserves u^2/2, " + fam, worst_sq <= 1e-12,
          fmt("max |rate| %.3g <= 1e-12", worst_sq));
  }
}

void advection_spectra() {
  for (auto f : kFamilies) {
    const std::string fam(to_string(f));
    double previous = -INFINITY;
    bool monotone = true;
    for (int n : sizes(f)) {
      AdvectionSpectrumConfig c;
      c.family = f;
      c.size = n;
      c.mean = MeanKind::arithmetic;
      const auto a = advection_spectrum_experiment(c);
      check(4, fmt("arithmetic mean stable, %s/%d", fam.c_str(), n),
            a.max_real <= 1e-8 * a.spectral_radius,
            fmt("max Re %.3g <= 1e-8 * %.4g", a.max_real, a.spectral_radius));
      c.mean = MeanKind::logarithmic;
      const auto l = advection_spectrum_experiment(c);
      check(4, fmt("log mean unstable, %s/%d", fam.c_str(), n), l.max_real > 0.1,
            fmt("max Re %.4g > 0.1", l.max_real));
      monotone = monotone && l.max_real >= previous;
      previous = l.max_real;
    }
    check(4, "log mean max Re does not decay under refinement, " + fam, monotone,
          fmt("fine %.4g", previous));
  }
  for (auto m : {MeanKind::geometric, MeanKind::harmonic, MeanKind::heronian, MeanKind::centroidal}) {
    AdvectionSpectrumConfig c;
    c.mean = m;
    const auto s = advection_spectrum_experiment(c);
    check(4, fmt("%s mean unstable at fd2/32", std::string(to_string(m)).c_str()), s.max_real > 0.0,
          fmt("max Re %.4g > 0", s.max_real));
  }
}

void euler_spectra() {
  const auto central = euler_spectrum_experiment(FluxId::central, FluxId::central, kGas);
  check(5, "central flux spectrum", central.spectrum.max_real <= 1e-2,
        fmt("max Re %.3g <= 1e-2", central.spectrum.max_real));
  const auto ranocha = euler_spectrum_experiment(FluxId::ranocha, FluxId::ranocha, kGas);
  check(5, "ranocha flux spectrum", ranocha.spectrum.max_real > 0.5,
        fmt("max Re %.4g > 0.5", ranocha.spectrum.max_real));
  const auto shima = euler_spectrum_experiment(FluxId::shima, FluxId::shima, kGas);
  check(5, "shima flux spectrum", std::abs(shima.spectrum.max_real - 1.03) <= 0.15,
        fmt("max Re %.4f (Im %.2f) in 1.03 +- 0.15", shima.spectrum.max_real,
            shima.spectrum.dominant.imag()));
}

RunReport run_density_wave(FluxId flux, double t_end) {
  const Semidiscretization2D semi(density_wave_mesh(), flux, flux, kGas);
  IntegrateOptions opt;
  opt.t_end = t_end;
  opt.monitor_equilibrium = true;
  return integrate(semi, density_wave_state(semi), opt).first;
}

void robustness() {
  const auto ranocha = run_density_wave(FluxId::ranocha, 2.0);
  const double tc = ranocha.crash_time.value_or(NAN);
  check(6, "ranocha crashes with negative density",
        ranocha.crashed && std::abs(tc - 0.55) <= 0.15 &&
            ranocha.crash_reason.find("negative density") != std::string::npos,
        fmt("t = %.4f in 0.55 +- 0.15: %s", tc, ranocha.crash_reason.c_str()));
  const auto central = run_density_wave(FluxId::central, 20.0);
  check(6, "central runs to t = 20", !central.crashed && central.final_time == 20.0,
        fmt("final t %.4g, %zu steps %s", central.final_time, central.step_count,
            central.crash_reason.c_str()));
  const auto shima = run_density_wave(FluxId::shima, 20.0);
  check(6, "shima runs to t = 20", !shima.crashed && shima.final_time == 20.0,
        fmt("final t %.4g, %zu steps %s", shima.final_time, shima.step_count, shima.crash_reason.c_str()));
  check(6, "shima keeps pressure", shima.pressure_deviation_max <= 1e-9,
        fmt("max |p - p0| %.3g <= 1e-9", shima.pressure_deviation_max));
  check(6, "shima keeps velocity", shima.velocity_deviation_max <= 1e-11,
        fmt("max |v - v0| %.3g <= 1e-11", shima.velocity_deviation_max));
}

void perturbation() {
  struct Case {
    FluxId surface;
    double lambda, lambda_tol, crash, crash_tol, t_end;
  };
  for (const auto& c : {Case{FluxId::shima, 1.03, 0.15, 4.6, 0.5, 7.0},
                        Case{FluxId::hll, 0.39, 0.08, 9.0, 1.0, 12.0}}) {
    const std::string name(to_string(c.surface));
    const auto modes = euler_spectrum_experiment(FluxId::shima, c.surface, kGas);
    PerturbationConfig pc;
    pc.surface = c.surface;
    pc.t_end = c.t_end;
    const auto g = perturbation_growth(pc, modes.spectrum.dominant_eigenvector);
    const double tc = g.run.crash_time.value_or(NAN);
    check(7, "growth rate, " + name + " surface", std::abs(g.rate - c.lambda) <= c.lambda_tol,
          fmt("lambda_fit %.4f on [%.3g, %.3g] in %.2f +- %.2f", g.rate, g.window_begin, g.window_end,
              c.lambda, c.lambda_tol));
    check(7, "crash time, " + name + " surface", g.run.crashed && std::abs(tc - c.crash) <= c.crash_tol,
          fmt("t = %.4f in %.1f +- %.1f: %s", tc, c.crash, c.crash_tol, g.run.crash_reason.c_str()));
    const double m = modes.spectrum.max_real;
    check(7, "growth rate matches the spectrum, " + name + " surface",
          std::abs(g.rate - m) <= 0.15 * m, fmt("lambda_fit %.5f vs max Re %.5f", g.rate, m));
  }
}

double lsrk_error(int steps) {
  auto f = [](double t, const Eigen::VectorXd& y, Eigen::VectorXd& out) { out = std::cos(t) * y; };
  const auto y = integrate_fixed(f, Eigen::VectorXd::Ones(1), 2.0, steps);
  return std::abs(y[0] - std::exp(std::sin(2.0)));
}

std::string cli_output(std::vector<std::string> args) {
  args.insert(args.begin(), "splitform-lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return std::to_string(code) + "\n" + out.str();
}

void pipeline() {
  double worst_rel = 0.0, worst_abs = 0.0;
  for (auto f : kFamilies) {
    for (int n : sizes(f)) {
      AdvectionSpectrumConfig c;
      c.family = f;
      c.size = n;
      c.mean = MeanKind::arithmetic;
      const auto semi = advection_semidiscretization(c);
      Eigen::VectorXd u0(semi.size());
      for (int i = 0; i < semi.size(); ++i) u0[i] = advection_spectrum_ic(semi.op().grid[i]);
      const auto j = jacobian([&](const Eigen::VectorXd& u) { return semi.rhs(u); }, u0);
      const double err = (j + semi.op().D).cwiseAbs().maxCoeff();
      worst_abs = std::max(worst_abs, err);
      worst_rel = std::max(worst_rel, err / semi.op().D.cwiseAbs().maxCoeff());
    }
  }
  check(8, "jacobian of the arithmetic scheme is -D", worst_rel <= 1e-10,
        fmt("max |J + D| / max |D| = %.3g <= 1e-10 (absolute %.3g)", worst_rel, worst_abs));

  const double e1 = lsrk_error(40), e2 = lsrk_error(80), e3 = lsrk_error(160);
  const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
  check(8, "LSRK order", std::abs(o1 - 4.0) <= 0.1 && std::abs(o2 - 4.0) <= 0.1,
        fmt("orders %.3f, %.3f in 4.0 +- 0.1", o1, o2));

  double pairing = 0.0;
  for (auto m : {MeanKind::arithmetic, MeanKind::logarithmic}) {
    AdvectionSpectrumConfig c;
    c.mean = m;
    pairing = std::max(pairing, advection_spectrum_experiment(c).conjugate_pairing_defect);
  }
  for (auto surf : {FluxId::shima, FluxId::hll}) {
    const auto s = euler_spectrum_experiment(FluxId::shima, surf, kGas, 1, Mesh2D(-1, 1, 2, 3));
    pairing = std::max(pairing, s.spectrum.conjugate_pairing_defect);
  }
  check(8, "eigenvalues come in conjugate pairs", pairing <= 1e-10,
        fmt("max relative defect %.3g <= 1e-10", pairing));

  const std::vector<std::vector<std::string>> commands = {
      {"means", "table", "--a", "0.7", "--b", "3"},
      {"--seed", "5", "flux", "check", "--flux", "shima", "--pairs", "500"},
      {"--seed", "5", "harten", "scan", "--alpha", "2", "--trials", "300"},
      {"sbp", "dump", "--family", "dg", "--nodes", "4", "--degree", "2"},
      {"spectrum", "advection1d", "--family", "cg", "--nodes", "6", "--mean", "logarithmic"},
      {"spectrum", "euler2d", "--flux", "shima", "--elements", "2", "--degree", "3"},
      {"simulate", "euler2d", "--flux", "ranocha", "--elements", "2", "--degree", "3", "--t-end", "0.1"},
  };
  bool same = true;
  std::size_t bytes = 0;
  for (const auto& cmd : commands) {
    const auto a = cli_output(cmd), b = cli_output(cmd);
    same = same && a == b && a.rfind("0\n", 0) == 0;
    bytes += a.size();
  }
  auto threaded = commands[5];
  threaded.insert(threaded.begin(), {"--threads", "3"});
  same = same && cli_output(threaded) == cli_output(commands[5]);
  check(8, "CLI output is deterministic", same,
        fmt("%zu commands run twice plus a threaded spectrum, %zu bytes compared", commands.size(), bytes));
}

}  // namespace

int main(int argc, char** argv) {
  ensure_openblas_coretype(argv);
  const int n = argc > 1 ? std::atoi(argv[1]) : 0;
  const bool strict = argc > 2 && std::strcmp(argv[2], "--strict") == 0;
  void (*const criteria[])() = {flux_properties, harten, sbp_entropy, advection_spectra,
                                euler_spectra, robustness, perturbation, pipeline};
  if (n < 1 || n > 8) {
    std::fprintf(stderr, "usage: acceptance <1-8> [--strict]\n");
    return 64;
  }
  try {
    criteria[n - 1]();
  } catch (const std::exception& e) {
    std::printf("[FAIL] criterion %d: evaluation error (%s)\n", n, e.what());
    return 1;
  }
  std::printf("criterion %d: %d failed check(s)\n", n, failures);
  return strict && failures > 0 ? 1 : 0;
}
