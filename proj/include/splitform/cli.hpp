#pragma once

// Command-line front end: argument parsing, validation and CSV/JSON output
// for every experiment. Exit codes: 0 success, 1 usage or validation error,
// 2 simulation crash when --fail-on-crash is given.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "splitform/dgsem2d.hpp"
#include "splitform/errors.hpp"
#include "splitform/euler.hpp"
#include "splitform/linstab.hpp"
#include "splitform/means.hpp"
#include "splitform/sbp1d.hpp"
#include "splitform/timeloop.hpp"
#include "splitform/twopoint.hpp"

namespace splitform::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitCrash = 2;

struct GlobalOptions {
  double gamma = 1.4;
  double cfl = 0.05;
  std::uint64_t seed = 0;
  int threads = 1;
  bool fail_on_crash = false;
};

namespace detail {

using nlohmann::ordered_json;

/// Shortest round-trip representation, so CSV output is byte-stable.
inline std::string num(double x) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

/// Writes to `path`, or to `fallback` when the path is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      os_ = &fallback;
      return;
    }
    file_.open(path);
    if (!file_) throw ConfigError("cannot open output file " + path);
    os_ = &file_;
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_ = nullptr;
};

inline FluxId flux_arg(const std::string& name, bool allow_hll = true) {
  const auto id = parse_flux_id(name);
  if (!id) throw ConfigError("unknown flux '" + name + "'");
  if (!allow_hll && !is_symmetric_two_point(*id)) {
    throw ConfigError("flux '" + name + "' is not a symmetric two-point volume flux");
  }
  return *id;
}

inline MeanKind mean_arg(const std::string& name) {
  const auto m = parse_mean_kind(name);
  if (!m) throw ConfigError("unknown mean '" + name + "'");
  return *m;
}

inline OperatorFamily family_arg(const std::string& name) {
  const auto f = parse_operator_family(name);
  if (!f) throw ConfigError("unknown operator family '" + name + "'");
  return *f;
}

inline void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(std::string(what) + " must be positive");
}

inline ordered_json report_json(const RunReport& r) {
  ordered_json j;
  j["final_time"] = r.final_time;
  j["crashed"] = r.crashed;
  j["crash_time"] = r.crash_time ? ordered_json(*r.crash_time) : ordered_json(nullptr);
  j["crash_reason"] = r.crash_reason;
  j["pressure_deviation_max"] = r.pressure_deviation_max;
  j["velocity_deviation_max"] = r.velocity_deviation_max;
  j["step_count"] = r.step_count;
  return j;
}

inline ordered_json complex_json(std::complex<double> z) {
  return ordered_json{{"re", z.real()}, {"im", z.imag()}};
}

inline ordered_json spectrum_json(const Spectrum& s) {
  ordered_json j;
  j["size"] = s.eigenvalues.size();
  j["max_real"] = s.max_real;
  j["spectral_radius"] = s.spectral_radius;
  j["dominant"] = complex_json(s.dominant);
  j["conjugate_pairing_defect"] = s.conjugate_pairing_defect;
  return j;
}

inline void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
  os << "re,im\n";
  for (const auto& z : s.eigenvalues) os << num(z.real()) << ',' << num(z.imag()) << '\n';
}

inline void write_snapshot_csv(const std::string& path, const Semidiscretization2D& semi,
                               const Eigen::VectorXd& u) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open snapshot file " + path);
  os << "element,i,j,x,y,rho,rho_v1,rho_v2,rho_e\n";
  const int np = semi.mesh().nodes_per_dim();
  for (int e = 0; e < semi.mesh().element_count(); ++e) {
    for (int j = 0; j < np; ++j) {
      for (int i = 0; i < np; ++i) {
        const auto x = semi.coordinates(e, i, j);
        const auto s = semi.state_at(u, semi.node_index(e, i, j));
        os << e << ',' << i << ',' << j << ',' << num(x[0]) << ',' << num(x[1]);
        for (double c : s) os << ',' << num(c);
        os << '\n';
      }
    }
  }
}

inline std::string sidecar_path(const std::string& out) {
  std::filesystem::path p(out);
  p.replace_extension(".json");
  return p.string();
}

}  // namespace detail

/// Parses argv and runs the selected experiment. Output goes to `out`
/// (reports, CSV without --out) and diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using detail::num;
  using detail::ordered_json;

  CLI::App app{"split-form flux, SBP and DG stability experiments", "splitform-lab"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--gamma", g.gamma, "ratio of specific heats")->capture_default_str();
  app.add_option("--cfl", g.cfl, "relative CFL number")->capture_default_str();
  app.add_option("--seed", g.seed, "64-bit seed for mt19937_64 sampling")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads for Jacobian assembly")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_flag("--fail-on-crash", g.fail_on_crash, "exit with status 2 if a simulation crashes");

  int exit_code = kExitOk;
  std::function<void()> action;

  // means table
  auto* means = app.add_subcommand("means", "scalar means")->require_subcommand(1)->fallthrough();
  double mean_a = 1.0, mean_b = 2.0;
  auto* means_table = means->add_subcommand("table", "all six means of a and b as CSV")->fallthrough();
  means_table->add_option("--a", mean_a)->capture_default_str();
  means_table->add_option("--b", mean_b)->capture_default_str();
  means_table->callback([&] {
    action = [&] {
      out << "kind,value\n";
      for (auto k : kAllMeans) out << to_string(k) << ',' << num(mean(k, mean_a, mean_b)) << '\n';
    };
  });

  // flux check
  auto* flux = app.add_subcommand("flux", "two-point fluxes")->require_subcommand(1)->fallthrough();
  std::string flux_name = "ranocha";
  std::size_t flux_pairs = 1000;
  auto* flux_check = flux->add_subcommand("check", "EC/KEP/PEP residuals over random pairs")->fallthrough();
  flux_check->add_option("--flux", flux_name)->capture_default_str();
  flux_check->add_option("--pairs", flux_pairs)->capture_default_str()->check(CLI::PositiveNumber);
  flux_check->callback([&] {
    action = [&] {
      const auto id = detail::flux_arg(flux_name);
      const GasModel gas(g.gamma);
      const auto r = check_flux(id, flux_pairs, g.seed, gas);
      ordered_json j;
      j["flux"] = std::string(to_string(id));
      j["pairs"] = flux_pairs;
      j["seed"] = g.seed;
      j["gamma"] = g.gamma;
      j["ec_residual"] = r.ec_residual;
      j["kep_residual"] = r.kep_residual;
      j["pep_momentum_spread"] = r.pep_momentum_spread;
      j["pep_energy_spread"] = r.pep_energy_spread;
      j["states_sampled"] = r.states_sampled;
      out << j.dump(2) << '\n';
    };
  });

  // harten scan
  auto* harten = app.add_subcommand("harten", "Harten entropy family")->require_subcommand(1)->fallthrough();
  std::optional<double> harten_alpha;
  std::size_t harten_trials = 1000;
  std::string harten_out;
  auto* harten_scan_cmd =
      harten->add_subcommand("scan", "EC residual of the arithmetic density flux on constrained pairs")
          ->fallthrough();
  harten_scan_cmd->add_option("--alpha", harten_alpha, "family parameter; omit for the standard entropy");
  harten_scan_cmd->add_option("--trials", harten_trials)->capture_default_str()->check(CLI::PositiveNumber);
  harten_scan_cmd->add_option("--out", harten_out, "counterexample CSV (default: stdout)");
  harten_scan_cmd->callback([&] {
    action = [&] {
      const GasModel gas(g.gamma);
      const auto h = harten_alpha ? HartenEntropy::alpha_family(*harten_alpha) : HartenEntropy::standard();
      const auto r = harten_scan(h, gas, harten_trials, g.seed);
      detail::Sink sink(harten_out, out);
      *sink << "rho_m,p_m,p_p,rho_p,residual\n";
      for (const auto& c : r.counterexamples) {
        *sink << num(c.rho_m) << ',' << num(c.p_m) << ',' << num(c.p_p) << ',' << num(c.rho_p)
              << ',' << num(c.residual) << '\n';
      }
      if (!harten_out.empty()) {
        ordered_json j;
        j["entropy"] = harten_alpha ? "alpha_family" : "standard";
        j["alpha"] = harten_alpha ? ordered_json(*harten_alpha) : ordered_json(nullptr);
        j["trials"] = r.trials;
        j["solvable"] = r.solvable;
        j["skipped"] = r.skipped;
        j["counterexamples"] = r.counterexamples.size();
        j["fraction"] = r.solvable ? double(r.counterexamples.size()) / double(r.solvable) : 0.0;
        out << j.dump(2) << '\n';
      }
    };
  });

  // sbp dump
  auto* sbp = app.add_subcommand("sbp", "periodic SBP operators")->require_subcommand(1)->fallthrough();
  std::string sbp_family = "fd4", sbp_out;
  int sbp_nodes = 16, sbp_degree = 3;
  double sbp_xmin = 0.0, sbp_xmax = 1.0;
  auto* sbp_dump = sbp->add_subcommand("dump", "operator as CSV: i, x, mass, D row")->fallthrough();
  sbp_dump->add_option("--family", sbp_family)->capture_default_str();
  sbp_dump->add_option("--nodes,--elements", sbp_nodes, "nodes (fd) or elements (cg, dg)")
      ->capture_default_str();
  sbp_dump->add_option("--degree", sbp_degree)->capture_default_str();
  sbp_dump->add_option("--xmin", sbp_xmin)->capture_default_str();
  sbp_dump->add_option("--xmax", sbp_xmax)->capture_default_str();
  sbp_dump->add_option("--out", sbp_out);
  sbp_dump->callback([&] {
    action = [&] {
      const auto op = build_operator(detail::family_arg(sbp_family), sbp_nodes, sbp_xmin, sbp_xmax,
                                     sbp_degree);
      detail::Sink sink(sbp_out, out);
      *sink << "i,x,mass";
      for (int j = 0; j < op.size(); ++j) *sink << ",D" << j;
      *sink << '\n';
      for (int i = 0; i < op.size(); ++i) {
        *sink << i << ',' << num(op.grid[i]) << ',' << num(op.mass[i]);
        for (int j = 0; j < op.size(); ++j) *sink << ',' << num(op.D(i, j));
        *sink << '\n';
      }
    };
  });

  // spectrum advection1d / euler2d
  auto* spec = app.add_subcommand("spectrum", "Jacobian spectra")->require_subcommand(1)->fallthrough();
  AdvectionSpectrumConfig adv;
  std::string adv_family = "fd2", adv_mean = "logarithmic", spec_out;
  auto* spec_adv = spec->add_subcommand("advection1d", "linear advection, u0 = 2 + 1.9 sin(pi x) on [0, 2]")
                       ->fallthrough();
  spec_adv->add_option("--family", adv_family)->capture_default_str();
  spec_adv->add_option("--nodes,--elements", adv.size, "nodes (fd) or elements (cg, dg)")
      ->capture_default_str();
  spec_adv->add_option("--degree", adv.degree)->capture_default_str();
  spec_adv->add_option("--mean", adv_mean)->capture_default_str();
  spec_adv->add_option("--out", spec_out, "eigenvalue CSV (default: stdout)");
  spec_adv->callback([&] {
    action = [&] {
      adv.family = detail::family_arg(adv_family);
      adv.mean = detail::mean_arg(adv_mean);
      adv.threads = g.threads;
      const auto s = advection_spectrum_experiment(adv);
      detail::Sink sink(spec_out, out);
      detail::write_spectrum_csv(*sink, s);
      if (!spec_out.empty()) out << detail::spectrum_json(s).dump(2) << '\n';
    };
  });

  std::string e_flux = "shima", e_surface, e_vec_out;
  Mesh2D e_mesh = density_wave_mesh();
  auto add_mesh_options = [&](CLI::App* c) {
    c->add_option("--degree", e_mesh.degree)->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--elements", e_mesh.elements_per_dim)->capture_default_str()->check(CLI::PositiveNumber);
  };
  auto* spec_euler = spec->add_subcommand("euler2d", "2D Euler DGSEM at the density wave")->fallthrough();
  spec_euler->add_option("--flux", e_flux, "volume flux")->capture_default_str();
  spec_euler->add_option("--surface-flux", e_surface, "surface flux (default: volume flux)");
  spec_euler->add_option("--out", spec_out, "eigenvalue CSV (default: stdout)");
  spec_euler->add_option("--eigenvector-out", e_vec_out, "dominant eigenvector CSV (dof, value)");
  add_mesh_options(spec_euler);
  spec_euler->callback([&] {
    action = [&] {
      const auto vol = detail::flux_arg(e_flux, false);
      const auto surf = e_surface.empty() ? vol : detail::flux_arg(e_surface);
      const auto r = euler_spectrum_experiment(vol, surf, GasModel(g.gamma), g.threads,
                                               Mesh2D(-1.0, 1.0, e_mesh.elements_per_dim, e_mesh.degree));
      detail::Sink sink(spec_out, out);
      detail::write_spectrum_csv(*sink, r.spectrum);
      if (!e_vec_out.empty()) {
        detail::Sink vec(e_vec_out, out);
        *vec << "dof,value\n";
        const auto& v = r.spectrum.dominant_eigenvector;
        for (Eigen::Index k = 0; k < v.size(); ++k) *vec << k << ',' << num(v[k]) << '\n';
      }
      if (!spec_out.empty()) out << detail::spectrum_json(r.spectrum).dump(2) << '\n';
    };
  });

  // simulate euler2d
  auto* sim = app.add_subcommand("simulate", "time integration")->require_subcommand(1)->fallthrough();
  double sim_t_end = 1.0, snap_every = 0.0;
  std::string sim_ic = "density_wave", snap_prefix = "snapshot";
  auto* sim_euler = sim->add_subcommand("euler2d", "2D Euler DGSEM, LSRK time stepping")->fallthrough();
  sim_euler->add_option("--flux", e_flux, "volume flux")->capture_default_str();
  sim_euler->add_option("--surface-flux", e_surface, "surface flux (default: volume flux)");
  sim_euler->add_option("--t-end", sim_t_end)->capture_default_str();
  sim_euler->add_option("--ic", sim_ic)->capture_default_str();
  sim_euler->add_option("--snapshot-every", snap_every, "CSV snapshot interval in time units (0: none)");
  sim_euler->add_option("--snapshot-prefix", snap_prefix)->capture_default_str();
  add_mesh_options(sim_euler);
  sim_euler->callback([&] {
    action = [&] {
      const auto vol = detail::flux_arg(e_flux, false);
      const auto surf = e_surface.empty() ? vol : detail::flux_arg(e_surface);
      if (sim_ic != "density_wave") throw ConfigError("unknown initial condition '" + sim_ic + "'");
      detail::require_positive(g.cfl, "--cfl");
      if (!(sim_t_end >= 0.0)) throw ConfigError("--t-end must be non-negative");
      const Semidiscretization2D semi(Mesh2D(-1.0, 1.0, e_mesh.elements_per_dim, e_mesh.degree), vol,
                                      surf, GasModel(g.gamma));
      const auto u0 = density_wave_state(semi);
      IntegrateOptions opt;
      opt.t_end = sim_t_end;
      opt.cfl = g.cfl;
      opt.monitor_equilibrium = true;
      int snap_index = 0;
      auto snapshot = [&](const Eigen::VectorXd& u) {
        char name[64];
        std::snprintf(name, sizeof name, "_%05d.csv", snap_index++);
        detail::write_snapshot_csv(snap_prefix + name, semi, u);
      };
      double next = snap_every;
      if (snap_every > 0.0) {
        snapshot(u0);
        opt.on_step = [&](double t, const Eigen::VectorXd& u, std::size_t) {
          if (t + 1e-12 >= next) {
            snapshot(u);
            while (next <= t + 1e-12) next += snap_every;
          }
        };
      }
      const auto [report, u] = integrate(semi, u0, opt);
      ordered_json j;
      j["flux"] = std::string(to_string(vol));
      j["surface_flux"] = std::string(to_string(surf));
      j["t_end"] = sim_t_end;
      j["cfl"] = g.cfl;
      j["gamma"] = g.gamma;
      j["report"] = detail::report_json(report);
      out << j.dump(2) << '\n';
      if (report.crashed && g.fail_on_crash) exit_code = kExitCrash;
    };
  });

  // perturb euler2d
  auto* pert = app.add_subcommand("perturb", "perturbation growth")->require_subcommand(1)->fallthrough();
  PerturbationConfig pc;
  std::string mode_surface, pert_out, pert_method = "frozen_base";
  std::size_t pert_every = 1;
  auto* pert_euler = pert->add_subcommand("euler2d", "density wave plus amplitude * dominant eigenvector")
                         ->fallthrough();
  pert_euler->add_option("--flux", e_flux, "volume flux")->capture_default_str();
  pert_euler->add_option("--surface-flux", e_surface, "surface flux of the evolved scheme (default: volume flux)");
  pert_euler->add_option("--mode-surface-flux", mode_surface,
                         "surface flux of the scheme whose dominant eigenvector is the perturbation "
                         "(default: the evolved surface flux)");
  pert_euler->add_option("--method", pert_method,
                         "frozen_base (subtract the rhs of the initial state in every stage) or "
                         "two_trajectories (difference of two free runs)")
      ->capture_default_str();
  pert_euler->add_option("--amplitude", pc.amplitude)->capture_default_str();
  pert_euler->add_option("--t-end", pc.t_end)->capture_default_str();
  pert_euler->add_option("--out", pert_out, "growth CSV; the fit goes to a .json sidecar");
  pert_euler->add_option("--every", pert_every, "write every n-th step to the CSV")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  pert_euler->callback([&] {
    action = [&] {
      pc.volume = detail::flux_arg(e_flux, false);
      pc.surface = e_surface.empty() ? pc.volume : detail::flux_arg(e_surface);
      const auto mode_surf = mode_surface.empty() ? pc.surface : detail::flux_arg(mode_surface);
      detail::require_positive(pc.amplitude, "--amplitude");
      const auto method = parse_perturbation_method(pert_method);
      if (!method) throw ConfigError("unknown --method '" + pert_method + "'");
      pc.method = *method;
      detail::require_positive(pc.t_end, "--t-end");
      detail::require_positive(g.cfl, "--cfl");
      pc.cfl = g.cfl;
      pc.gas = GasModel(g.gamma);
      const auto modes = euler_spectrum_experiment(pc.volume, mode_surf, pc.gas, g.threads);
      const bool same = mode_surf == pc.surface;
      const Spectrum evolved =
          same ? modes.spectrum
               : euler_spectrum_experiment(pc.volume, pc.surface, pc.gas, g.threads).spectrum;
      const auto fit = perturbation_growth(pc, modes.spectrum.dominant_eigenvector);
      ordered_json j;
      j["flux"] = std::string(to_string(pc.volume));
      j["surface_flux"] = std::string(to_string(pc.surface));
      j["mode_surface_flux"] = std::string(to_string(mode_surf));
      j["method"] = std::string(to_string(pc.method));
      j["amplitude"] = pc.amplitude;
      j["t_end"] = pc.t_end;
      j["cfl"] = pc.cfl;
      j["gamma"] = g.gamma;
      j["lambda_fit"] = std::isfinite(fit.rate) ? ordered_json(fit.rate) : ordered_json(nullptr);
      j["fit_window"] = {fit.window_begin, fit.window_end};
      j["fit_samples"] = fit.window_samples;
      j["spectrum_max_real"] = evolved.max_real;
      j["mode_eigenvalue"] = detail::complex_json(modes.spectrum.dominant);
      j["report"] = detail::report_json(fit.run);
      if (!pert_out.empty()) {
        detail::Sink sink(pert_out, out);
        *sink << "t,d_rho,d_rhov1,d_rhov2,d_rhoe\n";
        for (std::size_t k = 0; k < fit.series.size(); ++k) {
          if (k % pert_every != 0 && k + 1 != fit.series.size()) continue;
          const auto& s = fit.series[k];
          *sink << num(s.t);
          for (double d : s.diff) *sink << ',' << num(d);
          *sink << '\n';
        }
        std::ofstream side(detail::sidecar_path(pert_out));
        if (!side) throw ConfigError("cannot open sidecar for " + pert_out);
        side << j.dump(2) << '\n';
      }
      out << j.dump(2) << '\n';
      if (fit.run.crashed && g.fail_on_crash) exit_code = kExitCrash;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInvalid;
  }

  try {
    GasModel{g.gamma};
    detail::require_positive(g.cfl, "--cfl");
    if (action) action();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return exit_code;
}

}  // namespace splitform::cli
