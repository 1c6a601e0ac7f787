// fnls: experiment runner behind the command-line tool.
#pragma once

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "fnls/config.hpp"
#include "fnls/error.hpp"
#include "fnls/field.hpp"
#include "fnls/io.hpp"
#include "fnls/model.hpp"
#include "fnls/petviashvili.hpp"
#include "fnls/semiclassical.hpp"
#include "fnls/stability.hpp"
#include "fnls/timestepper.hpp"

namespace fnls {

inline constexpr const char* kVersion = "0.1.0";

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int other = 1;
inline constexpr int config = 2;
inline constexpr int nonexistence = 3;
inline constexpr int not_converged = 4;
inline constexpr int blowup = 5;
inline constexpr int io = 6;
}  // namespace exit_code

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonexistenceRegime:
    case ErrorCode::SpeedTooLarge:
    case ErrorCode::IndefiniteSymbol:
      return exit_code::nonexistence;
    case ErrorCode::NotConverged:
    case ErrorCode::Diverged:
    case ErrorCode::ZeroDenominator:
      return exit_code::not_converged;
    case ErrorCode::Io:
    case ErrorCode::BadMagic:
    case ErrorCode::UnsupportedVersion:
    case ErrorCode::TruncatedFile:
      return exit_code::io;
    case ErrorCode::ConfigInvalid:
    case ErrorCode::InvalidArgument:
    case ErrorCode::NonEvenN:
    case ErrorCode::DegenerateInterval:
    case ErrorCode::InvalidRegime:
    case ErrorCode::InadmissibleExponent:
    case ErrorCode::BoundaryNotDecayed:
      return exit_code::config;
    default:
      return exit_code::other;
  }
}

struct RunReport {
  int exit_code = exit_code::ok;
  std::string message;
  std::filesystem::path out_dir;
  std::vector<std::pair<std::string, std::string>> facts;
  std::vector<std::pair<std::string, std::string>> files;

  std::optional<std::string> fact(const std::string& key) const {
    for (const auto& [k, v] : facts) {
      if (k == key) return v;
    }
    return std::nullopt;
  }
};

namespace detail {

inline SolveOptions solver_options(const ExperimentConfig& c, const GridPtr& grid) {
  SolveOptions so;
  so.tol = c.tol;
  so.max_iter = c.max_iter;
  so.nu = c.nu;
  so.force = c.force;
  if (c.guess == "gaussian") {
    so.initial_guess = GuessPreset::Gaussian;
  } else if (c.guess == "sech") {
    so.initial_guess = GuessPreset::Sech;
  } else if (c.guess == "exact-beta0") {
    so.initial_guess = GuessPreset::ExactBeta0;
  } else {
    auto stored = read_profile(c.guess);
    if (!ComplexField::same_grid(stored.field.grid(), *grid)) {
      throw Error(ErrorCode::ConfigInvalid, "guess: profile file grid differs from [domain]");
    }
    so.initial_guess = ComplexField(grid, stored.field.values());
  }
  return so;
}

inline ProfileRecord solve_profile(const ExperimentConfig& c, const GridPtr& grid) {
  const auto so = solver_options(c, grid);
  if (c.wave.c != 0.0) return solve_boosted(grid, c.model, c.wave, so);
  if (c.continuation) return solve_standing_wave_continuation(grid, c.model, c.wave.omega, so);
  return solve_standing_wave(grid, c.model, c.wave.omega, so);
}

/// Modes sorted by wavenumber with |coefficient|.
inline std::string spectrum_dat(const ComplexField& u) {
  const auto U = forward(u);
  const auto& k = u.grid().k();
  std::vector<std::size_t> order(k.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return k[i] < k[j]; });
  std::vector<double> ks, mags;
  for (auto i : order) {
    ks.push_back(k[i]);
    mags.push_back(std::abs(U[i]));
  }
  return dat_table({ks, mags});
}

inline void write_profile_artifacts(ArtifactSet& out, const ProfileRecord& rec) {
  const auto& u = rec.profile;
  out.profile("profile.fnls", u, rec.params, rec.wave);
  out.write("trace.csv", trace_csv(rec.trace));
  std::vector<double> re, im;
  for (const auto& z : u.values()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  out.write("profile_re.dat", dat_table({u.grid().x(), re}));
  if (rec.wave.c != 0.0) out.write("profile_im.dat", dat_table({u.grid().x(), im}));
  out.write("spectrum.dat", spectrum_dat(u));
  std::vector<double> n(rec.trace.error.size());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = static_cast<double>(i + 1);
  out.write("trace_error.dat", dat_table({n, rec.trace.error}));
  out.write("trace_stab.dat", dat_table({n, rec.trace.stab}));
  out.write("trace_res.dat", dat_table({n, rec.trace.res}));

  out.fact("iterations", std::to_string(rec.trace.iterations));
  out.fact("converged", rec.trace.converged ? "true" : "false");
  out.fact("final_error", rec.trace.error.back());
  out.fact("final_stab", rec.trace.stab.back());
  out.fact("final_res", rec.trace.res.back());
  out.fact("residual_RES", residual_RES(u, rec.params, rec.wave));
  out.fact("pohozaev_r0", rec.pohozaev.r0);
  out.fact("pohozaev_r1", rec.pohozaev.r1);
  out.fact("pohozaev_rB", rec.pohozaev.rB);
  out.fact("suspect", rec.suspect ? "true" : "false");
  out.fact("linf", linf(u));
  out.fact("lyapunov_d", lyapunov_d(u, rec.params.sigma));
}

/// x, t, |u|^2 surface from the stored snapshots, at most max_x points per row.
inline std::string surface_dat(const std::vector<Snapshot>& snaps, std::size_t max_x = 512) {
  std::string out;
  for (const auto& s : snaps) {
    const auto& x = s.u.grid().x();
    const std::size_t stride = std::max<std::size_t>(1, x.size() / max_x);
    for (std::size_t j = 0; j < x.size(); j += stride) {
      out += format_double(x[j]) + ' ' + format_double(s.t) + ' ' + format_double(std::norm(s.u[j])) + '\n';
    }
    out += '\n';
  }
  return out;
}

inline void write_evolution_artifacts(ArtifactSet& out, const EvolutionResult& ev, const ModelParams& p,
                                      const WaveParams& w, int snapshot_files) {
  const auto& d = ev.diagnostics;
  out.write("diagnostics.csv", diagnostics_csv(d.rows));
  out.write("linf.csv", csv_table({"t", "linf"}, {d.step_t, d.step_linf}));
  std::vector<double> t, chi, drift;
  for (const auto& r : d.rows) {
    t.push_back(r.t);
    chi.push_back(r.chi);
    drift.push_back(r.deltaF);
  }
  out.write("linf.dat", dat_table({d.step_t, d.step_linf}));
  out.write("chi.dat", dat_table({t, chi}));
  out.write("mass_drift.dat", dat_table({t, drift}));
  if (!ev.snapshots.empty()) {
    out.write("surface.dat", surface_dat(ev.snapshots));
    const auto count = std::min<std::size_t>(static_cast<std::size_t>(snapshot_files), ev.snapshots.size());
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t idx = count == 1 ? 0 : i * (ev.snapshots.size() - 1) / (count - 1);
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%03zu.fnls", i);
      out.profile(name, ev.snapshots[idx].u, p, w, ev.snapshots[idx].t);
    }
  }
  out.profile("final.fnls", ev.final, p, w, ev.outcome.t);
  double max_drift = 0.0;
  for (double x : drift) max_drift = std::max(max_drift, x);
  out.fact("outcome", to_string(ev.outcome.kind));
  out.fact("outcome_time", ev.outcome.t);
  out.fact("max_deltaF", max_drift);
  out.fact("final_linf", d.step_linf.back());
  for (const auto& msg : d.warnings) out.fact("warning", msg);
}

/// Smooth random test field: a few complex Gaussian bumps.
inline ComplexField random_bumps(const GridPtr& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> centre(-0.2 * g->length(), 0.2 * g->length());
  std::uniform_real_distribution<double> width(0.5, 3.0);
  std::uniform_real_distribution<double> amp(0.2, 1.5);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> wave(-2.0, 2.0);
  ComplexField u(g);
  for (int b = 0; b < 3; ++b) {
    const double x0 = centre(rng), s = width(rng), A = amp(rng), th = phase(rng), kk = wave(rng);
    const auto& x = g->x();
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double y = (x[j] - x0) / s;
      u[j] += A * std::exp(-y * y) * std::polar(1.0, th + kk * x[j]);
    }
  }
  return u;
}

struct CheckRow {
  std::string name;
  double value;
  double tolerance;
  bool pass;
};

inline std::vector<CheckRow> property_checks(const ExperimentConfig& c, const GridPtr& g) {
  std::mt19937_64 rng(c.seed);
  std::vector<CheckRow> rows;
  auto add = [&](std::string name, double value, double tol) { rows.push_back({std::move(name), value, tol, value <= tol}); };
  const auto u = random_bumps(g, rng);

  const auto back = inverse(forward(u));
  add("fft_roundtrip", linf_distance(u, back) / linf(u), 1e-12);

  const auto U = forward(u);
  double phys = 0.0, spec = 0.0;
  for (const auto& v : u.values()) phys += std::norm(v);
  for (const auto& v : U.coeffs()) spec += std::norm(v);
  phys *= g->h();
  spec *= g->length();
  add("parseval", std::abs(phys - spec) / phys, 1e-12);

  const auto f0 = compute_functionals(u, c.model);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  double gauge = 0.0;
  for (int i = 0; i < 20; ++i) {
    auto v = u;
    v *= std::polar(1.0, angle(rng));
    const auto f = compute_functionals(v, c.model);
    gauge = std::max({gauge, std::abs(f.F - f0.F) / std::abs(f0.F), std::abs(f.E - f0.E) / (std::abs(f0.E) + 1.0),
                      std::abs(f.P - f0.P) / (std::abs(f0.P) + 1.0)});
  }
  add("gauge_invariance", gauge, 1e-12);

  const auto shifted = compute_functionals(circular_shift(u, static_cast<long>(g->size() / 7)), c.model);
  add("translation_invariance",
      std::max({std::abs(shifted.F - f0.F) / std::abs(f0.F), std::abs(shifted.E - f0.E) / (std::abs(f0.E) + 1.0),
                std::abs(shifted.P - f0.P) / (std::abs(f0.P) + 1.0)}),
      1e-12);

  const auto lin = forward(linear_substep(u, 0.37, c.model.lambda));
  double unit = 0.0;
  for (std::size_t m = 0; m < lin.size(); ++m) unit = std::max(unit, std::abs(std::abs(lin[m]) - std::abs(U[m])));
  add("linear_unitarity", unit / max_abs(U.coeffs()), 1e-12);

  const auto encoded = encode_profile(u, c.model, c.wave);
  const auto decoded = decode_profile(encoded);
  bool same = decoded.field.size() == u.size();
  for (std::size_t j = 0; same && j < u.size(); ++j) {
    same = std::memcmp(&decoded.field[j], &u[j], sizeof(cplx)) == 0;
  }
  add("profile_roundtrip", same ? 0.0 : 1.0, 0.0);

  if (c.model.zeta == 1.0 && gn_exponent_admissible(c.model.beta, c.model.sigma) &&
      !nonexistence_reason(c.model) && !ground_state_window_violation(c.model)) {
    ModelParams unit_p = c.model;
    unit_p.lambda = 1.0;
    const auto Q = solve_standing_wave(g, unit_p, 1.0).profile;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto gn = gn_check(random_bumps(g, rng), Q, unit_p, c.model.sigma);
      worst = std::max(worst, gn.lhs / gn.rhs);
    }
    add("gn_inequality_max_ratio", worst, 1.0 + 1e-8);
  }
  return rows;
}

inline void run_into(const ExperimentConfig& c, ArtifactSet& out, int& code) {
  const auto grid = make_grid(c.a, c.b, c.N);
  switch (c.experiment) {
    case Experiment::GroundState: {
      auto cc = c;
      cc.wave.c = 0.0;
      const auto rec = solve_profile(cc, grid);
      write_profile_artifacts(out, rec);
      if (c.model.beta == 0.0 && c.model.lambda == 1.0) {
        out.fact("linf_error_vs_exact",
                 linf_distance(rec.profile, exact_profile_beta0(c.model.sigma, c.wave.omega, grid)));
      }
      break;
    }
    case Experiment::Boosted: {
      const auto so = solver_options(c, grid);
      const auto rec = solve_boosted(grid, c.model, c.wave, so);
      write_profile_artifacts(out, rec);
      double re = 0.0, im = 0.0;
      for (const auto& z : rec.profile.values()) {
        re = std::max(re, std::abs(z.real()));
        im = std::max(im, std::abs(z.imag()));
      }
      out.fact("real_amplitude", re);
      out.fact("imag_amplitude", im);
      break;
    }
    case Experiment::Evolve:
    case Experiment::Perturb: {
      ComplexField u0;
      if (c.guess == "gaussian" || c.guess == "sech" || c.guess == "exact-beta0") {
        const auto rec = solve_profile(c, grid);
        u0 = rec.profile;
        out.fact("profile_iterations", std::to_string(rec.trace.iterations));
      } else {
        auto stored = read_profile(c.guess);
        u0 = ComplexField(grid, stored.field.values());
        if (!ComplexField::same_grid(stored.field.grid(), *grid)) {
          throw Error(ErrorCode::ConfigInvalid, "guess: profile file grid differs from [domain]");
        }
      }
      u0 *= cplx(c.r);
      out.profile("initial.fnls", u0, c.model, c.wave, 0.0);
      auto ev = evolve(u0, c.model, c.stepping);
      write_evolution_artifacts(out, ev, c.model, c.wave, c.snapshots);
      if (c.experiment == Experiment::Perturb) {
        const auto v = verdict_from(std::move(ev), c.r);
        out.fact("verdict", to_string(v.outcome));
        if (v.outcome == VerdictKind::BlowUp) out.fact("blowup_time", v.blowup_time);
        out.fact("chi_initial", v.chi_series.front());
        out.fact("chi_max", v.chi_max);
        out.fact("chi_final", v.chi_series.back());
        if (v.outcome == VerdictKind::BlowUp) code = exit_code::blowup;
      } else if (ev.outcome.kind == OutcomeKind::BlowUpDetected ||
                 ev.outcome.kind == OutcomeKind::MassDriftExceeded) {
        code = exit_code::blowup;
      }
      break;
    }
    case Experiment::DScan: {
      ScanOptions so;
      so.margin_fraction = c.margin;
      so.solver = solver_options(c, grid);
      const auto r = scan_d(grid, c.model, c.wave.c, c.omega_max, c.n_points, so);
      std::string csv = "omega,d,d2,flag\n";
      for (std::size_t i = 0; i < r.omegas.size(); ++i) {
        csv += format_double(r.omegas[i]) + ',' + format_double(r.d[i]) + ',';
        if (i > 0 && i + 1 < r.omegas.size()) csv += format_double(r.d2[i - 1]);
        csv += ',' + std::string(r.failed[i] ? "failed" : "ok") + '\n';
      }
      out.write("dscan.csv", csv);
      std::vector<double> w(r.omegas.begin() + 1, r.omegas.end() - 1);
      out.write("d2.dat", dat_table({w, r.d2}));
      out.write("d.dat", dat_table({r.omegas, r.d}));
      out.fact("omega_c", r.omega_c ? format_double(*r.omega_c) : std::string("none"));
      if (r.omega_c) out.fact("omega_c_uncertainty", r.omega_c_uncertainty);
      out.fact("all_positive", r.all_positive ? "true" : "false");
      int failed = 0;
      for (std::size_t i = 0; i < r.failed.size(); ++i) {
        if (r.failed[i]) {
          ++failed;
          out.fact("failed_at", format_double(r.omegas[i]) + " " + r.failure_reason[i]);
        }
      }
      out.fact("failed_points", std::to_string(failed));
      break;
    }
    case Experiment::Semiclassical: {
      SemiclassicalConfig sc;
      sc.epsilon = c.epsilon;
      sc.amplitude = c.amplitude;
      sc.phase = c.phase;
      sc.p = c.model;
      sc.cfg = c.stepping;
      const auto ev = semiclassical_evolve(sc, grid);
      write_evolution_artifacts(out, ev, c.model, c.wave, c.snapshots);
      const auto tb = first_break_time(ev.diagnostics.step_t, ev.diagnostics.step_linf);
      out.fact("t_break", tb ? format_double(*tb) : std::string("none"));
      if (ev.outcome.kind == OutcomeKind::BlowUpDetected) code = exit_code::blowup;
      break;
    }
    case Experiment::Check: {
      const auto rows = property_checks(c, grid);
      std::string csv = "name,value,tolerance,pass\n";
      bool all = true;
      for (const auto& r : rows) {
        csv += r.name + ',' + format_double(r.value) + ',' + format_double(r.tolerance) + ',' +
               (r.pass ? "true" : "false") + '\n';
        all = all && r.pass;
      }
      out.write("check.csv", csv);
      out.fact("all_pass", all ? "true" : "false");
      if (!all) code = exit_code::other;
      break;
    }
  }
}

}  // namespace detail

/// Runs one experiment, writing artifacts and manifest.txt into c.out_dir.
/// Never throws for experiment failures: they become exit codes.
inline RunReport run_experiment(const ExperimentConfig& c) {
  RunReport report;
  report.out_dir = c.out_dir;
  ArtifactSet out(c.out_dir);
  const auto start = std::chrono::steady_clock::now();
  out.fact("experiment", to_string(c.experiment));
  for (const auto& k : config_keys()) out.fact("config." + k.qualified(), k.get(c));
  out.fact("version", std::string("fnls ") + kVersion);
  out.fact("fftw", fftw_version);
#ifdef __VERSION__
  out.fact("compiler", __VERSION__);
#endif
  int code = exit_code::ok;
  try {
    validate_config(c);
    detail::run_into(c, out, code);
    if (code == exit_code::ok) {
      report.message = "ok";
    } else if (auto o = out.fact_value("outcome")) {
      report.message = "evolution ended with " + *o + " at t = " + out.fact_value("outcome_time").value_or("?");
    } else {
      report.message = "property checks failed; see check.csv";
    }
  } catch (const Error& e) {
    code = exit_code_for(e.code());
    report.message = e.what();
    out.fact("error", e.what());
  } catch (const std::exception& e) {
    code = exit_code::other;
    report.message = e.what();
    out.fact("error", e.what());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.fact("exit_code", std::to_string(code));
  out.fact("wall_time_s", wall);
  try {
    out.write_manifest();
  } catch (const Error& e) {
    if (code == exit_code::ok) code = exit_code::io;
    report.message = e.what();
  }
  report.exit_code = code;
  report.facts = out.facts();
  report.files = out.files();
  return report;
}

/// Runs one experiment per value of `key`, each in out_dir/key=value, on a
/// pool of `threads` workers. Reports come back in value order.
inline std::vector<RunReport> run_sweep(const ExperimentConfig& base, const std::string& key,
                                        const std::vector<std::string>& values, unsigned threads) {
  std::vector<ExperimentConfig> configs;
  for (const auto& v : values) {
    auto c = base;
    set_config_value(c, key, v);
    c.out_dir = (std::filesystem::path(base.out_dir) / (key + "=" + v)).string();
    configs.push_back(std::move(c));
  }
  std::vector<RunReport> reports(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) reports[i] = run_experiment(configs[i]);
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(configs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return reports;
}

}  // namespace fnls
