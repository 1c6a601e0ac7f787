// fnls: Lyapunov function d(omega), d'' scans and perturbation experiments.
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fnls/error.hpp"
#include "fnls/field.hpp"
#include "fnls/model.hpp"
#include "fnls/petviashvili.hpp"
#include "fnls/timestepper.hpp"

namespace fnls {

/// d = sigma/(2(sigma+1)) * h sum |phi_j|^{2 sigma + 2}.
inline double lyapunov_d(const ComplexField& phi, double sigma) {
  if (!phi.finite()) throw Error(ErrorCode::NonFiniteInput, "lyapunov_d of a non-finite field");
  return sigma / (2.0 * (sigma + 1.0)) * lp_norm_pow(phi, 2.0 * sigma + 2.0);
}

/// Exponent of omega in the closed form below: ((1-beta) 2 sigma + 2 - beta)/(2 sigma).
inline double d_exponent_closed_form(double beta, double sigma) {
  return ((1.0 - beta) * 2.0 * sigma + 2.0 - beta) / (2.0 * sigma);
}

/// Closed-form d''(omega) at c = 0:
///   ((1-beta) 2 sigma + 2 - beta)((2-beta)(sigma+1) - 3 sigma)/(8(sigma+1))
///     * omega^{((1-beta) 2 sigma + 2 - beta)/(2 sigma) - 2} * norm,
/// with norm = ||phi_1||^{2 sigma+2} of the omega = 1 profile. Its sign is that
/// of sigma < (2-beta)/(1+beta). Magnitude and exponent differ from the
/// scaling family; see d2_zero_speed_scaling.
inline double analytic_d2_zero_speed(const ModelParams& p, double omega, double norm) {
  const double s = p.sigma;
  const double lead = (1.0 - p.beta) * 2.0 * s + 2.0 - p.beta;
  const double sign_factor = (2.0 - p.beta) * (s + 1.0) - 3.0 * s;
  return lead * sign_factor / (8.0 * (s + 1.0)) * std::pow(omega, d_exponent_closed_form(p.beta, s) - 2.0) * norm;
}

/// Exponent q of d(omega) = d(1) omega^q along the c = 0 family
/// phi_omega(x) = omega^{(2-beta)/(4 sigma)} phi_1(omega^{1/2} x):
/// q = (2 - beta + sigma(1-beta))/(2 sigma).
inline double d_scaling_exponent(double beta, double sigma) {
  return (2.0 - beta + sigma * (1.0 - beta)) / (2.0 * sigma);
}

/// d''(omega) at c = 0 obtained by differentiating d(1) omega^q twice.
inline double d2_zero_speed_scaling(const ModelParams& p, double omega, double norm) {
  const double q = d_scaling_exponent(p.beta, p.sigma);
  const double d1 = p.sigma / (2.0 * (p.sigma + 1.0)) * norm;
  return q * (q - 1.0) * d1 * std::pow(omega, q - 2.0);
}

struct DScanResult {
  double c = 0;
  std::vector<double> omegas;
  std::vector<double> d;   ///< NaN where the solve failed
  std::vector<double> d2;  ///< d2[i] belongs to omegas[i+1]; NaN when a neighbour failed
  std::vector<bool> failed;
  std::vector<std::string> failure_reason;
  std::optional<double> omega_c;
  double omega_c_uncertainty = 0;  ///< grid spacing
  bool all_positive = false;
};

struct ScanOptions {
  double margin_fraction = 0.02;
  SolveOptions solver;
  /// Warm-start each solve from the previous omega's profile.
  bool warm_start = true;
};

/// Scans d(omega) over a uniform grid in (c^2/(4 lambda) + margin, omega_max].
inline DScanResult scan_d(const GridPtr& grid, const ModelParams& p, double c, double omega_max, int n_points,
                          const ScanOptions& opts = {}) {
  p.validate();
  if (!(p.lambda > 0.0) || p.zeta != 1.0) throw Error(ErrorCode::InvalidArgument, "scan_d needs lambda > 0, zeta = +1");
  if (n_points < 5) throw Error(ErrorCode::InvalidArgument, "scan_d needs at least 5 points");
  const double lo_edge = c * c / (4.0 * p.lambda);
  if (!(omega_max > lo_edge)) throw Error(ErrorCode::InvalidArgument, "omega_max must exceed c^2/(4 lambda)");
  const double lo = lo_edge + opts.margin_fraction * (omega_max - lo_edge);
  const double dw = (omega_max - lo) / static_cast<double>(n_points - 1);

  DScanResult out;
  out.c = c;
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  SolveOptions so = opts.solver;
  std::optional<ComplexField> previous;
  for (int i = 0; i < n_points; ++i) {
    const double w = lo + dw * static_cast<double>(i);
    out.omegas.push_back(w);
    if (opts.warm_start && previous) so.initial_guess = *previous;
    try {
      const auto rec = solve_boosted(grid, p, WaveParams{w, c}, so);
      out.d.push_back(lyapunov_d(rec.profile, p.sigma));
      out.failed.push_back(false);
      out.failure_reason.emplace_back();
      previous = rec.profile;
    } catch (const Error& e) {
      out.d.push_back(nan);
      out.failed.push_back(true);
      out.failure_reason.emplace_back(e.what());
      so.initial_guess = opts.solver.initial_guess;
      previous.reset();
    }
  }

  bool all_pos = true;
  for (int i = 1; i + 1 < n_points; ++i) {
    const double v = (out.d[i + 1] - 2.0 * out.d[i] + out.d[i - 1]) / (dw * dw);
    out.d2.push_back(v);
    if (!(v > 0.0)) all_pos = false;
  }
  out.all_positive = all_pos;

  for (std::size_t i = 0; i + 1 < out.d2.size(); ++i) {
    const double a = out.d2[i];
    const double b = out.d2[i + 1];
    if (!std::isfinite(a) || !std::isfinite(b)) continue;
    if ((a > 0.0) != (b > 0.0)) {
      const double wa = out.omegas[i + 1];
      out.omega_c = a == b ? wa : wa + dw * a / (a - b);
      out.omega_c_uncertainty = dw;
      break;
    }
  }
  return out;
}

enum class VerdictKind { BoundedOscillation, Growth, BlowUp };

inline const char* to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::BoundedOscillation: return "bounded-oscillation";
    case VerdictKind::Growth: return "growth";
    case VerdictKind::BlowUp: return "blow-up";
  }
  return "?";
}

struct PerturbationVerdict {
  double r = 1;
  VerdictKind outcome = VerdictKind::BoundedOscillation;
  double blowup_time = 0;  ///< set for BlowUp
  OutcomeKind evolution_outcome = OutcomeKind::Completed;
  std::vector<double> t;          ///< monitor ticks
  std::vector<double> chi_series;
  std::vector<double> linf_series;
  double chi_max = 0;
  /// chi dropped below chi(0)/1.5 at some tick (dispersal rather than growth).
  bool left_band_below = false;
  EvolutionResult evolution;
};

/// xs is nondecreasing over its last `fraction` of samples.
inline bool rising_tail(const std::vector<double>& xs, double fraction) {
  if (xs.size() < 2) return false;
  const auto tail = std::max<std::size_t>(2, static_cast<std::size_t>(fraction * static_cast<double>(xs.size())));
  const std::size_t start = xs.size() > tail ? xs.size() - tail : 0;
  for (std::size_t i = start + 1; i < xs.size(); ++i) {
    if (xs[i] < xs[i - 1]) return false;
  }
  return true;
}

/// Verdict from an evolution: BlowUp when it aborted (L^inf cap, non-finite
/// values or mass-drift gate); Growth when the final chi exceeds 1.5 chi(0)
/// and chi is nondecreasing over the last quarter of the ticks; BoundedOscillation
/// otherwise, including runs that overshoot the band and settle.
inline PerturbationVerdict verdict_from(EvolutionResult ev, double r, double tail_fraction = 0.25) {
  PerturbationVerdict v;
  v.r = r;
  v.evolution_outcome = ev.outcome.kind;
  for (const auto& row : ev.diagnostics.rows) {
    v.t.push_back(row.t);
    v.chi_series.push_back(row.chi);
    v.linf_series.push_back(row.linf);
  }
  const double chi0 = v.chi_series.front();
  for (double x : v.chi_series) {
    v.chi_max = std::max(v.chi_max, x);
    if (x < chi0 / 1.5) v.left_band_below = true;
  }
  if (ev.outcome.kind == OutcomeKind::BlowUpDetected || ev.outcome.kind == OutcomeKind::MassDriftExceeded) {
    v.outcome = VerdictKind::BlowUp;
    v.blowup_time = ev.outcome.t;
  } else if (v.chi_series.back() > 1.5 * chi0 && rising_tail(v.chi_series, tail_fraction)) {
    v.outcome = VerdictKind::Growth;
  } else {
    v.outcome = VerdictKind::BoundedOscillation;
  }
  v.evolution = std::move(ev);
  return v;
}

/// Evolves r * phi_{c, omega} and classifies the result.
inline PerturbationVerdict perturbation_run(const GridPtr& grid, const ModelParams& p, const WaveParams& w, double r,
                                            const StepConfig& cfg, const SolveOptions& opts = {}) {
  const auto rec = w.c == 0.0 ? solve_standing_wave(grid, p, w.omega, opts) : solve_boosted(grid, p, w, opts);
  ComplexField u0 = rec.profile;
  u0 *= cplx(r);
  return verdict_from(evolve(u0, p, cfg), r);
}

}  // namespace fnls
