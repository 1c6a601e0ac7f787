// fnls: split-step Fourier evolution with invariant monitoring.
//
// The linear flow i u_t = lambda u_xx is solved exactly in Fourier space
// (u^ -> exp(i lambda k^2 tau) u^); the nonlinear flow
// u^_t = -i zeta |k|^beta N(u)^ is advanced with one classical RK4 step.
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fnls/error.hpp"
#include "fnls/field.hpp"
#include "fnls/model.hpp"
#include "fnls/spectral.hpp"

namespace fnls {

enum class Scheme { Strang2, Yoshida4 };

inline const char* to_string(Scheme s) { return s == Scheme::Strang2 ? "strang2" : "yoshida4"; }

/// Triple-jump weight (2 + 2^{1/3} + 2^{-1/3})/3.
inline double yoshida_weight() { return (2.0 + std::cbrt(2.0) + 1.0 / std::cbrt(2.0)) / 3.0; }

struct StepConfig {
  double T = 1.0;
  int M = 100;
  Scheme scheme = Scheme::Yoshida4;
  /// Steps between monitor ticks; 0 means max(1, M/100).
  int monitor_every = 0;
  double blowup_linf_cap = 1e6;
  double mass_drift_cap = 1e-4;
  /// Apply the 2/3-rule mask to the nonlinear term.
  bool dealias = false;
  bool store_snapshots = true;
  /// Width of the boundary band watched at each tick, as a fraction of the
  /// domain on each side; 0 disables the guard.
  double boundary_fraction = 0.0;
  /// The guard trips when the band holds more than this fraction of sum |u|^2.
  double boundary_tol = 1e-4;

  double tau() const { return T / static_cast<double>(M); }
  int cadence() const { return monitor_every > 0 ? monitor_every : std::max(1, M / 100); }

  void validate() const {
    if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorCode::InvalidArgument, "T must be positive");
    if (M < 1) throw Error(ErrorCode::InvalidArgument, "M must be >= 1");
    if (monitor_every < 0) throw Error(ErrorCode::InvalidArgument, "monitor_every must be >= 0");
    if (!(blowup_linf_cap > 0.0)) throw Error(ErrorCode::InvalidArgument, "blowup_linf_cap must be positive");
    if (!(mass_drift_cap > 0.0)) throw Error(ErrorCode::InvalidArgument, "mass_drift_cap must be positive");
    if (!(boundary_fraction >= 0.0 && boundary_fraction < 0.5)) {
      throw Error(ErrorCode::InvalidArgument, "boundary_fraction must lie in [0, 0.5)");
    }
  }
};

enum class OutcomeKind { Completed, BlowUpDetected, MassDriftExceeded, BoundaryReached };

inline const char* to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Completed: return "completed";
    case OutcomeKind::BlowUpDetected: return "blow-up-detected";
    case OutcomeKind::MassDriftExceeded: return "mass-drift-exceeded";
    case OutcomeKind::BoundaryReached: return "boundary-reached";
  }
  return "?";
}

struct Outcome {
  OutcomeKind kind = OutcomeKind::Completed;
  double t = 0;  ///< time the run stopped (T when completed)
};

struct Snapshot {
  double t = 0;
  ComplexField u;
};

struct RunDiagnostics {
  std::vector<InvariantSnapshot> rows;  ///< one per monitor tick, t = 0 first
  std::vector<double> step_t;           ///< every step, t = 0 first
  std::vector<double> step_linf;
  std::vector<std::string> warnings;
};

struct EvolutionResult {
  ComplexField final;
  std::vector<Snapshot> snapshots;
  RunDiagnostics diagnostics;
  Outcome outcome;
};

namespace detail {

/// Split-step integrator for fixed coefficients. Keeps the field in physical
/// space and caches the linear propagators for each sub-step length.
class SplitStepper {
 public:
  SplitStepper(GridPtr grid, const ModelParams& p_eff, double lambda_eff, bool dealias)
      : grid_(std::move(grid)), p_(p_eff), lambda_(lambda_eff) {
    symbol_ = fractional_multiplier(*grid_, p_.beta);
    if (dealias) {
      const auto mask = dealias_mask(*grid_);
      for (std::size_t m = 0; m < symbol_.size(); ++m) symbol_[m] *= mask[m];
    }
    // D^0 without a mask is the identity: the nonlinear flow is then pointwise
    // and needs no transforms.
    local_ = p_.beta == 0.0 && !dealias;
    const std::size_t n = grid_->size();
    k1_.resize(n);
    k2_.resize(n);
    k3_.resize(n);
    k4_.resize(n);
    stage_.resize(n);
  }

  void linear(std::vector<cplx>& u, double tau) {
    if (tau == 0.0) return;
    const auto& table = propagator(tau);
    grid_->forward_inplace(u);
    for (std::size_t m = 0; m < u.size(); ++m) u[m] *= table[m];
    grid_->inverse_inplace(u);
  }

  void nonlinear(std::vector<cplx>& u, double tau) {
    if (tau == 0.0) return;
    const std::size_t n = u.size();
    rhs(u, k1_);
    for (std::size_t j = 0; j < n; ++j) stage_[j] = u[j] + 0.5 * tau * k1_[j];
    rhs(stage_, k2_);
    for (std::size_t j = 0; j < n; ++j) stage_[j] = u[j] + 0.5 * tau * k2_[j];
    rhs(stage_, k3_);
    for (std::size_t j = 0; j < n; ++j) stage_[j] = u[j] + tau * k3_[j];
    rhs(stage_, k4_);
    for (std::size_t j = 0; j < n; ++j) u[j] += tau / 6.0 * (k1_[j] + 2.0 * k2_[j] + 2.0 * k3_[j] + k4_[j]);
  }

  void strang(std::vector<cplx>& u, double tau) {
    nonlinear(u, 0.5 * tau);
    linear(u, tau);
    nonlinear(u, 0.5 * tau);
  }

  void step(std::vector<cplx>& u, double tau, Scheme scheme) {
    if (scheme == Scheme::Strang2) {
      strang(u, tau);
      return;
    }
    const double w = yoshida_weight();
    strang(u, w * tau);
    strang(u, (1.0 - 2.0 * w) * tau);
    strang(u, w * tau);
  }

  /// max_k multiplier * max|u|^{2 sigma} * |zeta| * tau: stiffness proxy of the RK4 substep.
  double stiffness(const std::vector<cplx>& u, double tau) const {
    double smax = 0.0;
    for (double s : symbol_) smax = std::max(smax, s);
    double w = 0.0;
    for (const auto& v : u) w = std::max(w, abs_pow_2sigma(v, p_.sigma));
    return tau * smax * w * std::abs(p_.zeta);
  }

 private:
  // f(u) = -i zeta D^beta(|u|^{2 sigma} u)
  void rhs(const std::vector<cplx>& u, std::vector<cplx>& out) {
    const cplx coeff(0.0, -p_.zeta);
    for (std::size_t j = 0; j < u.size(); ++j) out[j] = abs_pow_2sigma(u[j], p_.sigma) * u[j];
    if (!local_) {
      grid_->forward_inplace(out);
      for (std::size_t m = 0; m < out.size(); ++m) out[m] *= symbol_[m];
      grid_->inverse_inplace(out);
    }
    for (auto& v : out) v *= coeff;
  }

  const std::vector<cplx>& propagator(double tau) {
    for (const auto& [t, table] : cache_) {
      if (t == tau) return table;
    }
    const auto& k = grid_->k();
    std::vector<cplx> table(k.size());
    for (std::size_t m = 0; m < k.size(); ++m) table[m] = std::polar(1.0, lambda_ * k[m] * k[m] * tau);
    cache_.emplace_back(tau, std::move(table));
    return cache_.back().second;
  }

  GridPtr grid_;
  ModelParams p_;
  double lambda_;
  std::vector<double> symbol_;
  bool local_ = false;
  std::vector<std::pair<double, std::vector<cplx>>> cache_;
  std::vector<cplx> k1_, k2_, k3_, k4_, stage_;
};

}  // namespace detail

/// Multiplies the coefficients by exp(i lambda_eff k^2 tau).
inline ComplexField linear_substep(const ComplexField& u, double tau, double lambda_eff) {
  if (!u.finite()) throw Error(ErrorCode::NonFiniteInput, "linear_substep of a non-finite field");
  ModelParams p;
  detail::SplitStepper s(u.grid_ptr(), p, lambda_eff, false);
  ComplexField out = u;
  s.linear(out.values(), tau);
  return out;
}

/// One RK4 step of u_t = -i zeta D^beta(|u|^{2 sigma} u).
inline ComplexField nonlinear_substep(const ComplexField& u, double tau, const ModelParams& p_eff,
                                      bool dealias = false) {
  if (!u.finite()) throw Error(ErrorCode::NonFiniteInput, "nonlinear_substep of a non-finite field");
  detail::SplitStepper s(u.grid_ptr(), p_eff, p_eff.lambda, dealias);
  ComplexField out = u;
  s.nonlinear(out.values(), tau);
  if (!out.finite()) throw Error(ErrorCode::NonFiniteOutput, "nonlinear substep produced non-finite values");
  return out;
}

/// One full step: Strang N(tau/2) L(tau) N(tau/2), or the Yoshida triple jump of it.
inline ComplexField step(const ComplexField& u, double tau, const ModelParams& p_eff, double lambda_eff,
                         Scheme scheme, bool dealias = false) {
  if (!u.finite()) throw Error(ErrorCode::NonFiniteInput, "step of a non-finite field");
  detail::SplitStepper s(u.grid_ptr(), p_eff, lambda_eff, dealias);
  ComplexField out = u;
  s.step(out.values(), tau, scheme);
  if (!out.finite()) throw Error(ErrorCode::NonFiniteOutput, "step produced non-finite values");
  return out;
}

namespace detail {

inline double boundary_band_fraction(const ComplexField& u, double fraction) {
  const auto& g = u.grid();
  const double width = fraction * g.length();
  const auto& x = g.x();
  double band = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double e = std::norm(u[j]);
    total += e;
    if (x[j] < g.a() + width || x[j] > g.b() - width) band += e;
  }
  return total > 0.0 ? band / total : 0.0;
}

}  // namespace detail

/// Evolves i u_t - lambda_eff u_xx = zeta_scale zeta D^beta(|u|^{2 sigma} u)
/// from u0 over [0, T] in M steps. Failures are reported through the outcome.
inline EvolutionResult evolve(const ComplexField& u0, const ModelParams& p, const StepConfig& cfg,
                              std::optional<double> lambda_eff = std::nullopt, double zeta_scale = 1.0) {
  cfg.validate();
  if (!u0.finite()) throw Error(ErrorCode::NonFiniteInput, "initial data is not finite");
  ModelParams p_eff = p;
  p_eff.lambda = lambda_eff.value_or(p.lambda);
  p_eff.zeta = p.zeta * zeta_scale;

  detail::SplitStepper stepper(u0.grid_ptr(), p_eff, p_eff.lambda, cfg.dealias);
  const double tau = cfg.tau();
  const int cadence = cfg.cadence();

  EvolutionResult result;
  result.final = u0;
  auto& u = result.final;
  auto& diag = result.diagnostics;

  const auto f0 = compute_functionals(u0, p_eff);
  const double linf0 = f0.linf;
  bool warned_cfl = false;

  auto record = [&](double t, const Functionals& fn) {
    InvariantSnapshot row{t, fn.F, fn.E, fn.P, fn.chi, fn.linf, 0.0};
    row.deltaF = f0.F > 0.0 ? std::abs((fn.F - f0.F) / f0.F) : std::abs(fn.F);
    diag.rows.push_back(row);
    if (cfg.store_snapshots) result.snapshots.push_back({t, u});
    if (!warned_cfl && stepper.stiffness(u.values(), tau) > 1.0) {
      warned_cfl = true;
      diag.warnings.push_back("t = " + std::to_string(t) +
                              ": tau * max|k|^beta * max|u|^{2 sigma} exceeds 1; the RK4 substep may be unstable");
    }
    return row;
  };

  record(0.0, f0);
  diag.step_t.push_back(0.0);
  diag.step_linf.push_back(linf0);

  for (int n = 1; n <= cfg.M; ++n) {
    stepper.step(u.values(), tau, cfg.scheme);
    const double t = n == cfg.M ? cfg.T : static_cast<double>(n) * tau;
    const double l = u.finite() ? max_abs(u.values()) : INFINITY;
    diag.step_t.push_back(t);
    diag.step_linf.push_back(l);
    if (!std::isfinite(l) || l > cfg.blowup_linf_cap) {
      result.outcome = {OutcomeKind::BlowUpDetected, t};
      return result;
    }
    if (n % cadence == 0 || n == cfg.M) {
      const auto row = record(t, compute_functionals(u, p_eff));
      if (row.deltaF > cfg.mass_drift_cap) {
        result.outcome = {OutcomeKind::MassDriftExceeded, t};
        return result;
      }
      if (cfg.boundary_fraction > 0.0 &&
          detail::boundary_band_fraction(u, cfg.boundary_fraction) > cfg.boundary_tol) {
        result.outcome = {OutcomeKind::BoundaryReached, t};
        return result;
      }
    }
  }
  result.outcome = {OutcomeKind::Completed, cfg.T};
  return result;
}

}  // namespace fnls
