// fnls: Petviashvili iteration for standing and boosted standing waves.
//
// The stationary equation
//     omega phi - i c phi' - lambda phi'' = zeta D^beta(|phi|^{2 sigma} phi)
// reads (omega + c k + lambda k^2) phi_k = zeta |k|^beta N(phi)_k in Fourier
// space. Plain fixed-point iteration of this relation either collapses to
// zero or diverges; the stabilizing factor M_n^nu fixes the amplitude.
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fnls/error.hpp"
#include "fnls/field.hpp"
#include "fnls/model.hpp"
#include "fnls/spectral.hpp"

namespace fnls {

enum class GuessPreset { Gaussian, Sech, ExactBeta0 };

inline const char* to_string(GuessPreset g) {
  switch (g) {
    case GuessPreset::Gaussian: return "gaussian";
    case GuessPreset::Sech: return "sech";
    case GuessPreset::ExactBeta0: return "exact-beta0";
  }
  return "?";
}

struct SolveOptions {
  double tol = 1e-12;
  int max_iter = 1000;
  /// Stabilization exponent; defaults to (2 sigma + 2)/(2 sigma + 1).
  std::optional<double> nu;
  std::variant<GuessPreset, ComplexField> initial_guess = GuessPreset::Gaussian;
  /// Skip the existence-window guard (exploration only).
  bool force = false;
  /// Error(n) above this aborts with Diverged.
  double divergence_cap = 1e6;
  /// Move the |phi| peak to the grid point nearest 0 and make it real positive.
  bool recenter = true;

  void validate() const {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
    if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");
    if (nu && !std::isfinite(*nu)) throw Error(ErrorCode::InvalidArgument, "nu must be finite");
  }
};

inline double default_nu(double sigma) { return (2.0 * sigma + 2.0) / (2.0 * sigma + 1.0); }

/// Per-iteration monitors: Error(n) = ||Q_{n+1} - Q_n||_inf, stab(n) = |1 - M_n|,
/// res(n) = ||S Q_n||_inf over Fourier modes.
struct ConvergenceTrace {
  std::vector<double> error;
  std::vector<double> stab;
  std::vector<double> res;
  bool converged = false;
  int iterations = 0;
};

struct ProfileRecord {
  ComplexField profile;
  ModelParams params;
  WaveParams wave;
  ConvergenceTrace trace;
  PohozaevResiduals pohozaev;
  /// Converged but an identity residual exceeds 1e-4.
  bool suspect = false;
};

/// Solver failure that keeps the convergence history.
class SolveError : public Error {
 public:
  SolveError(ErrorCode code, const std::string& message, ConvergenceTrace trace)
      : Error(code, message), trace_(std::move(trace)) {}
  const ConvergenceTrace& trace() const noexcept { return trace_; }

 private:
  ConvergenceTrace trace_;
};

/// omega^{1/(2 sigma)} (sigma+1)^{1/(2 sigma)} sech^{1/sigma}(sigma sqrt(omega) x):
/// the local (beta = 0, lambda = 1) standing wave.
inline ComplexField exact_profile_beta0(double sigma, double omega, GridPtr g) {
  if (!(sigma > 0.0) || !(omega > 0.0)) throw Error(ErrorCode::InvalidArgument, "need sigma > 0 and omega > 0");
  const double amp = std::pow(omega * (sigma + 1.0), 1.0 / (2.0 * sigma));
  const double width = sigma * std::sqrt(omega);
  return ComplexField::sample(std::move(g), [&](double x) {
    return amp * std::pow(1.0 / std::cosh(width * x), 1.0 / sigma);
  });
}

namespace detail {

/// Fourier symbols and scratch buffers shared by iterate_step, the solvers
/// and the residual.
class PetviashviliKernel {
 public:
  PetviashviliKernel(GridPtr grid, const ModelParams& p, const WaveParams& w)
      : grid_(std::move(grid)), p_(p), w_(w), nonlocal_(fractional_multiplier(*grid_, p.beta)) {
    const auto& k = grid_->k();
    symbol_.resize(k.size());
    for (std::size_t m = 0; m < k.size(); ++m) {
      symbol_[m] = w.omega + w.c * k[m] + p.lambda * k[m] * k[m];
      if (!(symbol_[m] > 0.0)) {
        throw Error(ErrorCode::IndefiniteSymbol,
                    "omega + c k + lambda k^2 = " + std::to_string(symbol_[m]) + " at k = " + std::to_string(k[m]));
      }
    }
    nonlin_.resize(k.size());
  }

  struct Step {
    double M = 0;
    double res = 0;
  };

  /// Given Q (physical) and Qhat (its coefficients), writes the next iterate's
  /// coefficients into next_hat.
  Step advance(const std::vector<cplx>& Q, const std::vector<cplx>& Qhat, std::vector<cplx>& next_hat, double nu) {
    const std::size_t n = Q.size();
    for (std::size_t j = 0; j < n; ++j) nonlin_[j] = abs_pow_2sigma(Q[j], p_.sigma) * Q[j];
    grid_->forward_inplace(nonlin_);

    double num = 0.0;
    double den = 0.0;
    double res = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const cplx rhs = p_.zeta * nonlocal_[m] * nonlin_[m];
      num += symbol_[m] * std::norm(Qhat[m]);
      den += (rhs * std::conj(Qhat[m])).real();
      res = std::max(res, std::abs(symbol_[m] * Qhat[m] - rhs));
    }
    if (!(std::abs(den) >= 1e-300)) {
      throw Error(ErrorCode::ZeroDenominator, "stabilizing factor denominator vanishes");
    }
    const double M = num / den;
    if (!(M > 0.0) || !std::isfinite(M)) {
      throw Error(ErrorCode::Diverged, "stabilizing factor M_n = " + std::to_string(M) + " is not positive");
    }
    const double factor = std::pow(M, nu);
    next_hat.resize(n);
    for (std::size_t m = 0; m < n; ++m) next_hat[m] = factor * p_.zeta * nonlocal_[m] * nonlin_[m] / symbol_[m];
    return {M, res};
  }

  double residual(const std::vector<cplx>& Q) {
    std::vector<cplx> Qhat = Q;
    grid_->forward_inplace(Qhat);
    for (std::size_t j = 0; j < Q.size(); ++j) nonlin_[j] = abs_pow_2sigma(Q[j], p_.sigma) * Q[j];
    grid_->forward_inplace(nonlin_);
    double res = 0.0;
    for (std::size_t m = 0; m < Q.size(); ++m) {
      res = std::max(res, std::abs(symbol_[m] * Qhat[m] - p_.zeta * nonlocal_[m] * nonlin_[m]));
    }
    return res;
  }

  const GridPtr& grid() const { return grid_; }

 private:
  GridPtr grid_;
  ModelParams p_;
  WaveParams w_;
  std::vector<double> nonlocal_;
  std::vector<double> symbol_;
  std::vector<cplx> nonlin_;
};

inline ComplexField initial_guess(const SolveOptions& opts, const GridPtr& grid, const ModelParams& p,
                                  const WaveParams& w) {
  if (const auto* field = std::get_if<ComplexField>(&opts.initial_guess)) {
    if (!ComplexField::same_grid(field->grid(), *grid)) {
      throw Error(ErrorCode::MismatchedGrids, "initial guess lives on a different grid");
    }
    return *field;
  }
  switch (std::get<GuessPreset>(opts.initial_guess)) {
    case GuessPreset::Gaussian:
      return ComplexField::sample(grid, [](double x) { return std::exp(-x * x); });
    case GuessPreset::Sech:
      return ComplexField::sample(grid, [](double x) { return 1.0 / std::cosh(x); });
    case GuessPreset::ExactBeta0: {
      // Galilei-boosted local profile; reduces to the plain profile for c = 0.
      const double shifted = w.omega - w.c * w.c / (4.0 * p.lambda);
      auto out = exact_profile_beta0(p.sigma, shifted, grid);
      const double wavenumber = -w.c / (2.0 * p.lambda);
      const auto& x = grid->x();
      for (std::size_t j = 0; j < out.size(); ++j) out[j] *= std::polar(1.0, wavenumber * x[j]);
      return out;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown initial guess");
}

/// Moves the |Q| maximum to the grid point nearest the origin (an exact
/// circular shift) and rotates the phase so the peak value is real positive.
inline ComplexField recenter(const ComplexField& Q) {
  std::size_t peak = 0;
  for (std::size_t j = 1; j < Q.size(); ++j) {
    if (std::abs(Q[j]) > std::abs(Q[peak])) peak = j;
  }
  const auto target = Q.grid().index_nearest_origin();
  auto out = circular_shift(Q, static_cast<long>(target) - static_cast<long>(peak));
  const cplx v = out[target];
  if (std::abs(v) > 0.0) out *= std::conj(v) / std::abs(v);
  return out;
}

inline ProfileRecord run_petviashvili(const GridPtr& grid, const ModelParams& p, const WaveParams& w,
                                      const SolveOptions& opts) {
  opts.validate();
  PetviashviliKernel kernel(grid, p, w);
  const double nu = opts.nu.value_or(default_nu(p.sigma));

  auto Q = initial_guess(opts, grid, p, w);
  if (!Q.finite()) throw Error(ErrorCode::NonFiniteInput, "initial guess is not finite");
  std::vector<cplx> Qhat = Q.values();
  grid->forward_inplace(Qhat);
  std::vector<cplx> next_hat;
  std::vector<cplx> next(Q.size());

  ConvergenceTrace trace;
  for (int it = 0; it < opts.max_iter; ++it) {
    const auto step = kernel.advance(Q.values(), Qhat, next_hat, nu);
    next = next_hat;
    grid->inverse_inplace(next);
    double err = 0.0;
    for (std::size_t j = 0; j < next.size(); ++j) err = std::max(err, std::abs(next[j] - Q[j]));

    trace.error.push_back(err);
    trace.stab.push_back(std::abs(1.0 - step.M));
    trace.res.push_back(step.res);
    trace.iterations = it + 1;

    if (!std::isfinite(err) || err > opts.divergence_cap) {
      throw SolveError(ErrorCode::Diverged, "Error(n) = " + std::to_string(err) + " exceeds the divergence cap",
                       std::move(trace));
    }
    Q.values().swap(next);
    Qhat.swap(next_hat);
    if (err <= opts.tol) {
      trace.converged = true;
      break;
    }
  }
  if (!trace.converged) {
    const auto msg = "no convergence in " + std::to_string(opts.max_iter) + " iterations (last Error = " +
                     std::to_string(trace.error.back()) + ")";
    throw SolveError(ErrorCode::NotConverged, msg, std::move(trace));
  }

  ProfileRecord record;
  record.profile = opts.recenter ? recenter(Q) : Q;
  record.params = p;
  record.wave = w;
  record.trace = std::move(trace);
  record.pohozaev = pohozaev_residuals(record.profile, p, w);
  const double worst = w.c == 0.0 ? std::max({record.pohozaev.r0, record.pohozaev.r1, record.pohozaev.rB})
                                  : record.pohozaev.rB;
  record.suspect = worst > 1e-4;
  return record;
}

}  // namespace detail

struct IterateResult {
  ComplexField next;
  double M = 0;
};

/// One stabilized iteration: Q_{n+1}^ = zeta M_n^nu |k|^beta N(Q_n)^ / d(k) with
/// d(k) = omega + c k + lambda k^2 and
/// M_n = sum d |Q_n^|^2 / Re(zeta sum |k|^beta N(Q_n)^ conj(Q_n^)).
inline IterateResult iterate_step(const ComplexField& Qn, const ModelParams& p, const WaveParams& w, double nu) {
  if (!Qn.finite()) throw Error(ErrorCode::NonFiniteInput, "iterate_step of a non-finite field");
  detail::PetviashviliKernel kernel(Qn.grid_ptr(), p, w);
  std::vector<cplx> Qhat = Qn.values();
  Qn.grid().forward_inplace(Qhat);
  std::vector<cplx> next_hat;
  const auto step = kernel.advance(Qn.values(), Qhat, next_hat, nu);
  IterateResult out{ComplexField(Qn.grid_ptr(), std::move(next_hat)), step.M};
  Qn.grid().inverse_inplace(out.next.values());
  return out;
}

/// ||(omega + c k + lambda k^2) Q^ - zeta |k|^beta N(Q)^||_inf over modes.
inline double residual_RES(const ComplexField& Q, const ModelParams& p, const WaveParams& w) {
  if (!Q.finite()) throw Error(ErrorCode::NonFiniteInput, "residual of a non-finite field");
  detail::PetviashviliKernel kernel(Q.grid_ptr(), p, w);
  return kernel.residual(Q.values());
}

/// Standing wave e^{-i omega t} phi(x), c = 0. The solve is carried out at the
/// requested omega directly.
inline ProfileRecord solve_standing_wave(const GridPtr& grid, const ModelParams& p, double omega,
                                         const SolveOptions& opts = {}) {
  p.validate();
  if (!(omega > 0.0)) throw Error(ErrorCode::InvalidArgument, "omega must be positive");
  if (!(p.lambda > 0.0)) throw Error(ErrorCode::IndefiniteSymbol, "standing waves need lambda > 0");
  if (!opts.force) {
    if (auto reason = nonexistence_reason(p)) throw Error(ErrorCode::NonexistenceRegime, *reason);
    if (auto reason = ground_state_window_violation(p)) throw Error(ErrorCode::NonexistenceRegime, *reason);
  }
  return detail::run_petviashvili(grid, p, WaveParams{omega, 0.0}, opts);
}

/// Boosted standing wave e^{-i omega t} phi(x - c t); needs c^2 < 4 lambda omega.
inline ProfileRecord solve_boosted(const GridPtr& grid, const ModelParams& p, const WaveParams& w,
                                   const SolveOptions& opts = {}) {
  p.validate();
  if (!(p.lambda > 0.0)) throw Error(ErrorCode::IndefiniteSymbol, "boosted waves need lambda > 0");
  if (!(w.c * w.c < 4.0 * p.lambda * w.omega)) {
    throw Error(ErrorCode::SpeedTooLarge, "c^2 = " + std::to_string(w.c * w.c) + " must be below 4 lambda omega = " +
                                              std::to_string(4.0 * p.lambda * w.omega));
  }
  if (!opts.force) {
    if (auto reason = nonexistence_reason(p)) throw Error(ErrorCode::NonexistenceRegime, *reason);
    if (auto reason = ground_state_window_violation(p)) throw Error(ErrorCode::NonexistenceRegime, *reason);
  }
  return detail::run_petviashvili(grid, p, w, opts);
}

/// Continuation in beta: solves at beta = 0 from the exact profile, then walks
/// to p.beta in steps of at most `beta_step`, warm-starting each solve from the
/// previous profile. Useful for beta >= 1 where a cold start converges slowly.
inline ProfileRecord solve_standing_wave_continuation(const GridPtr& grid, const ModelParams& p, double omega,
                                                      SolveOptions opts = {}, double beta_step = 0.1) {
  if (!(beta_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta_step must be positive");
  ModelParams stage = p;
  stage.beta = 0.0;
  opts.initial_guess = GuessPreset::ExactBeta0;
  auto record = solve_standing_wave(grid, stage, omega, opts);
  const int steps = static_cast<int>(std::ceil(std::abs(p.beta) / beta_step));
  for (int s = 1; s <= steps; ++s) {
    stage.beta = p.beta * static_cast<double>(s) / static_cast<double>(steps);
    opts.initial_guess = record.profile;
    record = solve_standing_wave(grid, stage, omega, opts);
  }
  return record;
}

}  // namespace fnls
