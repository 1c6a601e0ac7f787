// fnls: model coefficients, conserved functionals and the identities and
// thresholds derived from them.
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fnls/error.hpp"
#include "fnls/field.hpp"
#include "fnls/spectral.hpp"

namespace fnls {

/// Coefficients of i u_t - lambda u_xx = zeta D^beta(|u|^{2 sigma} u).
struct ModelParams {
  double lambda = 1.0;
  double zeta = 1.0;
  double beta = 0.0;
  double sigma = 1.0;

  void validate() const {
    if (!(lambda != 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::InvalidArgument, "lambda must be nonzero");
    if (zeta != 1.0 && zeta != -1.0) throw Error(ErrorCode::InvalidArgument, "zeta must be +1 or -1");
    if (!(beta > -1.0 && beta < 2.0)) throw Error(ErrorCode::InvalidArgument, "beta must lie in (-1, 2)");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  }
};

/// Frequency and speed of a (boosted) standing wave e^{-i omega t} phi(x - c t).
struct WaveParams {
  double omega = 1.0;
  double c = 0.0;
};

/// (2 - beta)/(1 + beta): the nonlinearity power separating global
/// boundedness/stability from blow-up/instability.
inline double critical_sigma(double beta) {
  if (!(beta > -1.0)) throw Error(ErrorCode::InvalidArgument, "critical_sigma needs beta > -1");
  return (2.0 - beta) / (1.0 + beta);
}

/// Sobolev index s_c = (sigma - 2 + beta)/(2 sigma) left invariant by the scaling symmetry.
inline double critical_sobolev_index(double beta, double sigma) { return (sigma - 2.0 + beta) / (2.0 * sigma); }

/// theta_0 = ((sigma+1)(1-beta)+1)/(2(sigma+1)); theta_1 = 1 - theta_0.
inline double theta0(double beta, double sigma) {
  return ((sigma + 1.0) * (1.0 - beta) + 1.0) / (2.0 * (sigma + 1.0));
}

/// Reason a focusing standing wave cannot exist, or nullopt when the
/// parameters are outside the nonexistence ranges.
inline std::optional<std::string> nonexistence_reason(const ModelParams& p) {
  if (p.zeta < 0) return "no nontrivial standing wave exists in the defocusing case (zeta = -1)";
  if (p.beta >= 1.0 + 1.0 / (p.sigma + 1.0)) {
    return "no nontrivial standing wave exists for beta >= 1 + 1/(sigma+1) = " +
           std::to_string(1.0 + 1.0 / (p.sigma + 1.0));
  }
  if (p.beta <= -p.sigma / (p.sigma + 1.0)) {
    return "no nontrivial standing wave exists for beta <= -sigma/(sigma+1) = " +
           std::to_string(-p.sigma / (p.sigma + 1.0));
  }
  return std::nullopt;
}

/// Reason (beta, sigma) is outside the window max{0, -beta/(1+beta)} < sigma <
/// (2-beta)/(beta-1) (upper bound only for beta > 1) where ground states exist.
inline std::optional<std::string> ground_state_window_violation(const ModelParams& p) {
  if (!(p.beta > -1.0 && p.beta < 2.0)) return "beta must lie in (-1, 2)";
  const double lower = std::max(0.0, -p.beta / (1.0 + p.beta));
  if (!(p.sigma > lower)) return "sigma must exceed max{0, -beta/(1+beta)} = " + std::to_string(lower);
  if (p.beta > 1.0) {
    const double upper = (2.0 - p.beta) / (p.beta - 1.0);
    if (!(p.sigma < upper)) return "sigma must be below (2-beta)/(beta-1) = " + std::to_string(upper);
  }
  return std::nullopt;
}

/// |z|^{2 sigma}, with the common integer powers done by multiplication.
inline double abs_pow_2sigma(cplx z, double sigma) {
  const double n = std::norm(z);
  if (sigma == 1.0) return n;
  if (sigma == 2.0) return n * n;
  return n == 0.0 ? 0.0 : std::pow(n, sigma);
}

/// |u|^{2 sigma} u, pointwise.
inline ComplexField power_nonlinearity(const ComplexField& u, double sigma) {
  ComplexField out(u.grid_ptr());
  for (std::size_t j = 0; j < u.size(); ++j) out[j] = abs_pow_2sigma(u[j], sigma) * u[j];
  return out;
}

/// zeta D^beta(|u|^{2 sigma} u).
inline ComplexField nonlinear_term(const ComplexField& u, const ModelParams& p) {
  if (!u.finite()) throw Error(ErrorCode::NonFiniteInput, "nonlinear_term of a non-finite field");
  auto out = apply_D(power_nonlinearity(u, p.sigma), p.beta);
  out *= cplx(p.zeta);
  return out;
}

/// All quadratic and nonlinear functionals of a field, from a single transform.
struct Functionals {
  double F = 0;      ///< mass: int |D^{-beta/2} u|^2
  double G = 0;      ///< ||D^{1-beta/2} u||^2
  double P = 0;      ///< momentum: Im int D^{-beta/2} u_x conj(D^{-beta/2} u)
  double R = 0;      ///< ||u||^{2 sigma + 2} in L^{2 sigma + 2}
  double E = 0;      ///< energy: (lambda G - zeta R/(sigma+1))/2
  double chi = 0;    ///< sqrt(F + G)
  double linf = 0;   ///< max |u_j|
};

inline Functionals compute_functionals(const ComplexField& u, const ModelParams& p) {
  if (!u.finite()) throw Error(ErrorCode::NonFiniteInput, "functionals of a non-finite field");
  const auto& g = u.grid();
  const auto U = forward(u);
  const auto mass_symbol = fractional_multiplier(g, -p.beta);
  const auto grad_symbol = fractional_multiplier(g, 2.0 - p.beta);
  const auto& k = g.k();
  const auto nyquist = g.size() / 2;
  Functionals out;
  for (std::size_t m = 0; m < U.size(); ++m) {
    const double a2 = std::norm(U[m]);
    out.F += mass_symbol[m] * a2;
    out.G += grad_symbol[m] * a2;
    if (m != nyquist && k[m] != 0.0) out.P += k[m] * mass_symbol[m] * a2;
  }
  const double L = g.length();
  out.F *= L;
  out.G *= L;
  out.P *= L;
  out.R = lp_norm_pow(u, 2.0 * p.sigma + 2.0);
  out.E = 0.5 * (p.lambda * out.G - p.zeta * out.R / (p.sigma + 1.0));
  out.chi = std::sqrt(out.F + out.G);
  out.linf = linf(u);
  return out;
}

inline double mass(const ComplexField& u, const ModelParams& p) { return compute_functionals(u, p).F; }
inline double energy(const ComplexField& u, const ModelParams& p) { return compute_functionals(u, p).E; }
inline double momentum(const ComplexField& u, const ModelParams& p) { return compute_functionals(u, p).P; }
inline double chi_norm(const ComplexField& u, const ModelParams& p) { return compute_functionals(u, p).chi; }

/// One row of the run diagnostics.
struct InvariantSnapshot {
  double t = 0;
  double F = 0;
  double E = 0;
  double P = 0;
  double chi = 0;
  double linf = 0;
  double deltaF = 0;
};

// ---------------------------------------------------------------------------
// Pohozaev identities
// ---------------------------------------------------------------------------

/// Relative residuals of the stationary identities. For c = 0,
///   r0: omega F = theta_0 R,   r1: lambda ||D^{1-beta/2} phi||^2 = theta_1 R.
/// rB is the pairing identity omega F + c P + lambda G = zeta R, valid for any c.
/// r0 and r1 are -1 (not applicable) when c != 0.
struct PohozaevResiduals {
  double r0 = -1;
  double r1 = -1;
  double rB = -1;
};

inline PohozaevResiduals pohozaev_residuals(const ComplexField& phi, const ModelParams& p, const WaveParams& w) {
  const auto fn = compute_functionals(phi, p);
  if (!(fn.R > 0.0)) throw Error(ErrorCode::ZeroProfile, "Pohozaev residuals of a zero profile");
  PohozaevResiduals out;
  out.rB = std::abs(w.omega * fn.F + w.c * fn.P + p.lambda * fn.G - p.zeta * fn.R) / fn.R;
  if (w.c == 0.0) {
    const double t0 = theta0(p.beta, p.sigma);
    out.r0 = std::abs(w.omega * fn.F - t0 * fn.R) / fn.R;
    out.r1 = std::abs(p.lambda * fn.G - (1.0 - t0) * fn.R) / fn.R;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gagliardo-Nirenberg type inequality
// ---------------------------------------------------------------------------

/// Both sides of ||u||_{L^{2q+2}} <= C F(u)^{theta_0/2} ||D^{1-beta/2}u||^{theta_1},
/// with theta_0, theta_1 evaluated at power q.
struct GnCheck {
  double lhs = 0;
  double rhs = 0;
  double constant = 0;          ///< C built from the extremal Q (used for rhs)
  double printed_constant = 0;  ///< C^{-1} = theta0^{theta0/2} theta1^{theta1/2} ||Q||^{2q+2}, for comparison
};

inline bool gn_exponent_admissible(double beta, double q) {
  if (!(beta > -1.0 && beta < 2.0) || !std::isfinite(q)) return false;
  if (q < std::max(0.0, -beta / (1.0 + beta))) return false;
  if (beta > 1.0 && q > 1.0 / (beta - 1.0) - 1.0) return false;
  return true;
}

/// Q must be the lambda = omega = 1 ground state for nonlinearity power q and
/// the same beta as p. At that extremal the inequality is an equality.
inline GnCheck gn_check(const ComplexField& u, const ComplexField& Q, const ModelParams& p, double q) {
  if (!gn_exponent_admissible(p.beta, q)) {
    throw Error(ErrorCode::InadmissibleExponent, "q = " + std::to_string(q) + " is outside the admissible range");
  }
  u.require_same_grid(Q);
  const double t0 = theta0(p.beta, q);
  const double t1 = 1.0 - t0;
  if (!(t0 > 0.0 && t1 > 0.0)) {
    throw Error(ErrorCode::InadmissibleExponent, "interpolation exponents degenerate at q = " + std::to_string(q));
  }
  const double power = 2.0 * q + 2.0;
  const double RQ = lp_norm_pow(Q, power);
  if (!(RQ > 0.0)) throw Error(ErrorCode::ZeroProfile, "gn_check needs a nonzero extremal");
  const double theta_factor = std::pow(t0, t0 / 2.0) * std::pow(t1, t1 / 2.0);

  GnCheck out;
  out.constant = 1.0 / (theta_factor * std::pow(RQ, q / power));
  out.printed_constant = 1.0 / (theta_factor * RQ);

  ModelParams pq = p;
  pq.sigma = q;
  const auto fn = compute_functionals(u, pq);
  out.lhs = std::pow(fn.R, 1.0 / power);
  out.rhs = out.constant * std::pow(fn.F, t0 / 2.0) * std::pow(fn.G, t1 / 2.0);
  return out;
}

// ---------------------------------------------------------------------------
// Global behaviour classification
// ---------------------------------------------------------------------------

enum class Regime { Subcritical, Critical, Supercritical };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical";
  }
  return "?";
}

inline Regime regime_of(double beta, double sigma) {
  const double sc = critical_sigma(beta);
  if (std::abs(sigma - sc) <= 1e-12 * std::max(1.0, sc)) return Regime::Critical;
  return sigma < sc ? Regime::Subcritical : Regime::Supercritical;
}

/// Left-hand side of the scaled-ground-state condition for u0 = r Q in the
/// supercritical case (boundedness is guaranteed when this is < 1 and r^{2 sigma} < 1):
///   (s/2 - r^{2 sigma}) * 2 r^{4 sigma/(s-2)} / (s-2),  s = beta(sigma+1) + sigma.
inline double scaled_ground_state_condition(double r, double beta, double sigma) {
  const double s = beta * (sigma + 1.0) + sigma;
  if (!(s > 2.0)) throw Error(ErrorCode::InvalidRegime, "condition only defined in the supercritical case");
  return (s / 2.0 - std::pow(r, 2.0 * sigma)) * 2.0 * std::pow(r, 4.0 * sigma / (s - 2.0)) / (s - 2.0);
}

/// E(rQ) in closed form from R = ||Q||^{2 sigma+2}:
///   r^2/(2(sigma+1)) * (s/2 - r^{2 sigma}) * R,  s = beta(sigma+1) + sigma.
/// Equivalent to (s/2 - r^{2 sigma}) 2 r^2/(s-2) E(Q) away from the critical case.
inline double scaled_ground_state_energy(double r, double beta, double sigma, double R) {
  const double s = beta * (sigma + 1.0) + sigma;
  return r * r / (2.0 * (sigma + 1.0)) * (s / 2.0 - std::pow(r, 2.0 * sigma)) * R;
}

struct Classification {
  Regime regime = Regime::Subcritical;
  bool bounded_guarantee = false;
  /// Formal blow-up criterion met; never a proof of blow-up.
  bool blowup_indicated = false;
  std::optional<double> scaled_energy;  ///< E(rQ) when u0 = rQ was declared
  double energy_u0 = 0;
  double mass_u0 = 0;
  double mass_Q = 0;
  std::string reason;
};

/// Uniform boundedness guarantee and formal blow-up indication for initial
/// data u0, relative to the ground state Q of the same (beta, sigma).
/// Pass declared_r when u0 = r Q, so E(u0) is taken from the closed form.
inline Classification classify_global(const ComplexField& u0, const ComplexField& Q, const ModelParams& p,
                                      std::optional<double> declared_r = std::nullopt) {
  u0.require_same_grid(Q);
  if (!(p.lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "classify_global needs lambda > 0");
  const double lower = std::max(0.0, -p.beta / (1.0 + p.beta));
  if (!(p.sigma > lower)) {
    throw Error(ErrorCode::InvalidRegime, "sigma must exceed max{0, -beta/(1+beta)} = " + std::to_string(lower));
  }
  const auto fu = compute_functionals(u0, p);
  const auto fq = compute_functionals(Q, p);

  Classification out;
  out.regime = regime_of(p.beta, p.sigma);
  out.mass_u0 = fu.F;
  out.mass_Q = fq.F;
  out.energy_u0 = fu.E;
  if (declared_r) {
    out.scaled_energy = scaled_ground_state_energy(*declared_r, p.beta, p.sigma, fq.R);
    out.energy_u0 = *out.scaled_energy;
  }

  if (p.zeta < 0) {
    out.bounded_guarantee = true;
    out.reason = "defocusing: energy controls the chi-norm";
    return out;
  }
  switch (out.regime) {
    case Regime::Subcritical:
      out.bounded_guarantee = true;
      out.reason = "sigma < (2-beta)/(1+beta): unconditional";
      return out;
    case Regime::Critical: {
      const double threshold = std::pow(p.lambda, (1.0 + p.beta) / (2.0 - p.beta)) * fq.F;
      out.bounded_guarantee = fu.F < threshold;
      out.reason = out.bounded_guarantee ? "mass below the ground-state threshold" : "mass at or above the threshold";
      return out;
    }
    case Regime::Supercritical: break;
  }

  const double p1 = p.beta * (p.sigma + 1.0) + p.sigma - 2.0;
  const double p2 = ((1.0 + p.sigma) * (1.0 - p.beta) + 1.0) / 2.0;
  const double grad_u = std::pow(fu.G, p1 / 2.0) * std::pow(fu.F, p2);
  const double grad_q = std::pow(fq.G, p1 / 2.0) * std::pow(fq.F, p2);
  const double eu = out.energy_u0;
  const double eq = fq.E;

  if (eu < 0.0) {
    out.bounded_guarantee = false;
    out.blowup_indicated = true;
    out.reason = "negative energy";
    return out;
  }
  const double energy_u = std::pow(eu, p1 / 2.0) * std::pow(fu.F, p2);
  const double energy_q = std::pow(eq, p1 / 2.0) * std::pow(fq.F, p2);
  const double lambda_e = std::pow(p.lambda, (p.beta * (1.0 + p.sigma) + p.sigma) / 2.0);

  out.bounded_guarantee = grad_u < p.lambda * grad_q && energy_u < lambda_e * energy_q;
  out.blowup_indicated = grad_u > p.lambda * grad_q && energy_u > lambda_e * energy_q;
  if (out.bounded_guarantee) {
    out.reason = "below both ground-state thresholds";
  } else if (out.blowup_indicated) {
    out.reason = "above both ground-state thresholds";
  } else {
    out.reason = "no analytical result";
  }
  return out;
}

}  // namespace fnls
