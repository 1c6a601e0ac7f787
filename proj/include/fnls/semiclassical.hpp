// fnls: small-epsilon (WKB) runs and first-break detection.
//
// With u(x, 0) = A(x) exp(i S(x)/eps) the scaled equation is
//     i u_t - lambda eps u_xx = zeta eps^{beta-1} D^beta(|u|^{2 sigma} u).
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fnls/error.hpp"
#include "fnls/field.hpp"
#include "fnls/model.hpp"
#include "fnls/timestepper.hpp"

namespace fnls {

enum class AmplitudeProfile { Sech, Gaussian, Zero };
enum class PhaseProfile { Zero, TwoSech };

inline const char* to_string(AmplitudeProfile a) {
  switch (a) {
    case AmplitudeProfile::Sech: return "sech";
    case AmplitudeProfile::Gaussian: return "gaussian";
    case AmplitudeProfile::Zero: return "zero";
  }
  return "?";
}
inline const char* to_string(PhaseProfile s) { return s == PhaseProfile::Zero ? "zero" : "2sech"; }

inline std::optional<AmplitudeProfile> parse_amplitude(const std::string& s) {
  if (s == "sech") return AmplitudeProfile::Sech;
  if (s == "gaussian") return AmplitudeProfile::Gaussian;
  if (s == "zero") return AmplitudeProfile::Zero;
  return std::nullopt;
}
inline std::optional<PhaseProfile> parse_phase(const std::string& s) {
  if (s == "zero") return PhaseProfile::Zero;
  if (s == "2sech") return PhaseProfile::TwoSech;
  return std::nullopt;
}

struct SemiclassicalConfig {
  double epsilon = 0.1;
  AmplitudeProfile amplitude = AmplitudeProfile::Sech;
  PhaseProfile phase = PhaseProfile::Zero;
  ModelParams p;
  StepConfig cfg;
  /// Stop the run once |u| in the outer 10% of the domain becomes noticeable.
  bool boundary_guard = true;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon <= 0.5)) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 0.5]");
    p.validate();
    cfg.validate();
  }
};

inline double amplitude_at(AmplitudeProfile a, double x) {
  switch (a) {
    case AmplitudeProfile::Sech: return 1.0 / std::cosh(x);
    case AmplitudeProfile::Gaussian: return std::exp(-x * x);
    case AmplitudeProfile::Zero: return 0.0;
  }
  return 0.0;
}

inline double phase_at(PhaseProfile s, double x) { return s == PhaseProfile::Zero ? 0.0 : 2.0 / std::cosh(x); }

/// u_j = A(x_j) exp(i S(x_j)/eps).
inline ComplexField build_initial(const SemiclassicalConfig& sc, const GridPtr& g) {
  if (!(sc.epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  const double edge = std::max(std::abs(amplitude_at(sc.amplitude, g->a())),
                               std::abs(amplitude_at(sc.amplitude, g->b() - g->h())));
  if (edge > 1e-8) {
    throw Error(ErrorCode::BoundaryNotDecayed,
                "amplitude is " + std::to_string(edge) + " at the boundary; widen the domain");
  }
  return ComplexField::sample(g, [&](double x) {
    return amplitude_at(sc.amplitude, x) * std::polar(1.0, phase_at(sc.phase, x) / sc.epsilon);
  });
}

/// Evolution with lambda_eff = lambda eps and zeta_scale = eps^{beta-1}; any eps > 0.
inline EvolutionResult evolve_scaled(const ComplexField& u0, const ModelParams& p, const StepConfig& cfg,
                                     double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  return evolve(u0, p, cfg, p.lambda * epsilon, std::pow(epsilon, p.beta - 1.0));
}

/// For beta >= 1 a field with nonzero mean has infinite mass on the line; the
/// truncated sum then exchanges weight with the frozen zero mode and is no
/// accuracy gauge.
inline bool mass_is_meaningful(const ComplexField& u, double beta) {
  if (beta < 1.0) return true;
  const auto U = forward(u);
  return std::abs(U[0]) <= 1e-12 * max_abs(U.coeffs());
}

inline EvolutionResult semiclassical_evolve(const SemiclassicalConfig& sc, const GridPtr& g) {
  sc.validate();
  StepConfig cfg = sc.cfg;
  if (sc.boundary_guard && cfg.boundary_fraction == 0.0) cfg.boundary_fraction = 0.1;
  const auto u0 = build_initial(sc, g);
  const bool gate = mass_is_meaningful(u0, sc.p.beta);
  if (!gate) cfg.mass_drift_cap = std::numeric_limits<double>::infinity();
  auto ev = evolve_scaled(u0, sc.p, cfg, sc.epsilon);
  if (!gate) {
    ev.diagnostics.warnings.insert(ev.diagnostics.warnings.begin(),
                                   "initial data has nonzero mean and beta >= 1: mass drift reported, not gated");
  }
  return ev;
}

struct BreakOptions {
  int window = 5;            ///< moving-average width
  double min_rise = 0.2;     ///< peak must exceed the initial value by this fraction
};

/// Earliest local maximum of the smoothed series that rises min_rise above the
/// first sample; nullopt when there is none.
inline std::optional<double> first_break_time(const std::vector<double>& t, const std::vector<double>& linf,
                                              const BreakOptions& opts = {}) {
  if (linf.size() < 5 || t.size() != linf.size()) {
    throw Error(ErrorCode::SeriesTooShort, "break detection needs at least 5 samples with matching times");
  }
  const auto n = static_cast<long>(linf.size());
  const long half = opts.window / 2;
  std::vector<double> s(linf.size());
  for (long i = 0; i < n; ++i) {
    const long lo = std::max(0L, i - half);
    const long hi = std::min(n - 1, i + half);
    double acc = 0.0;
    for (long j = lo; j <= hi; ++j) acc += linf[static_cast<std::size_t>(j)];
    s[static_cast<std::size_t>(i)] = acc / static_cast<double>(hi - lo + 1);
  }
  const double threshold = (1.0 + opts.min_rise) * linf.front();
  for (long i = 1; i + 1 < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (s[k] >= s[k - 1] && s[k] > s[k + 1] && s[k] >= threshold) return t[k];
  }
  return std::nullopt;
}

}  // namespace fnls
