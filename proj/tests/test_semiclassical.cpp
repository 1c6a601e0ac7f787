// WKB initial data, the scaled evolution and break-time detection.
#include <gtest/gtest.h>

#include "fnls/fnls.hpp"

using namespace fnls;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

std::vector<double> times(std::size_t n, double dt) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = dt * static_cast<double>(i);
  return t;
}

}  // namespace

TEST(BuildInitial, RealPhaseAndZero) {
  auto g = make_grid(-50.0, 50.0, 1024);
  SemiclassicalConfig sc;
  const auto real = build_initial(sc, g);
  for (std::size_t j = 0; j < real.size(); ++j) {
    EXPECT_EQ(real[j].imag(), 0.0);
    EXPECT_NEAR(real[j].real(), 1.0 / std::cosh(g->x()[j]), 1e-15);
  }
  sc.phase = PhaseProfile::TwoSech;
  const auto ph = build_initial(sc, g);
  for (std::size_t j = 0; j < ph.size(); ++j) {
    const double x = g->x()[j];
    EXPECT_NEAR(std::abs(ph[j] - std::polar(1.0 / std::cosh(x), 20.0 / std::cosh(x))), 0.0, 1e-14);
  }
  sc.amplitude = AmplitudeProfile::Zero;
  EXPECT_EQ(linf(build_initial(sc, g)), 0.0);
}

TEST(BuildInitial, BoundaryNotDecayed) {
  auto g = make_grid(-10.0, 10.0, 256);
  EXPECT_EQ(code_of([&] { build_initial(SemiclassicalConfig{}, g); }), ErrorCode::BoundaryNotDecayed);
  SemiclassicalConfig sc;
  sc.amplitude = AmplitudeProfile::Gaussian;
  EXPECT_NO_THROW(build_initial(sc, g));
}

TEST(Config, EpsilonRange) {
  SemiclassicalConfig sc;
  sc.epsilon = 0.5;
  EXPECT_NO_THROW(sc.validate());
  sc.epsilon = 0.6;
  EXPECT_THROW(sc.validate(), Error);
  sc.epsilon = 0.0;
  EXPECT_THROW(sc.validate(), Error);
  EXPECT_EQ(parse_phase("2sech"), PhaseProfile::TwoSech);
  EXPECT_EQ(parse_amplitude("sech"), AmplitudeProfile::Sech);
  EXPECT_FALSE(parse_phase("cos").has_value());
}

TEST(ScaledEvolution, UnitEpsilonIsPlainEvolve) {
  auto g = make_grid(-30.0, 30.0, 512);
  ModelParams p;
  p.beta = 0.7;
  StepConfig cfg;
  cfg.T = 0.2;
  cfg.M = 40;
  const auto u0 = ComplexField::sample(g, [](double x) { return std::polar(1.0 / std::cosh(x), 0.3 * x); });
  const auto a = evolve(u0, p, cfg);
  const auto b = evolve_scaled(u0, p, cfg, 1.0);
  EXPECT_EQ(a.final.values(), b.final.values());
  ASSERT_EQ(a.diagnostics.rows.size(), b.diagnostics.rows.size());
  for (std::size_t i = 0; i < a.diagnostics.rows.size(); ++i) {
    EXPECT_EQ(a.diagnostics.rows[i].F, b.diagnostics.rows[i].F);
    EXPECT_EQ(a.diagnostics.rows[i].E, b.diagnostics.rows[i].E);
  }
}

TEST(BreakTime, SyntheticSeries) {
  std::vector<double> down(60);
  for (std::size_t i = 0; i < down.size(); ++i) down[i] = 1.0 - 0.01 * static_cast<double>(i);
  EXPECT_FALSE(first_break_time(times(60, 0.01), down).has_value());

  std::vector<double> peak(100);
  for (std::size_t i = 0; i < peak.size(); ++i) {
    const double d = static_cast<double>(i) - 42.0;
    peak[i] = 1.0 + std::exp(-d * d / 50.0);
  }
  const auto t = times(100, 0.01);
  const auto tb = first_break_time(t, peak);
  ASSERT_TRUE(tb.has_value());
  EXPECT_DOUBLE_EQ(*tb, t[42]);

  // a bump too small to count
  std::vector<double> small(100);
  for (std::size_t i = 0; i < small.size(); ++i) small[i] = 1.0 + 0.1 * std::sin(0.1 * static_cast<double>(i));
  EXPECT_FALSE(first_break_time(t, small).has_value());

  EXPECT_EQ(code_of([] { first_break_time({0, 1, 2, 3}, {1, 2, 3, 4}); }), ErrorCode::SeriesTooShort);
  EXPECT_EQ(code_of([] { first_break_time({0, 1, 2}, {1, 2, 3, 4, 5}); }), ErrorCode::SeriesTooShort);
}

TEST(MassGauge, MeaningfulOnlyWithZeroMeanForBetaAtLeastOne) {
  auto g = make_grid(-40.0, 40.0, 1024);
  const auto s = build_initial(SemiclassicalConfig{}, g);
  EXPECT_TRUE(mass_is_meaningful(s, 0.5));
  EXPECT_FALSE(mass_is_meaningful(s, 1.0));
  EXPECT_FALSE(mass_is_meaningful(s, 1.5));
  const auto odd = ComplexField::sample(g, [](double x) { return x / std::cosh(x); });
  EXPECT_TRUE(mass_is_meaningful(odd, 1.5));
}

TEST(Semiclassical, DefocusingCompletesBounded) {
  auto g = make_grid(-30.0, 30.0, 2048);
  SemiclassicalConfig sc;
  sc.p.beta = 1.5;
  sc.p.zeta = -1.0;
  sc.cfg.T = 0.5;
  sc.cfg.M = 2000;
  sc.cfg.store_snapshots = false;
  const auto ev = semiclassical_evolve(sc, g);
  EXPECT_EQ(ev.outcome.kind, OutcomeKind::Completed);
  for (double l : ev.diagnostics.step_linf) EXPECT_LE(l, 1.0 + 1e-9);
  EXPECT_LT(ev.diagnostics.step_linf.back(), 1.0);
}

TEST(Semiclassical, FocusingRisesMonotonicallyBeforeBreak) {
  auto g = make_grid(-30.0, 30.0, 2048);
  SemiclassicalConfig sc;
  sc.p.beta = 1.5;
  sc.cfg.T = 0.3;
  sc.cfg.M = 3000;
  sc.cfg.store_snapshots = false;
  const auto ev = semiclassical_evolve(sc, g);
  ASSERT_EQ(ev.outcome.kind, OutcomeKind::Completed);
  const auto& t = ev.diagnostics.step_t;
  const auto& l = ev.diagnostics.step_linf;
  ASSERT_EQ(t.size(), static_cast<std::size_t>(sc.cfg.M) + 1);
  const auto tb = first_break_time(t, l);
  ASSERT_TRUE(tb.has_value());
  EXPECT_GT(*tb, 0.15);
  EXPECT_LT(*tb, 0.3);
  double running = 0;
  for (std::size_t i = 0; i < t.size() && t[i] <= 0.8 * *tb; ++i) {
    running = std::max(running, l[i]);
    EXPECT_GE(l[i], 0.99 * running) << "t " << t[i];
  }
  // sech has nonzero mean: at beta >= 1 the drift is reported, not gated
  ASSERT_FALSE(ev.diagnostics.warnings.empty());
  EXPECT_NE(ev.diagnostics.warnings.front().find("nonzero mean"), std::string::npos);
}

TEST(Semiclassical, MassDriftSmallForZeroMeanData) {
  auto g = make_grid(-30.0, 30.0, 1024);
  ModelParams p;
  p.beta = 1.5;
  StepConfig cfg;
  cfg.T = 0.1;
  cfg.M = 1000;
  cfg.store_snapshots = false;
  const auto u0 = ComplexField::sample(g, [](double x) { return x / std::cosh(x); });
  const auto ev = evolve_scaled(u0, p, cfg, 0.1);
  ASSERT_EQ(ev.outcome.kind, OutcomeKind::Completed);
  for (const auto& row : ev.diagnostics.rows) EXPECT_LE(row.deltaF, 1e-5);
}
