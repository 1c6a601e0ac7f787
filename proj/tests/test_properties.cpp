// Randomized invariants, many seeds each.
#include <gtest/gtest.h>

#include "fnls/fnls.hpp"
#include "oracles.hpp"

using namespace fnls;

namespace {

constexpr int kSeeds = 25;

struct Case {
  GridPtr grid;
  ComplexField u;
  ModelParams p;
};

/// Random grid, smooth random field and model parameters.
Case draw(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> log_n(6, 11);
  std::uniform_real_distribution<double> half(15.0, 60.0);
  std::uniform_real_distribution<double> shift(-10.0, 10.0);
  std::uniform_real_distribution<double> beta(-0.6, 1.6);
  std::uniform_real_distribution<double> sigma(0.5, 2.5);
  const double h = half(rng), s = shift(rng);
  auto g = make_grid(s - h, s + h, std::size_t{1} << log_n(rng));
  ModelParams p;
  p.beta = beta(rng);
  p.sigma = sigma(rng);
  if (rng() % 3 == 0) p.zeta = -1.0;
  std::vector<double> xs = g->x();
  for (auto& x : xs) x -= s;
  return {g, ComplexField(g, oracle::random_smooth(xs, h, rng)), p};
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace

TEST(Property, FftRoundTripAndParseval) {
  for (int s = 0; s < kSeeds; ++s) {
    const auto c = draw(1000 + s);
    SCOPED_TRACE("seed " + std::to_string(s));
    const auto F = forward(c.u);
    EXPECT_LE(linf_distance(inverse(F), c.u), 1e-12 * linf(c.u));
    double phys = 0, spec = 0;
    for (const auto& v : c.u.values()) phys += std::norm(v);
    for (const auto& v : F.coeffs()) spec += std::norm(v);
    EXPECT_LE(rel(phys * c.grid->h(), spec * c.grid->length()), 1e-12);
  }
}

TEST(Property, GaugeAndTranslationInvarianceOfFunctionals) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int s = 0; s < kSeeds; ++s) {
    const auto c = draw(2000 + s);
    SCOPED_TRACE("seed " + std::to_string(s));
    const auto f = compute_functionals(c.u, c.p);
    auto rot = c.u;
    rot *= std::polar(1.0, angle(rng));
    const auto fr = compute_functionals(rot, c.p);
    const auto shifted = circular_shift(c.u, static_cast<long>(rng() % c.u.size()));
    const auto fs = compute_functionals(shifted, c.p);
    for (const auto& other : {fr, fs}) {
      EXPECT_LE(rel(other.F, f.F), 1e-12);
      EXPECT_LE(rel(other.R, f.R), 1e-12);
      EXPECT_LE(std::abs(other.E - f.E), 1e-12 * (std::abs(f.G) + std::abs(f.R)));
      EXPECT_LE(std::abs(other.P - f.P), 1e-12 * f.F * std::numbers::pi / c.grid->h());
    }
  }
}

TEST(Property, MomentumFlipsUnderConjugation) {
  for (int s = 0; s < kSeeds; ++s) {
    const auto c = draw(3000 + s);
    SCOPED_TRACE("seed " + std::to_string(s));
    ComplexField conj(c.grid);
    for (std::size_t j = 0; j < conj.size(); ++j) conj[j] = std::conj(c.u[j]);
    const double p = momentum(c.u, c.p);
    EXPECT_NEAR(momentum(conj, c.p), -p, 1e-11 * (std::abs(p) + mass(c.u, c.p)));
  }
}

TEST(Property, FractionalPowersCompose) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> gamma(-0.9, 1.9);
  for (int s = 0; s < kSeeds; ++s) {
    const auto c = draw(4000 + s);
    SCOPED_TRACE("seed " + std::to_string(s));
    const double a = gamma(rng), b = gamma(rng);
    const auto lhs = apply_D(apply_D(c.u, a), b);
    const auto rhs = apply_D(c.u, a + b);
    EXPECT_LE(linf_distance(lhs, rhs), 1e-11 * std::max(linf(rhs), linf(lhs)) + 1e-14);
  }
}

TEST(Property, LinearSubstepIsUnitary) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> tau(-1.0, 1.0);
  for (int s = 0; s < kSeeds; ++s) {
    const auto c = draw(5000 + s);
    SCOPED_TRACE("seed " + std::to_string(s));
    const auto before = forward(c.u);
    const auto after = forward(linear_substep(c.u, tau(rng), c.p.lambda));
    double n0 = 0, n1 = 0, worst = 0;
    for (std::size_t m = 0; m < before.size(); ++m) {
      n0 += std::norm(before[m]);
      n1 += std::norm(after[m]);
      worst = std::max(worst, std::abs(std::abs(after[m]) - std::abs(before[m])));
    }
    EXPECT_LE(rel(n0, n1), 1e-14 * 10);
    EXPECT_LE(worst, 1e-13 * oracle::max_abs(before.coeffs()));
  }
}

TEST(Property, StepIsGaugeEquivariant) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int s = 0; s < kSeeds; ++s) {
    const auto c = draw(6000 + s);
    SCOPED_TRACE("seed " + std::to_string(s));
    const cplx rot = std::polar(1.0, angle(rng));
    auto ru = c.u;
    ru *= rot;
    const double tau = 1e-3;
    auto expect = step(c.u, tau, c.p, c.p.lambda, Scheme::Yoshida4);
    expect *= rot;
    EXPECT_LE(linf_distance(step(ru, tau, c.p, c.p.lambda, Scheme::Yoshida4), expect), 1e-12 * linf(c.u));
  }
}

TEST(Property, GagliardoNirenbergHolds) {
  for (double beta : {0.4, 0.0, 0.8}) {
    auto g = make_grid(-200.0, 200.0, 4096);
    ModelParams p;
    p.beta = beta;
    const auto Q = solve_standing_wave(g, p, 1.0).profile;
    std::mt19937_64 rng(static_cast<std::uint64_t>(beta * 100) + 1);
    for (int s = 0; s < 100; ++s) {
      ComplexField u(g, oracle::random_smooth(g->x(), 30.0, rng));
      const auto r = gn_check(u, Q, p, p.sigma);
      EXPECT_LE(r.lhs, r.rhs * (1.0 + 1e-8)) << "beta " << beta << " seed " << s;
    }
  }
}

TEST(Property, ProfileFileRoundTrip) {
  for (int s = 0; s < kSeeds; ++s) {
    const auto c = draw(7000 + s);
    SCOPED_TRACE("seed " + std::to_string(s));
    const WaveParams w{1.0 + s, 0.1 * s};
    const auto back = decode_profile(encode_profile(c.u, c.p, w, s % 2 ? std::optional<double>(0.1 * s) : std::nullopt));
    ASSERT_EQ(back.field.size(), c.u.size());
    EXPECT_EQ(0, std::memcmp(back.field.values().data(), c.u.values().data(), c.u.size() * sizeof(cplx)));
    EXPECT_EQ(back.params.beta, c.p.beta);
    EXPECT_EQ(back.params.sigma, c.p.sigma);
    EXPECT_EQ(back.params.zeta, c.p.zeta);
    EXPECT_EQ(back.field.grid().a(), c.grid->a());
    EXPECT_EQ(back.field.grid().b(), c.grid->b());
    EXPECT_EQ(back.t.has_value(), s % 2 == 1);
  }
}

TEST(Property, BreakTimeIgnoresScaleAndDetectsPlantedPeak) {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<int> where(10, 180);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  for (int s = 0; s < kSeeds; ++s) {
    SCOPED_TRACE("seed " + std::to_string(s));
    const int peak = where(rng);
    std::vector<double> t(200), l(200);
    for (int i = 0; i < 200; ++i) {
      t[i] = 0.005 * i;
      const double d = i - peak;
      l[i] = 1.0 + 1.5 * std::exp(-d * d / 30.0) + noise(rng);
    }
    const auto tb = first_break_time(t, l);
    ASSERT_TRUE(tb.has_value());
    EXPECT_NEAR(*tb, t[peak], 2 * 0.005);
    const double k = scale(rng);
    auto scaled = l;
    for (auto& v : scaled) v *= k;
    EXPECT_EQ(first_break_time(t, scaled), tb);
  }
}

TEST(Property, SolverFixedPointAcrossParameters) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> beta(-0.3, 0.9);
  std::uniform_real_distribution<double> omega(0.5, 2.0);
  auto g = make_grid(-100.0, 100.0, 4096);
  for (int s = 0; s < 6; ++s) {
    ModelParams p;
    p.beta = beta(rng);
    const double w = omega(rng);
    SCOPED_TRACE("beta " + std::to_string(p.beta) + " omega " + std::to_string(w));
    SolveOptions opts;
    opts.max_iter = 3000;
    const auto rec = solve_standing_wave(g, p, w, opts);
    const auto next = iterate_step(rec.profile, p, WaveParams{w, 0.0}, default_nu(p.sigma));
    EXPECT_LE(linf_distance(next.next, rec.profile), 10.0 * opts.tol);
    EXPECT_LE(std::abs(1.0 - next.M), 10.0 * opts.tol);
    EXPECT_LE(rec.pohozaev.rB, 1e-6);
  }
}
