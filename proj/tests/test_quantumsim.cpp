#include <gtest/gtest.h>

#include <random>

#include "nlts/quantumsim.hpp"

using namespace nlts;
using gf2::Word;

namespace {

std::vector<Word> random_subset(std::size_t n, std::mt19937_64& rng, double p) {
  std::bernoulli_distribution keep(p);
  std::vector<Word> s;
  for (Word w = 0; w < (Word{1} << n); ++w)
    if (keep(rng)) s.push_back(w);
  return s;
}

// Chebyshev T_f by the trigonometric and hyperbolic closed forms.
long double chebyshev_closed(std::size_t f, long double t) {
  const long double fl = static_cast<long double>(f);
  if (std::abs(t) <= 1) return std::cos(fl * std::acos(t));
  const long double v = std::cosh(fl * std::acosh(std::abs(t)));
  return t < 0 && f % 2 == 1 ? -v : v;
}

}  // namespace

TEST(Circuit, LayerValidation) {
  LayeredCircuit c(3);
  EXPECT_NO_THROW(c.add_layer({Gate::h(0), Gate::cnot(1, 2)}));
  EXPECT_THROW(c.add_layer({Gate::h(0), Gate::cnot(0, 1)}), Error);
  EXPECT_THROW(c.add_layer({Gate::x(3)}), Error);
  EXPECT_THROW(c.add_layer({Gate::cz(1, 1)}), Error);
  EXPECT_THROW(c.add_layer({Gate::unitary({0}, {1, 1, 1, 1})}), Error);
  EXPECT_EQ(c.depth(), 1u);
}

TEST(StateVector, SmallCircuits) {
  LayeredCircuit bell(2);
  bell.add_layer({Gate::h(0)});
  bell.add_layer({Gate::cnot(0, 1)});
  const auto psi = simulate(bell);
  EXPECT_NEAR(std::norm(psi[0]), 0.5, 1e-12);
  EXPECT_NEAR(std::norm(psi[3]), 0.5, 1e-12);
  EXPECT_NEAR(std::norm(psi[1]) + std::norm(psi[2]), 0.0, 1e-12);
  LayeredCircuit flip(3);
  flip.add_layer({Gate::x(0)});
  EXPECT_NEAR(std::norm(simulate(flip)[1]), 1.0, 1e-12);
  EXPECT_THROW(StateVector::zero(30), Error);
}

TEST(StateVector, MatchesDenseUnitary) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + t % 5;
    const auto c = random_circuit(n, 1 + t % 3, rng);
    const auto psi = simulate(c);
    const auto u = dense_unitary(c);
    for (std::size_t i = 0; i < psi.dimension(); ++i) EXPECT_NEAR(std::abs(psi[i] - u(i, 0)), 0.0, 1e-10);
  }
}

TEST(Distributions, NormalizedAndCollisionBounds) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 2 + t % 8;
    const auto psi = simulate(random_circuit(n, 1 + t % 3, rng));
    const auto [dz, dx] = measurement_distributions(psi);
    EXPECT_NEAR(dz.total(), 1.0, 1e-10);
    EXPECT_NEAR(dx.total(), 1.0, 1e-10);
    for (const auto* d : {&dz, &dx}) {
      const double q = collision_probability(*d);
      EXPECT_GE(q, std::ldexp(1.0, -static_cast<int>(n)) - 1e-12);
      EXPECT_LE(q, 1.0 + 1e-12);
    }
  }
  // |+^n> is uniform in Z and a point mass in X.
  LayeredCircuit plus(4);
  plus.add_layer({Gate::h(0), Gate::h(1), Gate::h(2), Gate::h(3)});
  const auto [dz, dx] = measurement_distributions(simulate(plus));
  EXPECT_NEAR(collision_probability(dz), 1.0 / 16, 1e-12);
  EXPECT_NEAR(dx.p[0], 1.0, 1e-12);
}

TEST(Lightcone, GrowsAtMostTwofoldPerLayer) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 4 + t % 7, depth = t % 4;
    const auto c = random_circuit(n, depth, rng);
    for (std::size_t q = 0; q < n; ++q) {
      const auto l = lightcone(c, q);
      EXPECT_TRUE(std::find(l.begin(), l.end(), q) != l.end());
      EXPECT_LE(l.size(), std::min<std::size_t>(n, std::size_t{1} << depth));
    }
  }
  LayeredCircuit chain(4);
  chain.add_layer({Gate::cnot(0, 1)});
  chain.add_layer({Gate::cnot(1, 2)});
  EXPECT_EQ(lightcone(chain, 2), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(lightcone(chain, 3), (std::vector<std::size_t>{3}));
}

TEST(Fact1, TrivialCases) {
  const auto zero = StateVector::zero(5);
  const std::vector<Word> s{0};
  std::vector<Word> all(32);
  std::iota(all.begin(), all.end(), Word{0});
  const auto r = fact1_check(zero, s, all);
  EXPECT_NEAR(r.dz_s, 1.0, 1e-12);
  EXPECT_NEAR(r.dx_t, 1.0, 1e-12);
  EXPECT_NEAR(r.rhs, 1.0, 1e-12);
  EXPECT_TRUE(r.holds);
  const auto big = fact1_check(zero, all, all);
  EXPECT_GE(big.rhs, std::sqrt(32.0) - 1e-12);
}

TEST(Fact1, RandomizedTrialsNeverViolate) {
  std::mt19937_64 rng(12);
  std::size_t violations = 0;
  double slack = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 10000; ++t) {
    const std::size_t n = 2 + t % 9;
    const auto psi = simulate(random_circuit(n, 1 + t % 3, rng));
    const auto [dz, dx] = measurement_distributions(psi);
    const double p = 0.05 + 0.9 * static_cast<double>(t % 10) / 10.0;
    const auto s = random_subset(n, rng, p);
    const auto tt = random_subset(n, rng, 1.0 - p);
    const auto r = fact1_check(dz, dx, s, tt);
    // Recompute the right side independently.
    double ps = 0, pt = 0;
    for (auto w : s) ps += dz.p[w];
    for (auto w : tt) pt += dx.p[w];
    const double rhs = 2 * std::sqrt(std::max(0.0, 1 - ps)) +
                       std::sqrt(static_cast<double>(s.size() * tt.size()) / std::ldexp(1.0, static_cast<int>(n)));
    ASSERT_NEAR(r.rhs, rhs, 1e-12);
    ASSERT_NEAR(r.dx_t, pt, 1e-12);
    violations += pt > rhs + 1e-12;
    slack = std::min(slack, rhs - pt);
  }
  EXPECT_EQ(violations, 0u);
  EXPECT_GT(slack, -1e-12);
  RecordProperty("min_slack", std::to_string(slack));
}

TEST(Agsp, MatchesClosedFormChebyshev) {
  for (std::size_t m : {2u, 5u, 16u, 64u}) {
    for (std::size_t f : {1u, 3u, 16u, 40u}) {
      const AgspPolynomial p(m, f);
      const auto [scale, shift] = p.affine_map();
      const long double norm = chebyshev_closed(f, shift);
      for (std::size_t i = 0; i <= m; ++i) {
        const long double x = static_cast<long double>(i) / m;
        const long double expect = chebyshev_closed(f, scale * x + shift) / norm;
        EXPECT_NEAR(static_cast<double>(p(x)), static_cast<double>(expect), 1e-12);
      }
      // mu(1/m) = 1 and mu(1) = -1.
      EXPECT_NEAR(static_cast<double>(scale / m + shift), 1.0, 1e-15);
      EXPECT_NEAR(static_cast<double>(scale + shift), -1.0, 1e-15);
    }
  }
}

TEST(Agsp, EnvelopeHoldsOnFullGrid) {
  for (std::size_t m = 1; m <= 64; ++m) {
    for (std::size_t f = 1; f <= 64; ++f) {
      const auto p = chebyshev_agsp(m, f);
      EXPECT_EQ(p(0.0L), 1.0L);
      const long double env = std::exp(-static_cast<long double>(f * f) / (100.0L * m));
      for (std::size_t i = 1; i <= m; ++i) ASSERT_LE(std::abs(p(static_cast<long double>(i) / m)), env) << m << ' ' << f;
    }
  }
  EXPECT_THROW(chebyshev_agsp(65, 3), Error);
  EXPECT_THROW(AgspPolynomial(0, 3), Error);
}

TEST(Agsp, SingleCheckPointCase) {
  const auto p = chebyshev_agsp(1, 8);
  EXPECT_EQ(p(1.0L), 0.0L);
  EXPECT_EQ(p(0.0L), 1.0L);
}

TEST(AgspProjector, IdentityAndHadamardCircuits) {
  LayeredCircuit id(4);
  const auto r = agsp_projector_check(id, 4);
  EXPECT_TRUE(r.spectrum_ok);
  EXPECT_TRUE(r.unique_ground);
  EXPECT_TRUE(r.holds);
  LayeredCircuit had(4);
  had.add_layer({Gate::h(0), Gate::h(1), Gate::h(2), Gate::h(3)});
  EXPECT_TRUE(agsp_projector_check(had, 6).holds);
}

TEST(AgspProjector, RandomCircuits) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + t % 5, depth = 1 + t % 2;
    const auto c = random_circuit(n, depth, rng);
    const auto r = agsp_projector_check(c, 1 + t % 12);
    EXPECT_TRUE(r.holds) << "trial " << t << " err " << r.error_norm << " bound " << r.bound;
  }
  EXPECT_THROW(agsp_projector_check(LayeredCircuit(11), 2), Error);
}

TEST(DepthBound, WorkedExamples) {
  EXPECT_LE(depth_lower_bound(100, 100, 1.0 / 400), 0.0);
  const double v = depth_lower_bound(1e6, 1e6, 1.0 / 400);
  EXPECT_NEAR(v, std::log2(1e12 / (400 * 1e6 * std::log2(400.0))) / 3, 1e-12);
  EXPECT_NEAR(v, 2.7, 0.1);
  EXPECT_THROW(depth_lower_bound(10, 10, 1.0), Error);
  EXPECT_THROW(depth_lower_bound(10, 10, 0.0), Error);
}

TEST(Fact2, SetDistance) {
  EXPECT_EQ(set_distance({0b000}, {0b111}), 3u);
  EXPECT_EQ(set_distance({0b001, 0b110}, {0b111, 0b000}), 1u);
}

TEST(Fact2, NoCounterexamplesOnSampledInstances) {
  std::mt19937_64 rng(14);
  std::size_t bad = 0;
  for (int t = 0; t < 1200; ++t) {
    const std::size_t n = 2 + t % 9, depth = 1 + t % 3;
    const auto c = random_circuit(n, depth, rng);
    // S1 near 0^n and S2 near 1^n, at varying radii.
    const std::size_t r1 = t % 3, r2 = (t / 3) % 3;
    std::vector<Word> s1, s2;
    for (Word w = 0; w < (Word{1} << n); ++w) {
      if (static_cast<std::size_t>(std::popcount(w)) <= r1) s1.push_back(w);
      if (static_cast<std::size_t>(std::popcount(w)) + r2 >= n) s2.push_back(w);
    }
    const auto r = fact2_check(c, s1, s2);
    const auto [dz, dx] = measurement_distributions(simulate(c));
    EXPECT_NEAR(r.overlap, std::sqrt(dz.mass(s1) * dz.mass(s2)), 1e-12);
    bad += r.holds ? 0 : 1;
  }
  EXPECT_EQ(bad, 0u);
}
