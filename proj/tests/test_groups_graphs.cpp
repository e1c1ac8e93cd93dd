#include <gtest/gtest.h>

#include <random>
#include <set>
#include <tuple>

#include "nlts/graphs.hpp"
#include "nlts/groups.hpp"

using namespace nlts;
using nlts::gf2::BitMatrix;

namespace {

struct Fixture {
  FiniteGroup g;
  GeneratorSet a, b;
};

std::vector<Fixture> complexes() {
  return {{FiniteGroup::cyclic(6), {{1, 5}}, {{2, 4}}},
          {FiniteGroup::dihedral(4), {{4, 5}}, {{1, 3}}},
          {FiniteGroup::cyclic(8), {{1, 7}}, {{2, 6}}},
          {FiniteGroup::symmetric(3), {{1, 2}}, {{3, 4}}}};
}

// Independent face enumeration: all triples (g, a, b), identified with
// (agb, a^-1, b^-1); count the classes.
std::size_t brute_face_count(const Fixture& f) {
  std::set<std::tuple<Element, Element, Element>> seen;
  for (Element g = 0; g < f.g.order(); ++g)
    for (auto a : f.a.elements)
      for (auto b : f.b.elements) {
        auto t1 = std::make_tuple(g, a, b);
        auto t2 = std::make_tuple(f.g.mul(a, g, b), f.g.inverse(a), f.g.inverse(b));
        seen.insert(std::min(t1, t2));
      }
  return seen.size();
}

}  // namespace

TEST(FiniteGroup, BuiltinsSatisfyAxioms) {
  for (const auto& g : {FiniteGroup::cyclic(7), FiniteGroup::dihedral(5), FiniteGroup::symmetric(4)}) {
    for (Element a = 0; a < g.order(); ++a) {
      EXPECT_EQ(g.mul(a, g.inverse(a)), g.identity());
      for (Element b = 0; b < g.order(); ++b)
        for (Element c = 0; c < g.order(); ++c) ASSERT_EQ(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
    }
  }
  EXPECT_TRUE(FiniteGroup::cyclic(6).is_abelian());
  EXPECT_FALSE(FiniteGroup::symmetric(3).is_abelian());
  EXPECT_FALSE(FiniteGroup::dihedral(3).is_abelian());
  EXPECT_EQ(FiniteGroup::symmetric(4).order(), 24u);
  EXPECT_EQ(FiniteGroup::symmetric(3).identity(), 0u);
}

TEST(FiniteGroup, InvalidTableRejected) {
  // Not associative / no inverses.
  EXPECT_THROW(FiniteGroup({{0, 1}, {1, 1}}), Error);
  EXPECT_THROW(FiniteGroup({{0, 1}, {0, 1}}), Error);
  EXPECT_THROW(FiniteGroup({{0, 2}, {1, 0}}), Error);
}

TEST(GeneratorSet, Validation) {
  const auto z6 = FiniteGroup::cyclic(6);
  auto check = [&](std::vector<Element> e) { GeneratorSet{std::move(e)}.validate(z6); };
  EXPECT_NO_THROW(check({1, 5}));
  EXPECT_NO_THROW(check({3}));
  EXPECT_THROW(check({1, 2}), Error);
  EXPECT_THROW(check({0}), Error);
  EXPECT_THROW(check({1, 5, 5}), Error);
  try {
    build_cayley(z6, GeneratorSet{{1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::AsymmetricGenerators);
  }
}

TEST(Cayley, CycleAndDoubleCover) {
  const auto z4 = FiniteGroup::cyclic(4);
  const auto cay = build_cayley(z4, GeneratorSet{{1, 3}});
  EXPECT_EQ(cay.vertex_count(), 4u);
  EXPECT_EQ(cay.edge_count(), 4u);
  EXPECT_EQ(cay.regular_degree(), 2u);
  EXPECT_EQ(cay.component_count(), 1u);
  // The bipartite double cover of an even cycle splits into two copies.
  const auto cover = double_cover(z4, GeneratorSet{{1, 3}});
  EXPECT_EQ(cover.vertex_count(), 8u);
  EXPECT_EQ(cover.edge_count(), 8u);
  EXPECT_EQ(cover.regular_degree(), 2u);
  EXPECT_TRUE(cover.is_bipartite());
  EXPECT_EQ(cover.component_count(), 2u);
  // Odd cycles lift to a single cycle of twice the length.
  const auto c10 = double_cover(FiniteGroup::cyclic(5), GeneratorSet{{1, 4}});
  EXPECT_EQ(c10.vertex_count(), 10u);
  EXPECT_EQ(c10.component_count(), 1u);
  EXPECT_EQ(c10.regular_degree(), 2u);
}

TEST(Cayley, InvolutionGivesMatching) {
  const auto cover = double_cover(FiniteGroup::cyclic(4), GeneratorSet{{2}});
  EXPECT_EQ(cover.regular_degree(), 1u);
  EXPECT_EQ(cover.edge_count(), 4u);
}

TEST(Cayley, DoubleCoverOfBaseGraph) {
  const auto base = build_cayley(FiniteGroup::dihedral(3), GeneratorSet{{3, 4}});
  const auto cover = bipartite_double_cover(base);
  EXPECT_EQ(cover.vertex_count(), 2 * base.vertex_count());
  EXPECT_EQ(cover.edge_count(), 2 * base.edge_count());
  EXPECT_TRUE(cover.is_bipartite());
}

TEST(Cayley, Z6CoverDegrees) {
  const auto z6 = FiniteGroup::cyclic(6);
  for (auto s : {GeneratorSet{{1, 5}}, GeneratorSet{{2, 4}, Side::Left}})
    EXPECT_EQ(double_cover(z6, s).regular_degree(), 2u);
}

TEST(BalancedProduct, FaceCountsMatchBruteForce) {
  for (const auto& f : complexes()) {
    const auto x = build_balanced_product(f.g, f.a, f.b);
    EXPECT_EQ(x.vertex_count(), 2 * f.g.order());
    EXPECT_EQ(x.face_count(), brute_face_count(f)) << f.g.name();
    EXPECT_EQ(x.face_count(), f.g.order() * x.delta() * x.delta() / 2) << f.g.name();
  }
}

TEST(BalancedProduct, CornersFollowFaceLayout) {
  for (const auto& f : complexes()) {
    const auto x = build_balanced_product(f.g, f.a, f.b);
    const std::size_t n = f.g.order();
    std::vector<std::size_t> incidence(x.vertex_count(), 0);
    for (const auto& face : x.faces()) {
      const Element a = f.a.elements[face.a], b = f.b.elements[face.b];
      EXPECT_EQ(face.corners[0], face.g);
      EXPECT_EQ(face.corners[1], n + f.g.mul(a, face.g));
      EXPECT_EQ(face.corners[2], n + f.g.mul(face.g, b));
      EXPECT_EQ(face.corners[3], f.g.mul(a, face.g, b));
      std::size_t in0 = 0;
      for (auto c : face.corners) {
        in0 += x.in_v0(c) ? 1 : 0;
        ++incidence[c];
      }
      EXPECT_EQ(in0, 2u);
    }
    // Each vertex lies on Delta^2 faces.
    for (auto c : incidence) EXPECT_EQ(c, x.delta() * x.delta()) << f.g.name();
  }
}

TEST(BalancedProduct, FaceOfIsConsistentUnderIdentification) {
  for (const auto& f : complexes()) {
    const auto x = build_balanced_product(f.g, f.a, f.b);
    for (Element g = 0; g < f.g.order(); ++g)
      for (std::size_t ia = 0; ia < x.delta(); ++ia)
        for (std::size_t ib = 0; ib < x.delta(); ++ib) {
          const Element a = f.a.elements[ia], b = f.b.elements[ib];
          const auto ja = f.a.index_of(f.g.inverse(a)), jb = f.b.index_of(f.g.inverse(b));
          EXPECT_EQ(x.face_of(g, ia, ib), x.face_of(f.g.mul(a, g, b), ja, jb));
        }
  }
}

TEST(BalancedProduct, DegenerateFacesRejected) {
  // Abelian group with a common generator: ag = gb for a = b.
  const auto z6 = FiniteGroup::cyclic(6);
  try {
    build_balanced_product(z6, GeneratorSet{{1, 5}}, GeneratorSet{{1, 5}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateFace);
  }
  ComplexOptions opts;
  opts.allow_degenerate = true;
  const auto x = build_balanced_product(z6, GeneratorSet{{1, 5}}, GeneratorSet{{1, 5}}, opts);
  EXPECT_GT(x.degenerate_count(), 0u);
}

TEST(SquareGraphs, RegularAndInBijectionWithFaces) {
  for (const auto& f : complexes()) {
    const auto x = build_balanced_product(f.g, f.a, f.b);
    const auto sq = square_graphs(x);
    const std::size_t d2 = x.delta() * x.delta();
    EXPECT_EQ(sq.g0.vertex_count(), f.g.order());
    EXPECT_EQ(sq.g0.edge_count(), x.face_count());
    EXPECT_EQ(sq.g1.edge_count(), x.face_count());
    EXPECT_EQ(sq.g0.regular_degree(), d2);
    EXPECT_EQ(sq.g1.regular_degree(), d2);
    std::vector<std::size_t> f0 = sq.face_of_edge0, f1 = sq.face_of_edge1;
    std::sort(f0.begin(), f0.end());
    std::sort(f1.begin(), f1.end());
    for (std::size_t i = 0; i < f0.size(); ++i) {
      EXPECT_EQ(f0[i], i);
      EXPECT_EQ(f1[i], i);
    }
    // g0 edges join (g,+) and (agb,+).
    for (std::size_t e = 0; e < sq.g0.edge_count(); ++e) {
      const auto& face = x.faces()[sq.face_of_edge0[e]];
      EXPECT_EQ(sq.g0.edge(e).u, face.corners[0]);
      EXPECT_EQ(sq.g0.edge(e).v, face.corners[3]);
    }
    // Local orders list each incident edge exactly once.
    for (Vertex v = 0; v < sq.g0.vertex_count(); ++v) {
      auto order = sq.g0.local_order().at(v);
      EXPECT_EQ(order.size(), d2);
      std::sort(order.begin(), order.end());
      EXPECT_EQ(std::adjacent_find(order.begin(), order.end()), order.end());
    }
  }
}

TEST(Spectra, KnownGraphs) {
  Graph k5(5);
  for (Vertex i = 0; i < 5; ++i)
    for (Vertex j = i + 1; j < 5; ++j) k5.add_edge(i, j);
  const auto s = spectral_lambda(k5);
  EXPECT_NEAR(s.lambda1, 4.0, 1e-9);
  EXPECT_NEAR(s.lambda2, -1.0, 1e-9);
  EXPECT_NEAR(s.lambda_min, -1.0, 1e-9);
  EXPECT_NEAR(s.lambda, 1.0, 1e-9);

  Graph c4(4);
  for (Vertex i = 0; i < 4; ++i) c4.add_edge(i, (i + 1) % 4);
  const auto c = spectral_lambda(c4);
  ASSERT_EQ(c.eigenvalues.size(), 4u);
  const double expected[] = {2, 0, 0, -2};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(c.eigenvalues[i], expected[i], 1e-9);
  EXPECT_NEAR(c.lambda, 2.0, 1e-9);
}

TEST(Spectra, SquareGraphBounds) {
  for (const auto& f : complexes()) {
    const auto sq = square_graphs(build_balanced_product(f.g, f.a, f.b));
    const auto s = spectral_lambda(sq.g0);
    const double d2 = static_cast<double>(f.a.size() * f.a.size());
    EXPECT_NEAR(s.lambda1, d2, 1e-9);
    EXPECT_LE(s.lambda, d2 + 1e-9);
    EXPECT_LE(s.lambda, 4.0 * static_cast<double>(f.a.size()) + 1e-9);
  }
}

TEST(Mixing, RandomSetsNeverViolate) {
  const auto sq = square_graphs(build_balanced_product(FiniteGroup::cyclic(6), GeneratorSet{{1, 5}}, GeneratorSet{{2, 4}}));
  const auto spec = spectral_lambda(sq.g0);
  std::mt19937_64 rng(17);
  for (int t = 0; t < 1000; ++t) {
    std::vector<Vertex> s, tt;
    for (Vertex v = 0; v < 6; ++v) {
      if (rng() & 1) s.push_back(v);
      if (rng() & 1) tt.push_back(v);
    }
    const auto r = mixing_lemma_check(sq.g0, s, tt, spec);
    // Independent edge count over ordered pairs.
    double e = 0;
    for (const auto& ed : sq.g0.edges()) {
      const bool us = std::count(s.begin(), s.end(), ed.u), vs = std::count(s.begin(), s.end(), ed.v);
      const bool ut = std::count(tt.begin(), tt.end(), ed.u), vt = std::count(tt.begin(), tt.end(), ed.v);
      e += (us && vt) + (vs && ut);
    }
    EXPECT_DOUBLE_EQ(r.edges_between, e);
    EXPECT_TRUE(r.holds);
  }
  const auto empty = mixing_lemma_check(sq.g0, {}, {0, 1});
  EXPECT_EQ(empty.edges_between, 0.0);
  std::vector<Vertex> all{0, 1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(mixing_lemma_check(sq.g0, all, all).edges_between, 4.0 * 6);
}

namespace {

// Independent scan: every left subset with |A| <= floor(alpha L).
bool brute_expanding(const BitMatrix& h, double gamma, double alpha) {
  const std::size_t left = h.cols();
  std::size_t d = h.column(0).weight();
  const auto max_size = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(left) + 1e-12));
  for (std::uint32_t mask = 1; mask < (1u << left); ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (size > max_size) continue;
    std::set<std::size_t> nb;
    for (std::size_t j = 0; j < left; ++j)
      if ((mask >> j) & 1) for (auto r : h.column(j).support()) nb.insert(r);
    if (static_cast<double>(nb.size()) + 1e-12 < (1 - gamma) * static_cast<double>(d * size)) return false;
  }
  return true;
}

}  // namespace

TEST(Expansion, MatchesIndependentScan) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    const auto g = random_left_regular(12, 9, 3, rng);
    const auto h = check_matrix(bipartite_view(g, 12));
    for (double gamma : {0.1, 0.25, 0.4}) {
      for (double alpha : {0.1, 0.2, 0.35}) {
        const auto r = small_set_expansion_check(g, 12, gamma, alpha);
        EXPECT_TRUE(r.exhaustive);
        EXPECT_EQ(r.expanding, brute_expanding(h, gamma, alpha));
        if (r.expanding) { EXPECT_EQ(r.unique_bound_violations, 0u); }
      }
    }
  }
}

TEST(Expansion, MatchingAndCompleteBipartite) {
  Graph m(8);
  for (Vertex i = 0; i < 4; ++i) m.add_edge(i, 4 + i);
  const auto r = small_set_expansion_check(m, 4, 0.0, 1.0);
  EXPECT_TRUE(r.expanding);
  const auto view = bipartite_view(m, 4);
  EXPECT_EQ(unique_neighbors(view, {0, 2}), neighborhood(view, {0, 2}));

  Graph k(7);
  for (Vertex l = 0; l < 4; ++l)
    for (Vertex rr = 4; rr < 7; ++rr) k.add_edge(l, rr);
  const auto kr = small_set_expansion_check(k, 4, 0.3, 1.0);
  EXPECT_FALSE(kr.expanding);
  ASSERT_TRUE(kr.first_violation.has_value());
  EXPECT_EQ(kr.first_violation->size(), 2u);
}

TEST(Expansion, RejectsIrregularAndNonBipartite) {
  Graph g(5);
  g.add_edge(0, 3);
  g.add_edge(0, 4);
  g.add_edge(1, 3);
  g.add_edge(2, 4);
  try {
    small_set_expansion_check(g, 3, 0.1, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotLeftRegular);
  }
  Graph t(3);
  t.add_edge(0, 1);
  t.add_edge(1, 2);
  try {
    small_set_expansion_check(t, 2, 0.1, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotBipartite);
  }
}

TEST(Expansion, InteractionGraphRoundTrip) {
  const auto h = BitMatrix::from_text("1100\n0110\n0011\n1001\n");
  const auto g = interaction_graph(h);
  EXPECT_EQ(g.vertex_count(), 8u);
  EXPECT_EQ(check_matrix(bipartite_view(g, 4)).to_text(), h.to_text());
}
