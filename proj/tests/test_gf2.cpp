#include <gtest/gtest.h>

#include <random>

#include "nlts/gf2.hpp"

using namespace nlts;
using namespace nlts::gf2;

namespace {

// Plain Gaussian elimination over int entries, kept apart from the packed code.
std::size_t naive_rank(std::vector<std::vector<int>> a) {
  std::size_t r = 0;
  const std::size_t cols = a.empty() ? 0 : a[0].size();
  for (std::size_t c = 0; c < cols && r < a.size(); ++c) {
    std::size_t p = r;
    while (p < a.size() && a[p][c] == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[r]);
    for (std::size_t i = 0; i < a.size(); ++i)
      if (i != r && a[i][c])
        for (std::size_t j = 0; j < cols; ++j) a[i][j] ^= a[r][j];
    ++r;
  }
  return r;
}

BitMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double p = 0.5) {
  std::bernoulli_distribution bit(p);
  BitMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m.set(i, j, bit(rng));
  return m;
}

std::vector<std::vector<int>> to_ints(const BitMatrix& m) {
  std::vector<std::vector<int>> a(m.rows(), std::vector<int>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a[i][j] = m.get(i, j);
  return a;
}

}  // namespace

TEST(BitVector, BasicOps) {
  auto v = BitVector::from_string("1011000");
  EXPECT_EQ(v.size(), 7u);
  EXPECT_EQ(v.weight(), 3u);
  EXPECT_EQ(v.support(), (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_EQ(v.to_string(), "1011000");
  auto u = BitVector::unit(7, 2);
  EXPECT_EQ((v ^ u).to_string(), "1001000");
  EXPECT_TRUE(v.dot(BitVector::from_string("1000000")));
  EXPECT_FALSE(v.dot(BitVector::from_string("1010000")));
  EXPECT_EQ(v.overlap(BitVector::ones(7)), 3u);
  EXPECT_EQ(BitVector::from_word(7, v.to_word()), v);
}

TEST(BitVector, CrossesWordBoundary) {
  BitVector v(130);
  v.set(0, true);
  v.set(64, true);
  v.set(129, true);
  EXPECT_EQ(v.weight(), 3u);
  EXPECT_EQ(v.support(), (std::vector<std::size_t>{0, 64, 129}));
  EXPECT_THROW(v.to_word(), Error);
  EXPECT_EQ(BitVector::ones(130).weight(), 130u);
}

TEST(BitVector, LengthMismatchThrows) {
  BitVector a(5), b(6);
  EXPECT_THROW(a ^= b, Error);
  EXPECT_THROW(a.dot(b), Error);
}

TEST(BitMatrix, TextRoundTrip) {
  const std::string text = "1100\n0110\n# comment\n\n0011\n";
  auto m = BitMatrix::from_text(text);
  EXPECT_EQ(m.rows(), 3u);
  EXPECT_EQ(m.cols(), 4u);
  EXPECT_EQ(m.to_text(), "1100\n0110\n0011\n");
  EXPECT_EQ(BitMatrix::from_text(m.to_text()).to_text(), m.to_text());
}

TEST(BitMatrix, ProductAndTranspose) {
  auto m = BitMatrix::from_text("110\n011\n");
  EXPECT_EQ(product(m, BitVector::from_string("111")).to_string(), "00");
  EXPECT_EQ(product(m, BitVector::from_string("100")).to_string(), "10");
  auto t = transpose(m);
  EXPECT_EQ(t.to_text(), "10\n11\n01\n");
  EXPECT_TRUE(matmul(m, transpose(BitMatrix::from_text("111\n"))).is_zero());
  EXPECT_THROW(product(m, BitVector(4)), Error);
}

TEST(Rank, MatchesNaiveElimination) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t r = 1 + rng() % 12, c = 1 + rng() % 80;
    const auto m = random_matrix(r, c, rng, trial % 3 == 0 ? 0.1 : 0.5);
    EXPECT_EQ(rank(m), naive_rank(to_ints(m))) << "trial " << trial;
  }
}

TEST(Kernel, IsAnnihilatedAndHasComplementDimension) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t r = 1 + rng() % 10, c = 1 + rng() % 70;
    const auto m = random_matrix(r, c, rng);
    const auto ker = kernel_basis(m);
    EXPECT_EQ(ker.size(), c - rank(m));
    for (const auto& v : ker) EXPECT_TRUE(product(m, v).none());
    if (!ker.empty()) { EXPECT_EQ(rank(BitMatrix::from_rows(ker, c)), ker.size()); }
  }
}

TEST(RowEchelon, ContainsExactlyTheRowSpace) {
  std::mt19937_64 rng(11);
  const auto m = random_matrix(4, 10, rng);
  const auto e = row_echelon(m);
  const auto words = words::to_words(m.row_vectors());
  const auto span = words::span(words::to_words(e.rows));
  std::vector<bool> in(1 << 10, false);
  for (auto w : span) in[w] = true;
  for (Word w = 0; w < (1u << 10); ++w) EXPECT_EQ(e.contains(BitVector::from_word(10, w)), in[w]);
  for (auto w : words) EXPECT_TRUE(in[w]);
}

TEST(RowSpace, SameAndOrthogonal) {
  auto a = BitMatrix::from_text("1100\n0110\n");
  auto b = BitMatrix::from_text("1010\n0110\n");
  EXPECT_TRUE(same_row_space(a, b));
  EXPECT_TRUE(orthogonal(a, BitMatrix::from_text("1111\n")));
  EXPECT_FALSE(orthogonal(a, BitMatrix::from_text("1000\n")));
  EXPECT_EQ(independent_rows(vstack(a, b)).rows(), 2u);
}

TEST(WordBasis, ReduceIsCanonicalPerCoset) {
  std::mt19937_64 rng(3);
  const auto m = random_matrix(5, 12, rng);
  const words::WordBasis basis(words::to_words(m.row_vectors()));
  const auto span = words::span(basis.rows);
  for (int t = 0; t < 200; ++t) {
    const Word y = rng() & low_mask(12);
    const Word rep = basis.reduce(y);
    for (auto s : span) EXPECT_EQ(basis.reduce(y ^ s), rep);
  }
}

TEST(WeightBounded, EnumeratesEachWordOnceInWeightOrder) {
  for (std::size_t n : {1u, 5u, 10u, 14u}) {
    for (std::size_t w = 0; w <= n; w += 2) {
      std::vector<Word> seen;
      words::for_each_weight_bounded(n, w, [&](Word v) {
        seen.push_back(v);
        return true;
      });
      std::size_t expected = 0;
      for (Word v = 0; v < (Word{1} << n); ++v) expected += static_cast<std::size_t>(std::popcount(v)) <= w;
      EXPECT_EQ(seen.size(), expected);
      for (std::size_t i = 1; i < seen.size(); ++i) EXPECT_LE(std::popcount(seen[i - 1]), std::popcount(seen[i]));
      std::sort(seen.begin(), seen.end());
      EXPECT_EQ(std::adjacent_find(seen.begin(), seen.end()), seen.end());
    }
  }
}

TEST(WeightBounded, StopsEarly) {
  std::size_t calls = 0;
  const bool done = words::for_each_weight_bounded(10, 10, [&](Word) { return ++calls < 5; });
  EXPECT_FALSE(done);
  EXPECT_EQ(calls, 5u);
}

TEST(CosetDistance, MatchesBruteForce) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng() % 9;
    const auto gen = random_matrix(1 + rng() % 4, n, rng);
    const CosetFamily fam(gen);
    const auto table = coset_distance_table(fam);
    const auto span = words::span(words::to_words(gen.row_vectors()));
    for (Word y = 0; y < (Word{1} << n); ++y) {
      std::size_t best = n;
      for (auto s : span) best = std::min(best, words::weight(y ^ s));
      EXPECT_EQ(table[y], best);
      EXPECT_EQ(coset_distance(BitVector::from_word(n, y), fam).value, best);
    }
  }
}

TEST(CosetDistance, BoundedSearchIsUpperBound) {
  std::mt19937_64 rng(9);
  const auto gen = random_matrix(8, 16, rng);
  const CosetFamily capped(gen, 2);
  const CosetFamily full(gen);
  EXPECT_FALSE(capped.enumerable());
  for (int t = 0; t < 50; ++t) {
    const auto y = BitVector::from_word(16, rng() & low_mask(16));
    EXPECT_THROW(coset_distance(y, capped), Error);
    const auto approx = coset_distance(y, capped, 3);
    EXPECT_FALSE(approx.exact);
    EXPECT_GE(approx.value, coset_distance(y, full).value);
  }
}
