#pragma once

// Approximate codewords G^delta, the ~ clustering, and the checks built on
// them: the clustering dichotomy, the Markov mass bound, non-concentration,
// spread certificates, weight reduction and the exceptional-vertex audit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "nlts/classical_codes.hpp"
#include "nlts/common.hpp"
#include "nlts/css.hpp"
#include "nlts/error.hpp"
#include "nlts/gf2.hpp"
#include "nlts/graphs.hpp"
#include "nlts/quantumsim.hpp"

namespace nlts {

using gf2::Word;

/// Largest integer count c with c <= delta * m.
inline std::size_t violation_budget(double delta, std::size_t m) {
  if (delta >= 1.0) return m;
  if (delta <= 0.0) return 0;
  return static_cast<std::size_t>(std::floor(delta * static_cast<double>(m) + 1e-9));
}

inline std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Number of words within Hamming distance r of a fixed word of length n.
inline std::uint64_t hamming_ball_volume(std::size_t n, std::size_t r) {
  std::uint64_t v = 0;
  for (std::size_t j = 0; j <= std::min(n, r); ++j) v += binomial(n, j);
  return v;
}

namespace detail {

/// Column syndromes of a check matrix packed into words, so that the
/// syndrome of a word y is the xor of the columns in its support.
class SyndromeTable {
 public:
  explicit SyndromeTable(const BitMatrix& h) : m_(h.rows()), stride_(gf2::words_for(h.rows())) {
    cols_.assign(h.cols() * stride_, 0);
    for (std::size_t i = 0; i < h.rows(); ++i)
      for (auto j : h.row(i).support()) cols_[j * stride_ + i / gf2::kWordBits] |= Word{1} << (i % gf2::kWordBits);
  }

  std::size_t stride() const noexcept { return stride_; }
  std::size_t checks() const noexcept { return m_; }

  void xor_column(std::vector<Word>& s, std::size_t j) const {
    for (std::size_t k = 0; k < stride_; ++k) s[k] ^= cols_[j * stride_ + k];
  }

  std::vector<Word> syndrome(Word y) const {
    std::vector<Word> s(stride_, 0);
    while (y) {
      xor_column(s, static_cast<std::size_t>(std::countr_zero(y)));
      y &= y - 1;
    }
    return s;
  }

  static std::size_t weight(const std::vector<Word>& s) {
    std::size_t w = 0;
    for (auto x : s) w += static_cast<std::size_t>(std::popcount(x));
    return w;
  }

 private:
  std::size_t m_;
  std::size_t stride_;
  std::vector<Word> cols_;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_;
};

inline gf2::words::WordBasis stabilizer_basis(const CssCode& code, Basis b) {
  return gf2::words::WordBasis(gf2::words::to_words(code.stabilizers_for(b).row_vectors()));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// G^delta

/// G_z^delta = {y : |H_z y| <= delta m_z}, or the X analogue with H_x.
struct ApproximateCodewordSet {
  Basis basis = Basis::Z;
  double delta = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t max_violations = 0;
  std::vector<Word> members;               // increasing
  std::vector<std::uint32_t> violations;   // |H y| per member
  bool exhaustive = true;
  std::size_t samples_drawn = 0;

  std::size_t size() const noexcept { return members.size(); }

  bool contains(Word y) const { return std::binary_search(members.begin(), members.end(), y); }
};

struct GDeltaOptions {
  std::size_t max_n = 26;        // exhaustive enumeration cap
  bool allow_sampling = true;    // above the cap, sample instead of failing
  std::size_t samples = 100000;
  std::size_t noise_weight = 2;  // sampled words are codewords plus up to this many flips
  std::uint64_t seed = 1;
};

/// Exhaustive (Gray-code walk with an incrementally updated syndrome) for
/// n <= max_n. Above the cap, samples random codewords of ker H plus sparse
/// noise and keeps those inside G^delta; the result is flagged non-exhaustive.
inline ApproximateCodewordSet enumerate_gdelta(const CssCode& code, Basis basis, double delta,
                                               const GDeltaOptions& opts = {}) {
  const auto& h = code.checks(basis);
  ApproximateCodewordSet set;
  set.basis = basis;
  set.delta = delta;
  set.n = code.n();
  set.m = h.rows();
  set.max_violations = violation_budget(delta, h.rows());
  const detail::SyndromeTable table(h);

  if (code.n() <= opts.max_n) {
    const std::size_t count = std::size_t{1} << code.n();
    std::vector<Word> s(table.stride(), 0);
    std::vector<std::pair<Word, std::uint32_t>> found;
    Word y = 0;
    for (std::size_t i = 0; i < count; ++i) {
      if (i > 0) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(i));
        y ^= Word{1} << bit;
        table.xor_column(s, bit);
      }
      const std::size_t w = detail::SyndromeTable::weight(s);
      if (w <= set.max_violations) found.emplace_back(y, static_cast<std::uint32_t>(w));
    }
    std::sort(found.begin(), found.end());
    for (const auto& [word, w] : found) {
      set.members.push_back(word);
      set.violations.push_back(w);
    }
    return set;
  }
  if (!opts.allow_sampling || code.n() > gf2::kWordBits)
    throw Error(Errc::CapExceeded, "G^delta enumeration needs n <= " + std::to_string(opts.max_n));

  set.exhaustive = false;
  const auto kernel = gf2::words::to_words(gf2::kernel_basis(h));
  std::mt19937_64 rng(opts.seed);
  std::map<Word, std::uint32_t> kept;
  for (std::size_t t = 0; t < opts.samples; ++t) {
    Word y = 0;
    for (auto k : kernel)
      if (rng() & 1U) y ^= k;
    const std::size_t flips = opts.noise_weight == 0 ? 0 : rng() % (opts.noise_weight + 1);
    for (std::size_t f = 0; f < flips; ++f) y ^= Word{1} << (rng() % code.n());
    const std::size_t w = detail::SyndromeTable::weight(table.syndrome(y));
    if (w <= set.max_violations) kept.emplace(y, static_cast<std::uint32_t>(w));
  }
  set.samples_drawn = opts.samples;
  for (const auto& [word, w] : kept) {
    set.members.push_back(word);
    set.violations.push_back(w);
  }
  return set;
}

struct XorClosureReport {
  std::size_t pairs = 0;  // unordered member pairs {x, y}, x = y allowed
  std::size_t violations = 0;
  std::size_t budget = 0;  // violation budget of G^{2 delta}
  std::optional<std::pair<Word, Word>> witness;
};

/// x, y in G^delta implies x xor y in G^{2 delta}. The syndrome of x xor y
/// is the xor of the two syndromes, so members are grouped by syndrome and
/// every pair of groups is checked once, which covers all member pairs.
inline XorClosureReport xor_closure_audit(const ApproximateCodewordSet& set, const CssCode& code) {
  const detail::SyndromeTable table(code.checks(set.basis));
  std::map<std::vector<Word>, std::pair<std::size_t, Word>> groups;  // syndrome -> (count, sample member)
  for (auto y : set.members) {
    auto& g = groups[table.syndrome(y)];
    if (g.first++ == 0) g.second = y;
  }
  XorClosureReport r;
  r.budget = violation_budget(2.0 * set.delta, set.m);
  std::vector<std::pair<const std::vector<Word>*, std::pair<std::size_t, Word>>> list;
  for (const auto& [s, g] : groups) list.emplace_back(&s, g);
  for (std::size_t i = 0; i < list.size(); ++i) {
    for (std::size_t j = i; j < list.size(); ++j) {
      std::vector<Word> s = *list[i].first;
      for (std::size_t k = 0; k < s.size(); ++k) s[k] ^= (*list[j].first)[k];
      const std::size_t ci = list[i].second.first, cj = list[j].second.first;
      const std::size_t pairs = i == j ? ci * (ci + 1) / 2 : ci * cj;
      r.pairs += pairs;
      if (detail::SyndromeTable::weight(s) > r.budget) {
        r.violations += pairs;
        if (!r.witness) r.witness = std::make_pair(list[i].second.second, list[j].second.second);
      }
    }
  }
  return r;
}

struct TriangleReport {
  std::size_t classes = 0;  // members modulo the stabilizer space
  std::size_t triples = 0;  // class triples checked
  bool exhaustive = true;
  std::size_t violations = 0;
  std::optional<std::array<Word, 3>> witness;
};

/// |x xor z|_S <= |x xor y|_S + |y xor z|_S over member triples, S the
/// stabilizer space for the set's basis. Coset distances are constant on
/// cosets of S, so triples are taken over coset representatives; that is
/// exhaustive over all member triples. Above max_triples, random triples.
inline TriangleReport triangle_audit(const ApproximateCodewordSet& set, const CssCode& code,
                                     std::size_t max_triples = std::size_t{1} << 28, std::uint64_t seed = 1) {
  const gf2::CosetFamily family(code.stabilizers_for(set.basis), code.n());
  const auto dist = gf2::coset_distance_table(family);
  const auto basis = detail::stabilizer_basis(code, set.basis);
  std::vector<Word> reps;
  for (auto y : set.members) reps.push_back(basis.reduce(y));
  std::sort(reps.begin(), reps.end());
  reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
  TriangleReport r;
  r.classes = reps.size();
  auto check = [&](Word x, Word y, Word z) {
    ++r.triples;
    if (dist[x ^ z] > dist[x ^ y] + dist[y ^ z]) {
      ++r.violations;
      if (!r.witness) r.witness = std::array<Word, 3>{x, y, z};
    }
  };
  const double c = static_cast<double>(reps.size());
  if (c * c * c <= static_cast<double>(max_triples)) {
    for (auto x : reps)
      for (auto y : reps)
        for (auto z : reps) check(x, y, z);
  } else {
    r.exhaustive = false;
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < max_triples; ++t)
      check(reps[rng() % reps.size()], reps[rng() % reps.size()], reps[rng() % reps.size()]);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Cluster decomposition

enum class ClusterStrategy { Pairwise, NeighborGeneration };

struct ClusterOptions {
  ClusterStrategy strategy = ClusterStrategy::Pairwise;
  bool distances = true;  // fill the inter-cluster distance matrices
};

/// Partition of G^delta under x ~ y iff |x xor y|_S <= threshold (the
/// closure of ~ when it is not transitive).
struct ClusterDecomposition {
  Basis basis = Basis::Z;
  std::size_t n = 0;
  std::size_t threshold = 0;
  std::vector<Word> members;
  std::vector<std::size_t> cluster_of;             // per member
  std::vector<std::vector<std::size_t>> clusters;  // member indices; ordered by first member
  std::size_t transitivity_violations = 0;         // same-cluster member pairs with distance > threshold
  std::optional<std::pair<Word, Word>> transitivity_witness;
  std::vector<std::vector<std::size_t>> hamming;   // min |x xor x'| between clusters
  std::vector<std::vector<std::size_t>> coset;     // min |x xor x'|_S between clusters
  std::optional<std::size_t> min_inter_hamming;
  std::optional<std::size_t> min_inter_coset;

  std::size_t count() const noexcept { return clusters.size(); }
  bool transitive() const noexcept { return transitivity_violations == 0; }

  std::vector<Word> words(std::size_t i) const {
    std::vector<Word> out;
    for (auto m : clusters.at(i)) out.push_back(members[m]);
    return out;
  }

  /// Lowest-weight member, smallest word on ties.
  Word representative(std::size_t i) const {
    Word best = members[clusters.at(i).front()];
    for (auto m : clusters[i]) {
      const Word w = members[m];
      if (std::popcount(w) < std::popcount(best) || (std::popcount(w) == std::popcount(best) && w < best)) best = w;
    }
    return best;
  }

  std::vector<double> masses(const MeasurementDistribution& d) const {
    std::vector<double> out;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      double s = 0;
      for (auto m : clusters[i]) s += d.p.at(members[m]);
      out.push_back(s);
    }
    return out;
  }
};

/// The cut 2 c1 eps1 n, rounded down.
inline std::size_t cluster_threshold(double c1, double eps1, std::size_t n) {
  return static_cast<std::size_t>(std::floor(2.0 * c1 * eps1 * static_cast<double>(n) + 1e-9));
}

namespace detail {

inline std::vector<std::vector<std::size_t>> hamming_pairwise(const ClusterDecomposition& d) {
  const std::size_t c = d.clusters.size();
  std::vector<std::vector<std::size_t>> out(c, std::vector<std::size_t>(c, std::numeric_limits<std::size_t>::max()));
  for (std::size_t i = 0; i < d.members.size(); ++i) {
    for (std::size_t j = i + 1; j < d.members.size(); ++j) {
      const auto a = d.cluster_of[i], b = d.cluster_of[j];
      if (a == b) continue;
      const auto w = static_cast<std::size_t>(std::popcount(d.members[i] ^ d.members[j]));
      out[a][b] = std::min(out[a][b], w);
      out[b][a] = out[a][b];
    }
  }
  for (std::size_t i = 0; i < c; ++i) out[i][i] = 0;
  return out;
}

/// One multi-source breadth-first search on the hypercube per cluster.
inline std::vector<std::vector<std::size_t>> hamming_bfs(const ClusterDecomposition& d) {
  const std::size_t c = d.clusters.size(), size = std::size_t{1} << d.n;
  std::vector<std::vector<std::size_t>> out(c, std::vector<std::size_t>(c, 0));
  std::vector<std::uint8_t> dist(size);
  std::vector<Word> frontier, next;
  for (std::size_t i = 0; i < c; ++i) {
    std::fill(dist.begin(), dist.end(), 0xFF);
    frontier.clear();
    for (auto m : d.clusters[i]) {
      dist[d.members[m]] = 0;
      frontier.push_back(d.members[m]);
    }
    std::uint8_t level = 0;
    while (!frontier.empty()) {
      ++level;
      next.clear();
      for (auto w : frontier) {
        for (std::size_t b = 0; b < d.n; ++b) {
          const Word u = w ^ (Word{1} << b);
          if (dist[u] == 0xFF) {
            dist[u] = level;
            next.push_back(u);
          }
        }
      }
      std::swap(frontier, next);
    }
    for (std::size_t j = 0; j < c; ++j) {
      if (j == i) continue;
      std::size_t best = std::numeric_limits<std::size_t>::max();
      for (auto m : d.clusters[j]) best = std::min<std::size_t>(best, dist[d.members[m]]);
      out[i][j] = best;
    }
  }
  return out;
}

}  // namespace detail

inline ClusterDecomposition cluster_decompose(const ApproximateCodewordSet& set, const CssCode& code,
                                              std::size_t threshold, const ClusterOptions& opts = {}) {
  if (!set.exhaustive && code.n() > 26)
    throw Error(Errc::CapExceeded, "clustering needs coset distance tables (n <= 26)");
  const gf2::CosetFamily family(code.stabilizers_for(set.basis), code.n());
  const auto dist = gf2::coset_distance_table(family);
  const auto basis = detail::stabilizer_basis(code, set.basis);

  ClusterDecomposition d;
  d.basis = set.basis;
  d.n = set.n;
  d.threshold = threshold;
  d.members = set.members;

  // Members modulo S: ~ only depends on the coset of each member.
  std::vector<Word> member_rep(set.members.size());
  for (std::size_t i = 0; i < set.members.size(); ++i) member_rep[i] = basis.reduce(set.members[i]);
  std::vector<Word> reps = member_rep;
  std::sort(reps.begin(), reps.end());
  reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
  auto class_of = [&](Word rep) {
    return static_cast<std::size_t>(std::lower_bound(reps.begin(), reps.end(), rep) - reps.begin());
  };

  detail::UnionFind uf(reps.size());
  if (opts.strategy == ClusterStrategy::Pairwise) {
    for (std::size_t i = 0; i < reps.size(); ++i)
      for (std::size_t j = i + 1; j < reps.size(); ++j)
        if (dist[reps[i] ^ reps[j]] <= threshold) uf.unite(i, j);
  } else {
    for (std::size_t i = 0; i < reps.size(); ++i) {
      gf2::words::for_each_weight_bounded(code.n(), threshold, [&](Word e) {
        const Word r = basis.reduce(reps[i] ^ e);
        const auto it = std::lower_bound(reps.begin(), reps.end(), r);
        if (it != reps.end() && *it == r) uf.unite(i, static_cast<std::size_t>(it - reps.begin()));
        return true;
      });
    }
  }

  std::vector<std::size_t> class_size(reps.size(), 0);
  std::vector<std::size_t> member_class(set.members.size());
  for (std::size_t i = 0; i < set.members.size(); ++i) {
    member_class[i] = class_of(member_rep[i]);
    ++class_size[member_class[i]];
  }
  std::map<std::size_t, std::size_t> root_to_cluster;
  d.cluster_of.resize(set.members.size());
  for (std::size_t i = 0; i < set.members.size(); ++i) {
    const auto root = uf.find(member_class[i]);
    auto [it, inserted] = root_to_cluster.emplace(root, d.clusters.size());
    if (inserted) d.clusters.emplace_back();
    d.cluster_of[i] = it->second;
    d.clusters[it->second].push_back(i);
  }
  std::vector<std::size_t> class_cluster(reps.size());
  for (std::size_t c = 0; c < reps.size(); ++c) class_cluster[c] = root_to_cluster.at(uf.find(c));

  // Transitivity audit and coset distances between clusters, class by class.
  const std::size_t nc = d.clusters.size();
  d.coset.assign(nc, std::vector<std::size_t>(nc, std::numeric_limits<std::size_t>::max()));
  for (std::size_t i = 0; i < reps.size(); ++i) {
    for (std::size_t j = i + 1; j < reps.size(); ++j) {
      const std::size_t dd = dist[reps[i] ^ reps[j]];
      const auto a = class_cluster[i], b = class_cluster[j];
      if (a == b) {
        if (dd > threshold) {
          d.transitivity_violations += class_size[i] * class_size[j];
          if (!d.transitivity_witness) d.transitivity_witness = std::make_pair(reps[i], reps[j]);
        }
      } else {
        d.coset[a][b] = std::min(d.coset[a][b], dd);
        d.coset[b][a] = d.coset[a][b];
      }
    }
  }
  for (std::size_t i = 0; i < nc; ++i) d.coset[i][i] = 0;

  if (opts.distances && nc > 1) {
    const double pairwise_cost = 0.5 * static_cast<double>(d.members.size()) * static_cast<double>(d.members.size());
    const double bfs_cost = static_cast<double>(nc) * std::ldexp(1.0, static_cast<int>(d.n)) * static_cast<double>(d.n);
    d.hamming = pairwise_cost <= bfs_cost || d.n > 26 ? detail::hamming_pairwise(d) : detail::hamming_bfs(d);
    for (std::size_t i = 0; i < nc; ++i) {
      for (std::size_t j = i + 1; j < nc; ++j) {
        d.min_inter_hamming = std::min(d.min_inter_hamming.value_or(d.hamming[i][j]), d.hamming[i][j]);
        d.min_inter_coset = std::min(d.min_inter_coset.value_or(d.coset[i][j]), d.coset[i][j]);
      }
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Clustering dichotomy

/// Widest empty interval between consecutive observed coset distances.
struct BestFit {
  std::size_t a = 0;                // largest distance on the low side
  std::optional<std::size_t> b;     // smallest distance on the high side; nullopt: one distance value only
  double c1 = 0;                    // a / (delta n); infinity when delta = 0 and a > 0
  std::optional<double> c2;         // b / n
};

inline BestFit best_fit(const std::map<std::size_t, std::size_t>& histogram, double delta, std::size_t n) {
  BestFit f;
  if (histogram.empty()) return f;
  std::vector<std::size_t> values;
  for (const auto& [v, c] : histogram) values.push_back(v);
  f.a = values.back();
  std::size_t widest = 0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (values[i + 1] - values[i] > widest) {
      widest = values[i + 1] - values[i];
      f.a = values[i];
      f.b = values[i + 1];
    }
  }
  const double dn = delta * static_cast<double>(n);
  f.c1 = f.a == 0 ? 0.0 : (dn > 0 ? static_cast<double>(f.a) / dn : std::numeric_limits<double>::infinity());
  if (f.b) f.c2 = static_cast<double>(*f.b) / static_cast<double>(n);
  return f;
}

struct Property1BasisReport {
  Basis basis = Basis::Z;
  std::size_t members = 0;
  std::map<std::size_t, std::size_t> histogram;  // coset distance -> multiplicity
  double low_cut = 0;                            // c1 delta n
  double high_cut = 0;                           // c2 n
  std::size_t violations = 0;
  std::vector<Word> witnesses;                   // first few violating words
  BestFit fit;
  bool passes() const noexcept { return violations == 0; }
};

struct Property1Report {
  double delta = 0;
  double c1 = 0;
  double c2 = 0;
  Property1BasisReport z;  // G_z^delta against C_x^perp
  Property1BasisReport x;  // G_x^delta against C_z^perp
  BestFit fit;             // over both profiles together
  bool passes() const noexcept { return z.passes() && x.passes(); }
};

struct Property1Options {
  std::size_t max_n = 26;
  std::size_t max_witnesses = 16;
};

inline Property1BasisReport property1_scan(const CssCode& code, Basis basis, double delta, double c1, double c2,
                                           const Property1Options& opts = {}) {
  if (code.n() > opts.max_n) throw Error(Errc::CapExceeded, "property check needs n <= " + std::to_string(opts.max_n));
  GDeltaOptions g;
  g.max_n = opts.max_n;
  g.allow_sampling = false;
  const auto set = enumerate_gdelta(code, basis, delta, g);
  const gf2::CosetFamily family(code.stabilizers_for(basis), code.n());
  const auto dist = gf2::coset_distance_table(family);
  Property1BasisReport r;
  r.basis = basis;
  r.members = set.size();
  const double n = static_cast<double>(code.n());
  r.low_cut = c1 * delta * n;
  r.high_cut = c2 * n;
  for (auto y : set.members) {
    const std::size_t dy = dist[y];
    ++r.histogram[dy];
    const double v = static_cast<double>(dy);
    if (v > r.low_cut + 1e-9 && v < r.high_cut - 1e-9) {
      ++r.violations;
      if (r.witnesses.size() < opts.max_witnesses) r.witnesses.push_back(y);
    }
  }
  r.fit = best_fit(r.histogram, delta, code.n());
  return r;
}

/// Either |y|_S <= c1 delta n or |y|_S >= c2 n, for every y in G^delta, in
/// both bases.
inline Property1Report property1_check(const CssCode& code, double delta, double c1, double c2,
                                       const Property1Options& opts = {}) {
  Property1Report r;
  r.delta = delta;
  r.c1 = c1;
  r.c2 = c2;
  r.z = property1_scan(code, Basis::Z, delta, c1, c2, opts);
  r.x = property1_scan(code, Basis::X, delta, c1, c2, opts);
  auto combined = r.z.histogram;
  for (const auto& [v, c] : r.x.histogram) combined[v] += c;
  r.fit = best_fit(combined, delta, code.n());
  return r;
}

/// Largest delta of an increasing grid such that the dichotomy holds with
/// (c1, c2) at it and at every smaller grid point; nullopt if it fails at
/// the first point.
inline std::optional<double> empirical_delta0(const CssCode& code, double c1, double c2,
                                              const std::vector<double>& grid, const Property1Options& opts = {}) {
  std::optional<double> best;
  for (double delta : grid) {
    if (!property1_check(code, delta, c1, c2, opts).passes()) break;
    best = delta;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Mass bounds

struct MassBoundReport {
  double epsilon = 0;
  double epsilon1 = 0;     // 200 n epsilon / min(m_x, m_z)
  double energy_z = 0;     // E_{D_z} |H_z y|
  double energy_x = 0;
  bool hypothesis = false; // energy <= epsilon n
  double mass_z = 0;       // D_z(G_z^{eps1})
  double mass_x = 0;
  double bound_z = 0;      // 1 - epsilon n / (eps1 m_z)
  double bound_x = 0;
  bool markov_z = true;    // mass_z >= bound_z (only asserted under the hypothesis)
  bool markov_x = true;
  bool high_mass = false;  // both masses >= 199/200
  bool holds = true;
};

inline MassBoundReport mass_bound_check(const MeasurementDistribution& dz, const MeasurementDistribution& dx,
                                        const CssCode& code, double epsilon, double tol = 1e-12) {
  const std::size_t mmin = std::min(code.m_x(), code.m_z());
  if (mmin == 0) throw Error(Errc::DegenerateCode, "mass bound needs m_x, m_z > 0");
  MassBoundReport r;
  const double n = static_cast<double>(code.n());
  r.epsilon = epsilon;
  r.epsilon1 = 200.0 * n * epsilon / static_cast<double>(mmin);
  const detail::SyndromeTable tz(code.hz()), tx(code.hx());
  const auto bz = violation_budget(r.epsilon1, code.m_z()), bx = violation_budget(r.epsilon1, code.m_x());
  for (std::size_t y = 0; y < dz.p.size(); ++y) {
    if (dz.p[y] != 0) {
      const auto w = detail::SyndromeTable::weight(tz.syndrome(y));
      r.energy_z += dz.p[y] * static_cast<double>(w);
      if (w <= bz) r.mass_z += dz.p[y];
    }
    if (dx.p[y] != 0) {
      const auto w = detail::SyndromeTable::weight(tx.syndrome(y));
      r.energy_x += dx.p[y] * static_cast<double>(w);
      if (w <= bx) r.mass_x += dx.p[y];
    }
  }
  r.hypothesis = r.energy_z + r.energy_x <= epsilon * n * (1 + tol) + tol;
  if (r.epsilon1 > 0) {
    r.bound_z = 1.0 - epsilon * n / (r.epsilon1 * static_cast<double>(code.m_z()));
    r.bound_x = 1.0 - epsilon * n / (r.epsilon1 * static_cast<double>(code.m_x()));
  } else {
    r.bound_z = r.bound_x = -std::numeric_limits<double>::infinity();
  }
  r.markov_z = r.mass_z >= r.bound_z - 1e-12;
  r.markov_x = r.mass_x >= r.bound_x - 1e-12;
  r.high_mass = r.mass_z >= 199.0 / 200.0 - 1e-12 && r.mass_x >= 199.0 / 200.0 - 1e-12;
  r.holds = !r.hypothesis || (r.markov_z && r.markov_x && r.high_mass);
  return r;
}

// ---------------------------------------------------------------------------
// Non-concentration

struct ClusterSizeAudit {
  std::size_t clusters = 0;
  std::size_t literal_violations = 0;      // |B| > 2^r binom(n, threshold)
  std::size_t volume_violations = 0;       // |B| > 2^r V(n, threshold)
  std::size_t exponential_violations = 0;  // 2^r V(n, threshold) > 2^r 2^{2 sqrt(threshold/n) n}
  std::size_t largest = 0;
};

/// Sizes of the clusters against the counting bound; r is r_x for Z-basis
/// clusters (the stabilizer space C_x^perp has 2^{r_x} elements) and r_z for
/// X-basis clusters.
inline ClusterSizeAudit cluster_size_audit(const ClusterDecomposition& d, const CssCode& code) {
  ClusterSizeAudit a;
  const std::size_t r = d.basis == Basis::Z ? code.r_x() : code.r_z();
  const long double stab = std::ldexp(1.0L, static_cast<int>(r));
  const long double literal = stab * static_cast<long double>(binomial(d.n, d.threshold));
  const long double volume = stab * static_cast<long double>(hamming_ball_volume(d.n, d.threshold));
  const long double beta = static_cast<long double>(d.threshold) / static_cast<long double>(d.n);
  const long double expo = stab * std::pow(2.0L, 2.0L * std::sqrt(beta) * static_cast<long double>(d.n));
  for (const auto& c : d.clusters) {
    ++a.clusters;
    const auto size = static_cast<long double>(c.size());
    a.largest = std::max(a.largest, c.size());
    if (size > literal) ++a.literal_violations;
    if (size > volume) ++a.volume_violations;
  }
  if (volume > expo * (1 + 1e-15L)) a.exponential_violations = 1;
  return a;
}

struct BinomialAudit {
  std::size_t cases = 0;
  std::size_t binomial_violations = 0;  // binom(n, floor(beta n)) > 2^{2 sqrt(beta) n}
  std::size_t volume_violations = 0;    // V(n, floor(beta n)) > 2^{2 sqrt(beta) n}
  double min_log2_slack = std::numeric_limits<double>::infinity();
};

inline BinomialAudit binomial_audit(std::size_t n_max, const std::vector<double>& betas) {
  BinomialAudit a;
  for (std::size_t n = 1; n <= n_max; ++n) {
    for (double beta : betas) {
      ++a.cases;
      const auto j = static_cast<std::size_t>(std::floor(beta * static_cast<double>(n) + 1e-9));
      const long double rhs_log2 = 2.0L * std::sqrt(static_cast<long double>(beta)) * static_cast<long double>(n);
      const long double b = std::log2(static_cast<long double>(binomial(n, j)));
      const long double v = std::log2(static_cast<long double>(hamming_ball_volume(n, j)));
      if (b > rhs_log2 + 1e-12L) ++a.binomial_violations;
      if (v > rhs_log2 + 1e-12L) ++a.volume_violations;
      a.min_log2_slack = std::min(a.min_log2_slack, static_cast<double>(rhs_log2 - b));
    }
  }
  return a;
}

enum class HypothesisStatus { Met, Unmet };

struct Lemma1Report {
  HypothesisStatus hypothesis = HypothesisStatus::Unmet;  // 2 c1 eps1 <= ((k - 1) / 4n)^2
  double lhs = 0;
  double rhs = 0;
  double max_mass_z = 0;
  double max_mass_x = 0;
  bool dichotomy = false;  // all Z masses < 99/100 or all X masses < 99/100
  ClusterSizeAudit size_z;
  ClusterSizeAudit size_x;
  bool holds() const noexcept { return hypothesis == HypothesisStatus::Unmet || dichotomy; }
};

inline Lemma1Report lemma1_check(const MeasurementDistribution& dz, const MeasurementDistribution& dx,
                                 const ClusterDecomposition& bz, const ClusterDecomposition& bx, const CssCode& code,
                                 double c1, double eps1) {
  Lemma1Report r;
  const double n = static_cast<double>(code.n());
  r.lhs = 2.0 * c1 * eps1;
  const double q = (static_cast<double>(code.k()) - 1.0) / (4.0 * n);
  r.rhs = q * q;
  r.hypothesis = code.k() >= 1 && r.lhs <= r.rhs ? HypothesisStatus::Met : HypothesisStatus::Unmet;
  for (double m : bz.masses(dz)) r.max_mass_z = std::max(r.max_mass_z, m);
  for (double m : bx.masses(dx)) r.max_mass_x = std::max(r.max_mass_x, m);
  r.dichotomy = r.max_mass_z < 0.99 || r.max_mass_x < 0.99;
  r.size_z = cluster_size_audit(bz, code);
  r.size_x = cluster_size_audit(bx, code);
  return r;
}

// ---------------------------------------------------------------------------
// Spread certificates

struct SpreadCertificate {
  std::vector<std::size_t> m;        // cluster indices in M
  std::vector<std::size_t> m_prime;  // the remaining clusters
  double mass_m = 0;
  double mass_m_prime = 0;
  std::optional<std::size_t> separation;  // min distance across the cut
  double mu = 0;                          // min(mass_m, mass_m_prime)
  std::optional<double> depth_bound;
  bool valid = false;                     // both masses >= 1/400
};

/// Adds clusters in index order to M until its mass exceeds 1/400; M' is
/// everything else. distances, when given, is an inter-cluster distance
/// matrix used for the separation and the implied depth bound.
inline SpreadCertificate spread_certificate(const std::vector<double>& masses,
                                            const std::vector<std::vector<std::size_t>>* distances = nullptr,
                                            std::size_t n = 0) {
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  const double largest = masses.empty() ? 0.0 : *std::max_element(masses.begin(), masses.end());
  if (largest >= 0.99) throw Error(Errc::PreconditionFailed, "one cluster holds mass >= 99/100");
  if (total < 199.0 / 200.0 - 1e-12) throw Error(Errc::PreconditionFailed, "clustered mass below 199/200");
  SpreadCertificate c;
  std::size_t i = 0;
  for (; i < masses.size() && !(c.mass_m > 1.0 / 400.0); ++i) {
    c.m.push_back(i);
    c.mass_m += masses[i];
  }
  for (; i < masses.size(); ++i) {
    c.m_prime.push_back(i);
    c.mass_m_prime += masses[i];
  }
  c.mu = std::min(c.mass_m, c.mass_m_prime);
  c.valid = c.mass_m >= 1.0 / 400.0 && c.mass_m_prime >= 1.0 / 400.0 - 1e-12;
  if (distances && !c.m_prime.empty()) {
    std::size_t u = std::numeric_limits<std::size_t>::max();
    for (auto a : c.m)
      for (auto b : c.m_prime) u = std::min(u, (*distances)[a][b]);
    c.separation = u;
    if (n > 0 && c.mu > 0 && c.mu < 1 && u > 0)
      c.depth_bound = depth_lower_bound(static_cast<double>(u), static_cast<double>(n), c.mu);
  }
  return c;
}

inline SpreadCertificate spread_certificate(const ClusterDecomposition& d, const MeasurementDistribution& dist) {
  return spread_certificate(d.masses(dist), d.hamming.empty() ? nullptr : &d.hamming, d.n);
}

// ---------------------------------------------------------------------------
// Weight reduction

struct ReductionResult {
  std::size_t original_weight = 0;
  std::size_t reduced_weight = 0;
  std::optional<BitVector> reducer;  // y with |x xor y| = reduced_weight < original_weight
  bool exhaustive = false;           // the whole stabilizer span was searched
};

struct ReductionOptions {
  std::size_t exhaustive_rank_cap = 20;
  std::optional<double> delta;  // when set, x must lie in G^delta
};

/// Looks for y in the stabilizer space of the opposite checks (C_z^perp for
/// an X-basis word, C_x^perp for a Z-basis word) with |x xor y| < |x|:
/// combinations of up to `budget` check rows, and the full span when its
/// rank is within the cap. Returns the best reducer found.
inline ReductionResult weight_reduction_search(const BitVector& x, const CssCode& code, Basis basis,
                                               std::size_t budget, const ReductionOptions& opts = {}) {
  if (x.size() != code.n()) throw Error(Errc::DimensionMismatch, "word length differs from n");
  if (opts.delta && code.syndrome(basis, x).weight() > violation_budget(*opts.delta, code.m(basis)))
    throw Error(Errc::PreconditionFailed, "word is not in G^delta");
  const auto& rows = code.stabilizers_for(basis);
  ReductionResult r;
  r.original_weight = r.reduced_weight = x.weight();
  BitVector best_y(code.n());
  auto consider = [&](const BitVector& y) {
    const auto w = (x ^ y).weight();
    if (w < r.reduced_weight) {
      r.reduced_weight = w;
      best_y = y;
      r.reducer = y;
    }
  };
  std::vector<std::size_t> idx;
  BitVector cur(code.n());
  auto recurse = [&](auto&& self, std::size_t start) -> void {
    if (idx.size() == budget) return;
    for (std::size_t i = start; i < rows.rows(); ++i) {
      cur ^= rows.row(i);
      idx.push_back(i);
      consider(cur);
      self(self, i + 1);
      idx.pop_back();
      cur ^= rows.row(i);
    }
  };
  recurse(recurse, 0);
  const auto echelon = gf2::row_echelon(rows);
  if (echelon.rank() <= opts.exhaustive_rank_cap) {
    r.exhaustive = true;
    BitVector y(code.n());
    const std::size_t count = std::size_t{1} << echelon.rank();
    for (std::size_t i = 1; i < count; ++i) {
      y ^= echelon.rows[static_cast<std::size_t>(std::countr_zero(i))];
      consider(y);
    }
  }
  return r;
}

struct IteratedReduction {
  BitVector final_word;
  BitVector total_shift;          // sum of all reducers applied
  std::vector<std::size_t> weights;  // weight after each step, starting with |x|
};

/// Applies weight_reduction_search until no reducer is found.
inline IteratedReduction iterated_reduction(const BitVector& x, const CssCode& code, Basis basis, std::size_t budget,
                                            std::size_t max_steps = 1000, const ReductionOptions& opts = {}) {
  IteratedReduction out{x, BitVector(x.size()), {x.weight()}};
  for (std::size_t s = 0; s < max_steps; ++s) {
    const auto r = weight_reduction_search(out.final_word, code, basis, budget, opts);
    if (!r.reducer) break;
    out.final_word ^= *r.reducer;
    out.total_shift ^= *r.reducer;
    out.weights.push_back(out.final_word.weight());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Constants of the formal statement and the exceptional-vertex audit

struct NltsConstants {
  double c1 = 0;
  double c2 = 0;
  double delta0 = 0;
  double epsilon = 0;
  double epsilon1 = 0;
};

/// c1 = Delta^{3 - 2 lambda} / 256, c2 = kappa Delta^{1/2 - lambda} / 16 *
/// |V1| / n and delta0 = c2 n / (c1 max(m_x, m_z)), the largest delta0 with
/// c1 delta0 m <= c2 n on both sides.
inline NltsConstants claim1_constants(const RobustnessParams& params, std::size_t delta, const CssCode& code,
                                      std::size_t v1_count) {
  params.validate();
  NltsConstants c;
  const double d = static_cast<double>(delta), n = static_cast<double>(code.n());
  c.c1 = std::pow(d, 3.0 - 2.0 * params.lambda_exp) / 256.0;
  c.c2 = params.kappa * std::pow(d, 0.5 - params.lambda_exp) / 16.0 * static_cast<double>(v1_count) / n;
  const double mmax = static_cast<double>(std::max(code.m_x(), code.m_z()));
  c.delta0 = mmax > 0 ? c.c2 * n / (c.c1 * mmax) : std::numeric_limits<double>::infinity();
  return c;
}

struct ExceptionalReport {
  std::vector<Vertex> s;         // vertices of g1 touched by x
  std::vector<Vertex> s_e;       // exceptional vertices
  std::vector<std::size_t> degree;  // degree in the x-induced subgraph, per vertex of s
  double degree_cut = 0;         // Delta^{3/2 - lambda}
  std::size_t high_degree = 0;
  std::size_t violated = 0;      // local view outside C_1^perp
  double delta = 0;
  double eq1_rhs = 0;            // 256 |S| / Delta^{1 - 2 lambda} + 2 delta m_x
  bool eq1_holds = true;
};

/// For an X-basis word x on the faces: S is the set of (h,-) vertices whose
/// local view meets x, and S_e the members of S with x-degree at least
/// Delta^{3/2 - lambda} or with a local view outside C_1^perp. delta defaults
/// to the violated fraction of X checks.
inline ExceptionalReport exceptional_vertices(const BitVector& x, const QuantumTannerCode& q, const LocalCodePair& pair,
                                              const RobustnessParams& params, std::optional<double> delta = {}) {
  params.validate();
  const auto& g1 = q.squares.g1;
  if (x.size() != g1.edge_count()) throw Error(Errc::DimensionMismatch, "word length differs from face count");
  ExceptionalReport r;
  const double d = static_cast<double>(pair.delta());
  r.degree_cut = std::pow(d, 1.5 - params.lambda_exp);
  for (Vertex v = 0; v < g1.vertex_count(); ++v) {
    std::size_t deg = 0;
    for (auto e : g1.incident(v))
      if (x.get(e)) ++deg;
    if (deg == 0) continue;
    r.s.push_back(v);
    r.degree.push_back(deg);
    const bool heavy = static_cast<double>(deg) >= r.degree_cut;
    const bool bad = !pair.c1_dual.contains(local_view(g1, v, x));
    r.high_degree += heavy ? 1 : 0;
    r.violated += bad ? 1 : 0;
    if (heavy || bad) r.s_e.push_back(v);
  }
  const auto mx = q.code.m_x();
  r.delta = delta.value_or(mx > 0 ? static_cast<double>(gf2::product(q.code.hx(), x).weight()) / static_cast<double>(mx)
                                  : 0.0);
  r.eq1_rhs = 256.0 * static_cast<double>(r.s.size()) / std::pow(d, 1.0 - 2.0 * params.lambda_exp) +
              2.0 * r.delta * static_cast<double>(mx);
  r.eq1_holds = static_cast<double>(r.s_e.size()) <= r.eq1_rhs + 1e-9;
  return r;
}

// ---------------------------------------------------------------------------
// Small-set expansion implies the classical dichotomy

struct Lemma3Report {
  ExpansionReport expansion;
  std::size_t degree = 0;
  bool applicable = false;  // exhaustive expansion check passed with gamma < 1/2
  std::size_t words_checked = 0;
  std::size_t violations = 0;  // y with |y| < alpha n and |H y| < (1 - 2 gamma) d |y|
  std::optional<Word> witness;
};

/// Runs the (gamma, alpha) expansion check on the interaction graph of h
/// (variables on the left) and, when it passes, checks |H y| >= (1 - 2 gamma)
/// d |y| for every y with 0 < |y| < alpha n.
inline Lemma3Report lemma3_check(const BitMatrix& h, double gamma, double alpha, const ExpansionOptions& opts = {}) {
  Lemma3Report r;
  const auto graph = interaction_graph(h);
  r.expansion = small_set_expansion_check(graph, h.cols(), gamma, alpha, opts);
  r.degree = bipartite_view(graph, h.cols()).left_degree;
  r.applicable = r.expansion.expanding && r.expansion.exhaustive && gamma < 0.5;
  if (!r.applicable) return r;
  if (h.cols() > gf2::kWordBits) throw Error(Errc::CapExceeded, "syndrome check needs n <= 64");
  const detail::SyndromeTable table(h);
  const double an = alpha * static_cast<double>(h.cols());
  const auto max_w = static_cast<std::size_t>(std::ceil(an - 1e-12)) == 0 ? 0 : static_cast<std::size_t>(std::ceil(an - 1e-12)) - 1;
  gf2::words::for_each_weight_bounded(h.cols(), max_w, [&](Word y) {
    if (y == 0) return true;
    ++r.words_checked;
    const double wy = static_cast<double>(std::popcount(y));
    const double s = static_cast<double>(detail::SyndromeTable::weight(table.syndrome(y)));
    if (s + 1e-12 < (1.0 - 2.0 * gamma) * static_cast<double>(r.degree) * wy) {
      ++r.violations;
      if (!r.witness) r.witness = y;
    }
    return true;
  });
  return r;
}

}  // namespace nlts
