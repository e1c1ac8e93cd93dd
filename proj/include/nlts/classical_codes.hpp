#pragma once

// Binary linear codes, tensor and dual-tensor local codes, Tanner codes on
// graphs with ordered local views, and the robustness predicates on dual
// tensor codes.

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "nlts/error.hpp"
#include "nlts/gf2.hpp"
#include "nlts/graphs.hpp"

namespace nlts {

using gf2::BitMatrix;
using gf2::BitVector;

/// A subspace of F_2^n held as an independent generator list together with
/// an independent parity-check list for the same space.
class LinearCode {
 public:
  LinearCode() = default;

  /// Dependent rows are dropped; the surviving rows keep their input order.
  static LinearCode from_generator(const BitMatrix& g) {
    LinearCode c;
    c.generator_ = gf2::independent_rows(g);
    c.parity_ = BitMatrix::from_rows(gf2::kernel_basis(c.generator_), g.cols());
    return c;
  }

  static LinearCode from_parity(const BitMatrix& h) {
    LinearCode c;
    c.parity_ = gf2::independent_rows(h);
    c.generator_ = BitMatrix::from_rows(gf2::kernel_basis(c.parity_), h.cols());
    return c;
  }

  static LinearCode repetition(std::size_t n) {
    return from_generator(BitMatrix::from_rows({BitVector::ones(n)}, n));
  }

  /// Even-weight code of length n.
  static LinearCode parity(std::size_t n) { return from_parity(BitMatrix::from_rows({BitVector::ones(n)}, n)); }

  static LinearCode zero(std::size_t n) { return from_generator(BitMatrix(0, n)); }
  static LinearCode full(std::size_t n) { return from_generator(BitMatrix::identity(n)); }

  /// [2^r - 1, 2^r - 1 - r, 3] Hamming code; column j of the check matrix is
  /// the binary expansion of j + 1.
  static LinearCode hamming(std::size_t r = 3) { return from_parity(hamming_parity(r)); }

  static BitMatrix hamming_parity(std::size_t r = 3) {
    const std::size_t n = (std::size_t{1} << r) - 1;
    BitMatrix h(r, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < r; ++i)
        if (((j + 1) >> i) & 1U) h.set(i, j, true);
    return h;
  }

  std::size_t length() const noexcept { return generator_.cols(); }
  std::size_t dimension() const noexcept { return generator_.rows(); }
  const BitMatrix& generator() const noexcept { return generator_; }
  const BitMatrix& parity_check() const noexcept { return parity_; }

  LinearCode dual() const {
    LinearCode d;
    d.generator_ = parity_;
    d.parity_ = generator_;
    return d;
  }

  bool contains(const BitVector& v) const { return gf2::product(parity_, v).none(); }

  bool same_code(const LinearCode& other) const {
    return length() == other.length() && gf2::same_row_space(generator_, other.generator_);
  }

 private:
  BitMatrix generator_;
  BitMatrix parity_;
};

enum class Bound { Exact, Upper, Lower };

struct DistanceResult {
  std::optional<std::size_t> value;  // nullopt: no nonzero codeword (the zero code)
  Bound bound = Bound::Exact;
};

struct DistanceOptions {
  std::size_t enumeration_cap = 22;
  std::optional<std::size_t> search_radius;
};

/// Minimum nonzero weight. Exhaustive over the 2^k span when k is within
/// the cap. Otherwise, with a search radius r, scans all words of weight
/// <= r in increasing weight: a hit is exact, a miss yields the lower bound
/// r + 1.
inline DistanceResult min_distance(const LinearCode& c, const DistanceOptions& opts = {}) {
  if (c.dimension() == 0) return {std::nullopt, Bound::Exact};
  const auto& gen = c.generator();
  if (c.dimension() <= opts.enumeration_cap) {
    std::size_t best = c.length() + 1;
    BitVector cur(c.length());
    const std::size_t count = std::size_t{1} << c.dimension();
    for (std::size_t i = 1; i < count; ++i) {
      cur ^= gen.row(static_cast<std::size_t>(std::countr_zero(i)));
      best = std::min(best, cur.weight());
    }
    return {best, Bound::Exact};
  }
  if (!opts.search_radius) throw Error(Errc::CapExceeded, "code dimension exceeds enumeration cap");
  if (c.length() > gf2::kWordBits) throw Error(Errc::CapExceeded, "bounded search needs length <= 64");
  const auto checks = gf2::words::to_words(c.parity_check().row_vectors());
  std::optional<std::size_t> hit;
  gf2::words::for_each_weight_bounded(c.length(), *opts.search_radius, [&](gf2::Word w) {
    if (w == 0) return true;
    for (auto h : checks)
      if (std::popcount(h & w) & 1) return true;
    hit = gf2::words::weight(w);
    return false;
  });
  if (hit) return {hit, Bound::Exact};
  return {*opts.search_radius + 1, Bound::Lower};
}

// ---------------------------------------------------------------------------
// Tensor codes. Coordinate (a, b) of an n_A x n_B array sits at a * n_B + b;
// a indexes rows, b indexes columns.

inline BitVector tensor(const BitVector& x, const BitVector& y) {
  BitVector out(x.size() * y.size());
  for (auto a : x.support())
    for (auto b : y.support()) out.set(a * y.size() + b, true);
  return out;
}

inline LinearCode tensor_code(const LinearCode& ca, const LinearCode& cb) {
  std::vector<BitVector> rows;
  for (const auto& ga : ca.generator().row_vectors())
    for (const auto& gb : cb.generator().row_vectors()) rows.push_back(tensor(ga, gb));
  return LinearCode::from_generator(BitMatrix::from_rows(std::move(rows), ca.length() * cb.length()));
}

/// C_A (x) F_2^B + F_2^A (x) C_B.
inline LinearCode dual_tensor(const LinearCode& ca, const LinearCode& cb) {
  const std::size_t na = ca.length(), nb = cb.length();
  std::vector<BitVector> rows;
  for (const auto& ga : ca.generator().row_vectors())
    for (std::size_t j = 0; j < nb; ++j) rows.push_back(tensor(ga, BitVector::unit(nb, j)));
  for (std::size_t i = 0; i < na; ++i)
    for (const auto& gb : cb.generator().row_vectors()) rows.push_back(tensor(BitVector::unit(na, i), gb));
  return LinearCode::from_generator(BitMatrix::from_rows(std::move(rows), na * nb));
}

/// C_0 = C_A (x) C_B and C_1 = C_A^perp (x) C_B^perp with their duals.
struct LocalCodePair {
  LinearCode code_a;
  LinearCode code_b;
  LinearCode c0;
  LinearCode c1;
  LinearCode c0_dual;
  LinearCode c1_dual;

  LocalCodePair(LinearCode a, LinearCode b) : code_a(std::move(a)), code_b(std::move(b)) {
    if (code_a.length() != code_b.length())
      throw Error(Errc::LengthMismatch, "local codes have different lengths");
    c0 = tensor_code(code_a, code_b);
    c1 = tensor_code(code_a.dual(), code_b.dual());
    c0_dual = dual_tensor(code_a.dual(), code_b.dual());
    c1_dual = dual_tensor(code_a, code_b);
  }

  std::size_t delta() const noexcept { return code_a.length(); }
};

// ---------------------------------------------------------------------------
// Tanner codes

/// Parity checks of C(G, L): at every vertex, each row of L's parity-check
/// matrix is laid over that vertex's ordered edge view. All emitted rows are
/// kept, dependent or not.
struct TannerCode {
  BitMatrix parity;                 // emitted rows
  std::vector<Vertex> row_vertex;   // the vertex that emitted each row
  LinearCode code;
};

inline TannerCode tanner_code(const Graph& g, const LinearCode& local) {
  const auto& order = g.local_order();
  if (order.size() != g.vertex_count()) throw Error(Errc::DegreeMismatch, "graph has no local edge ordering");
  TannerCode t;
  t.parity = BitMatrix(0, g.edge_count());
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (order[v].size() != local.length())
      throw Error(Errc::DegreeMismatch, "vertex " + std::to_string(v) + " has view of size " +
                                            std::to_string(order[v].size()) + ", local code length " +
                                            std::to_string(local.length()));
    for (const auto& check : local.parity_check().row_vectors()) {
      BitVector row(g.edge_count());
      for (auto i : check.support()) row.flip(order[v][i]);
      t.parity.append_row(std::move(row));
      t.row_vertex.push_back(v);
    }
  }
  t.code = LinearCode::from_parity(t.parity);
  return t;
}

/// The word x read through the ordered view at v.
inline BitVector local_view(const Graph& g, Vertex v, const BitVector& x) {
  return x.restrict_to(g.local_order().at(v));
}

/// Membership by local views: every view lies in the local code.
inline bool tanner_member(const Graph& g, const LinearCode& local, const BitVector& x) {
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (!local.contains(local_view(g, v, x))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Robustness of dual tensor codes

/// Hypotheses of the weight-reduction claim: local distance kappa * Delta,
/// robustness weight Delta^{3/2 - lambda}, resistance to puncturing
/// Delta^gamma. w and p are the integer weight and puncturing parameters
/// handed to the checkers.
struct RobustnessParams {
  std::size_t w = 0;
  std::size_t p = 0;
  double kappa = 1.0;
  double lambda_exp = 0.25;
  double gamma_exp = 0.8;

  void validate() const {
    if (!(lambda_exp > 0 && lambda_exp < 0.5))
      throw Error(Errc::PreconditionFailed, "lambda must lie in (0, 1/2)");
    if (!(gamma_exp > 0.5 + lambda_exp && gamma_exp < 1))
      throw Error(Errc::PreconditionFailed, "gamma must lie in (1/2 + lambda, 1)");
    if (!(kappa > 0)) throw Error(Errc::PreconditionFailed, "kappa must be positive");
  }

  double robustness_weight(std::size_t delta) const {
    return std::pow(static_cast<double>(delta), 1.5 - lambda_exp);
  }
  double puncturing(std::size_t delta) const { return std::pow(static_cast<double>(delta), gamma_exp); }
};

/// True when the support of the n_a x n_b array x lies inside the union of
/// at most max_cols columns and at most max_rows rows.
inline bool covered_by_lines(const BitVector& x, std::size_t na, std::size_t nb, std::size_t max_cols,
                             std::size_t max_rows) {
  if (nb > 20) throw Error(Errc::CapExceeded, "line cover search needs n_B <= 20");
  const std::size_t col_subsets = std::size_t{1} << nb;
  for (std::size_t cols = 0; cols < col_subsets; ++cols) {
    if (static_cast<std::size_t>(std::popcount(cols)) > max_cols) continue;
    std::size_t rows_needed = 0;
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t b = 0; b < nb; ++b) {
        if (x.get(a * nb + b) && !((cols >> b) & 1U)) {
          ++rows_needed;
          break;
        }
      }
    }
    if (rows_needed <= max_rows) return true;
  }
  return false;
}

struct RobustnessOptions {
  std::size_t enumeration_cap = 22;  // on the code dimension
  std::size_t samples = 200000;
  std::uint64_t seed = 1;
  std::size_t max_witnesses = 16;
};

struct RobustnessReport {
  bool robust = true;
  bool exhaustive = true;
  std::size_t codewords_checked = 0;  // nonzero codewords of weight <= w
  std::vector<BitVector> violations;  // capped at max_witnesses
  std::size_t violation_count = 0;
};

namespace detail {

inline std::size_t line_budget(std::size_t weight, const DistanceResult& d) {
  if (!d.value) return 0;
  return weight / *d.value;
}

/// Scans codewords of `code` (an n_a x n_b dual-tensor-shaped code) of weight
/// <= w, judging line covers with distances d_a (columns) and d_b (rows).
inline RobustnessReport robustness_scan(const LinearCode& code, std::size_t na, std::size_t nb, std::size_t w,
                                        const DistanceResult& da, const DistanceResult& db,
                                        const RobustnessOptions& opts) {
  RobustnessReport rep;
  auto judge = [&](const BitVector& x) {
    const std::size_t wt = x.weight();
    if (wt == 0 || wt > w) return;
    ++rep.codewords_checked;
    if (!covered_by_lines(x, na, nb, line_budget(wt, da), line_budget(wt, db))) {
      rep.robust = false;
      ++rep.violation_count;
      if (rep.violations.size() < opts.max_witnesses) rep.violations.push_back(x);
    }
  };
  const auto& gen = code.generator();
  if (code.dimension() <= opts.enumeration_cap) {
    BitVector cur(code.length());
    const std::size_t count = std::size_t{1} << code.dimension();
    for (std::size_t i = 1; i < count; ++i) {
      cur ^= gen.row(static_cast<std::size_t>(std::countr_zero(i)));
      judge(cur);
    }
  } else {
    rep.exhaustive = false;
    std::mt19937_64 rng(opts.seed);
    for (std::size_t s = 0; s < opts.samples; ++s) {
      BitVector cur(code.length());
      for (std::size_t r = 0; r < gen.rows(); ++r)
        if (rng() & 1U) cur ^= gen.row(r);
      judge(cur);
    }
  }
  return rep;
}

}  // namespace detail

/// w-robustness of C_1^perp = C_A (x) F^B + F^A (x) C_B: each codeword x with
/// |x| <= w is supported on at most |x|/d_A columns plus |x|/d_B rows.
inline RobustnessReport robustness_check(const LocalCodePair& pair, std::size_t w, const RobustnessOptions& opts = {}) {
  const auto da = min_distance(pair.code_a), db = min_distance(pair.code_b);
  return detail::robustness_scan(pair.c1_dual, pair.code_a.length(), pair.code_b.length(), w, da, db, opts);
}

struct PunctureReport {
  bool resistant = true;
  bool exhaustive = true;
  std::size_t restrictions_checked = 0;
  std::optional<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> first_failure;  // (A', B')
  std::optional<BitVector> failure_witness;                                                     // punctured codeword
};

/// Re-runs the robustness scan on C_1^perp punctured to every A' x B' with
/// |A'|, |B'| >= Delta - p. Line budgets keep the unpunctured d_A, d_B.
inline PunctureReport puncture_resistance_check(const LocalCodePair& pair, std::size_t w, std::size_t p,
                                                const RobustnessOptions& opts = {}) {
  const std::size_t na = pair.code_a.length(), nb = pair.code_b.length();
  if (na > 16 || nb > 16) throw Error(Errc::CapExceeded, "puncturing enumeration needs Delta <= 16");
  const auto da = min_distance(pair.code_a), db = min_distance(pair.code_b);
  PunctureReport rep;
  auto subsets = [](std::size_t n, std::size_t min_size) {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
      if (static_cast<std::size_t>(std::popcount(m)) < min_size) continue;
      std::vector<std::size_t> s;
      for (std::size_t i = 0; i < n; ++i)
        if ((m >> i) & 1U) s.push_back(i);
      out.push_back(std::move(s));
    }
    return out;
  };
  const auto sa = subsets(na, na > p ? na - p : 0), sb = subsets(nb, nb > p ? nb - p : 0);
  for (const auto& ap : sa) {
    for (const auto& bp : sb) {
      ++rep.restrictions_checked;
      std::vector<std::size_t> coords;
      for (auto a : ap)
        for (auto b : bp) coords.push_back(a * nb + b);
      std::vector<BitVector> rows;
      for (const auto& g : pair.c1_dual.generator().row_vectors()) rows.push_back(g.restrict_to(coords));
      const auto punctured = LinearCode::from_generator(BitMatrix::from_rows(std::move(rows), coords.size()));
      auto r = detail::robustness_scan(punctured, ap.size(), bp.size(), w, da, db, opts);
      rep.exhaustive = rep.exhaustive && r.exhaustive;
      if (!r.robust && rep.resistant) {
        rep.resistant = false;
        rep.first_failure = std::make_pair(ap, bp);
        rep.failure_witness = r.violations.front();
      }
    }
  }
  return rep;
}

}  // namespace nlts
