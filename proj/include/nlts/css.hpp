#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlts/classical_codes.hpp"
#include "nlts/common.hpp"
#include "nlts/error.hpp"
#include "nlts/gf2.hpp"
#include "nlts/graphs.hpp"

namespace nlts {

/// Raised by CssCode::create when some X-check and Z-check overlap oddly.
class NotOrthogonalError : public Error {
 public:
  NotOrthogonalError(std::size_t x_row, std::size_t z_row)
      : Error(Errc::NotOrthogonal, "X-check row " + std::to_string(x_row) + " and Z-check row " +
                                       std::to_string(z_row) + " have odd overlap"),
        x_row_(x_row),
        z_row_(z_row) {}

  std::pair<std::size_t, std::size_t> witness() const noexcept { return {x_row_, z_row_}; }

 private:
  std::size_t x_row_;
  std::size_t z_row_;
};

/// First (x_row, z_row) pair with odd overlap, if any.
inline std::optional<std::pair<std::size_t, std::size_t>> odd_overlap(const BitMatrix& hx, const BitMatrix& hz) {
  for (std::size_t i = 0; i < hx.rows(); ++i)
    for (std::size_t j = 0; j < hz.rows(); ++j)
      if (hx.row(i).dot(hz.row(j))) return std::make_pair(i, j);
  return std::nullopt;
}

/// A CSS code. C_z = ker H_z and C_x = ker H_x, with rowspace(H_x) =
/// C_x^perp inside C_z.
class CssCode {
 public:
  static CssCode create(BitMatrix hx, BitMatrix hz) {
    if (hx.cols() != hz.cols())
      throw Error(Errc::DimensionMismatch, "H_x has " + std::to_string(hx.cols()) + " columns, H_z has " +
                                               std::to_string(hz.cols()));
    if (auto w = odd_overlap(hx, hz)) throw NotOrthogonalError(w->first, w->second);
    CssCode c;
    c.hx_ = std::move(hx);
    c.hz_ = std::move(hz);
    c.rx_ = gf2::rank(c.hx_);
    c.rz_ = gf2::rank(c.hz_);
    return c;
  }

  const BitMatrix& hx() const noexcept { return hx_; }
  const BitMatrix& hz() const noexcept { return hz_; }
  const BitMatrix& checks(Basis b) const noexcept { return b == Basis::X ? hx_ : hz_; }

  std::size_t n() const noexcept { return hx_.cols(); }
  std::size_t k() const noexcept { return n() - rx_ - rz_; }
  std::size_t m_x() const noexcept { return hx_.rows(); }
  std::size_t m_z() const noexcept { return hz_.rows(); }
  std::size_t r_x() const noexcept { return rx_; }
  std::size_t r_z() const noexcept { return rz_; }
  std::size_t m(Basis b) const noexcept { return b == Basis::X ? m_x() : m_z(); }
  std::size_t r(Basis b) const noexcept { return b == Basis::X ? r_x() : r_z(); }

  /// Largest check-row weight over both matrices.
  std::size_t locality() const { return std::max(hx_.max_row_weight(), hz_.max_row_weight()); }

  LinearCode c_z() const { return LinearCode::from_parity(hz_); }
  LinearCode c_x() const { return LinearCode::from_parity(hx_); }
  LinearCode c_x_perp() const { return LinearCode::from_generator(hx_); }
  LinearCode c_z_perp() const { return LinearCode::from_generator(hz_); }

  /// The checks that define G^delta in basis b, and the stabilizer space
  /// that the coset distance is taken against: H_z with C_x^perp for Z, H_x
  /// with C_z^perp for X.
  const BitMatrix& stabilizers_for(Basis b) const noexcept { return b == Basis::Z ? hx_ : hz_; }

  BitVector syndrome(Basis b, const BitVector& v) const { return gf2::product(checks(b), v); }

 private:
  BitMatrix hx_;
  BitMatrix hz_;
  std::size_t rx_ = 0;
  std::size_t rz_ = 0;
};

struct CssDistance {
  DistanceResult d_x;  // min weight over C_x minus C_z^perp
  DistanceResult d_z;  // min weight over C_z minus C_x^perp
  DistanceResult d;
};

struct CssDistanceOptions {
  std::size_t exhaustive_max_n = 26;
  std::optional<std::size_t> search_radius;
};

namespace detail {

/// Scans words in increasing weight for one that passes the checks h and
/// lies outside rowspace(stab). Returns the first hit's weight.
inline DistanceResult logical_weight(const BitMatrix& h, const BitMatrix& stab, std::size_t n, std::size_t max_weight,
                                     bool exhaustive) {
  const auto checks = gf2::words::to_words(gf2::independent_rows(h).row_vectors());
  const gf2::words::WordBasis stabilizers(gf2::words::to_words(stab.row_vectors()));
  std::optional<std::size_t> hit;
  gf2::words::for_each_weight_bounded(n, max_weight, [&](gf2::Word w) {
    if (w == 0) return true;
    for (auto c : checks)
      if (std::popcount(c & w) & 1) return true;
    if (stabilizers.contains(w)) return true;
    hit = gf2::words::weight(w);
    return false;
  });
  if (hit) return {hit, Bound::Exact};
  if (exhaustive) return {std::nullopt, Bound::Exact};
  return {max_weight + 1, Bound::Lower};
}

/// Minimum of two distance results; the smaller value keeps its bound kind.
inline DistanceResult min_result(const DistanceResult& a, const DistanceResult& b) {
  if (!a.value) return b;
  if (!b.value) return a;
  if (*a.value != *b.value) return *a.value < *b.value ? a : b;
  return {a.value, a.bound == Bound::Exact || b.bound == Bound::Exact ? Bound::Exact : a.bound};
}

}  // namespace detail

/// d_x, d_z and d = min(d_x, d_z). Exact when n <= exhaustive_max_n; with a
/// search radius r and larger n, a miss gives the lower bound r + 1. A code
/// with k = 0 has no logicals and reports nullopt.
inline CssDistance css_distance(const CssCode& c, const CssDistanceOptions& opts = {}) {
  CssDistance out;
  if (c.k() == 0) return out;
  const bool exhaustive = c.n() <= opts.exhaustive_max_n;
  if (!exhaustive && (!opts.search_radius || c.n() > gf2::kWordBits))
    throw Error(Errc::CapExceeded, "css distance needs n <= " + std::to_string(opts.exhaustive_max_n) +
                                       " or a search radius with n <= 64");
  const std::size_t radius = exhaustive ? c.n() : *opts.search_radius;
  out.d_z = detail::logical_weight(c.hz(), c.hx(), c.n(), radius, exhaustive);
  out.d_x = detail::logical_weight(c.hx(), c.hz(), c.n(), radius, exhaustive);
  out.d = detail::min_result(out.d_x, out.d_z);
  return out;
}

// ---------------------------------------------------------------------------
// Quantum Tanner codes

struct QuantumTannerCode {
  CssCode code;
  SquareGraphs squares;
  std::vector<Vertex> x_row_vertex;  // V1 vertex (as an index of g1) behind each H_x row
  std::vector<Vertex> z_row_vertex;  // V0 vertex (as an index of g0) behind each H_z row
};

/// H_z: for each (g,+), the generator rows of C_0 laid over its local view
/// (checks of the Tanner code C(G0, C_0^perp)). H_x: for each (h,-), the
/// generator rows of C_1 (checks of C(G1, C_1^perp)). Qubit i is face i.
inline QuantumTannerCode quantum_tanner(const BalancedProductComplex& x, const LocalCodePair& pair) {
  if (pair.delta() != x.delta())
    throw Error(Errc::DegreeMismatch, "local codes have length " + std::to_string(pair.delta()) + ", Delta is " +
                                          std::to_string(x.delta()));
  auto squares = square_graphs(x);
  auto tz = tanner_code(squares.g0, pair.c0.dual());
  auto tx = tanner_code(squares.g1, pair.c1.dual());
  if (auto w = odd_overlap(tx.parity, tz.parity)) {
    throw Error(Errc::OrthogonalityFailure, "X-check at (" + std::to_string(tx.row_vertex[w->first]) +
                                                ",-) and Z-check at (" + std::to_string(tz.row_vertex[w->second]) +
                                                ",+) overlap oddly");
  }
  QuantumTannerCode q{CssCode::create(tx.parity, tz.parity), std::move(squares), std::move(tx.row_vertex),
                      std::move(tz.row_vertex)};
  return q;
}

}  // namespace nlts
