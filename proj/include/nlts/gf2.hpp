#pragma once

// Packed linear algebra over F_2.
//
// Bit i of a BitVector lives in word i / 64 at position i % 64. Bits past
// size() in the last word are always zero; every mutating operation keeps
// that invariant so weight() and comparisons can work word-at-a-time.

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlts/error.hpp"

namespace nlts::gf2 {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

constexpr Word low_mask(std::size_t bits) {
  return bits >= kWordBits ? ~Word{0} : ((Word{1} << bits) - 1);
}

class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t length) : length_(length), words_(words_for(length), 0) {}

  static BitVector from_word(std::size_t length, Word w) {
    if (length > kWordBits) throw Error(Errc::DimensionMismatch, "from_word needs length <= 64");
    BitVector v(length);
    if (length > 0) v.words_[0] = w & low_mask(length);
    return v;
  }

  static BitVector unit(std::size_t length, std::size_t i) {
    BitVector v(length);
    v.set(i, true);
    return v;
  }

  static BitVector ones(std::size_t length) {
    BitVector v(length);
    for (auto& w : v.words_) w = ~Word{0};
    v.trim();
    return v;
  }

  /// Parses a string of '0'/'1' characters; bit i is character i.
  static BitVector from_string(std::string_view text) {
    BitVector v(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '1') {
        v.set(i, true);
      } else if (text[i] != '0') {
        throw Error(Errc::ParseError, "bit literal contains '" + std::string(1, text[i]) + "'");
      }
    }
    return v;
  }

  static BitVector from_support(std::size_t length, std::span<const std::size_t> support) {
    BitVector v(length);
    for (auto i : support) v.set(i, true);
    return v;
  }

  std::size_t size() const noexcept { return length_; }
  bool empty() const noexcept { return length_ == 0; }

  bool get(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }

  void set(std::size_t i, bool value) {
    check_index(i);
    const Word bit = Word{1} << (i % kWordBits);
    if (value) {
      words_[i / kWordBits] |= bit;
    } else {
      words_[i / kWordBits] &= ~bit;
    }
  }

  void flip(std::size_t i) {
    check_index(i);
    words_[i / kWordBits] ^= Word{1} << (i % kWordBits);
  }

  std::size_t weight() const noexcept {
    std::size_t w = 0;
    for (auto word : words_) w += static_cast<std::size_t>(std::popcount(word));
    return w;
  }

  bool none() const noexcept {
    return std::all_of(words_.begin(), words_.end(), [](Word w) { return w == 0; });
  }
  bool any() const noexcept { return !none(); }

  /// Inner product over F_2: parity of the overlap.
  bool dot(const BitVector& other) const {
    require_same_length(other);
    Word acc = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) acc ^= words_[i] & other.words_[i];
    return std::popcount(acc) & 1;
  }

  std::size_t overlap(const BitVector& other) const {
    require_same_length(other);
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      c += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
    return c;
  }

  BitVector& operator^=(const BitVector& other) {
    require_same_length(other);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
    return *this;
  }

  BitVector& operator&=(const BitVector& other) {
    require_same_length(other);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
    return *this;
  }

  friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
  friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }

  Word to_word() const {
    if (length_ > kWordBits) throw Error(Errc::DimensionMismatch, "to_word needs length <= 64");
    return words_.empty() ? 0 : words_[0];
  }

  std::span<const Word> words() const noexcept { return words_; }

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> out;
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      Word w = words_[wi];
      while (w != 0) {
        out.push_back(wi * kWordBits + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
    return out;
  }

  std::string to_string() const {
    std::string s(length_, '0');
    for (std::size_t i = 0; i < length_; ++i)
      if (get(i)) s[i] = '1';
    return s;
  }

  /// Restriction to the listed coordinates, in the order given.
  BitVector restrict_to(std::span<const std::size_t> coords) const {
    BitVector out(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i)
      if (get(coords[i])) out.set(i, true);
    return out;
  }

  friend bool operator==(const BitVector&, const BitVector&) = default;
  friend auto operator<=>(const BitVector& a, const BitVector& b) {
    if (auto c = a.length_ <=> b.length_; c != 0) return c;
    return a.words_ <=> b.words_;
  }

 private:
  void check_index(std::size_t i) const {
    if (i >= length_) throw Error(Errc::DimensionMismatch, "bit index out of range");
  }
  void require_same_length(const BitVector& other) const {
    if (other.length_ != length_) throw Error(Errc::DimensionMismatch, "bit vector lengths differ");
  }
  void trim() {
    if (!words_.empty() && length_ % kWordBits != 0) words_.back() &= low_mask(length_ % kWordBits);
  }

  std::size_t length_ = 0;
  std::vector<Word> words_;
};

class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, BitVector(cols)) {}

  static BitMatrix from_rows(std::vector<BitVector> rows, std::size_t cols) {
    for (const auto& r : rows)
      if (r.size() != cols) throw Error(Errc::DimensionMismatch, "row length differs from column count");
    BitMatrix m;
    m.cols_ = cols;
    m.rows_ = std::move(rows);
    return m;
  }

  static BitMatrix identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
  }

  /// One row per line, each a string of '0'/'1'. Blank lines and lines
  /// starting with '#' are skipped. An explicit column count is needed to
  /// express a matrix with zero rows.
  static BitMatrix from_text(std::string_view text, std::optional<std::size_t> cols = std::nullopt) {
    std::vector<BitVector> rows;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      auto line = text.substr(pos, end - pos);
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
        line.remove_suffix(1);
      while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
      if (!line.empty() && line.front() != '#') rows.push_back(BitVector::from_string(line));
      pos = end + 1;
    }
    std::size_t n = cols.value_or(rows.empty() ? 0 : rows.front().size());
    return from_rows(std::move(rows), n);
  }

  std::string to_text() const {
    std::string out;
    for (const auto& r : rows_) {
      out += r.to_string();
      out += '\n';
    }
    return out;
  }

  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t cols() const noexcept { return cols_; }

  bool get(std::size_t r, std::size_t c) const { return rows_.at(r).get(c); }
  void set(std::size_t r, std::size_t c, bool v) { rows_.at(r).set(c, v); }

  const BitVector& row(std::size_t r) const { return rows_.at(r); }
  const std::vector<BitVector>& row_vectors() const noexcept { return rows_; }
  std::vector<std::size_t> row_support(std::size_t r) const { return rows_.at(r).support(); }

  void append_row(BitVector r) {
    if (r.size() != cols_) throw Error(Errc::DimensionMismatch, "appended row has wrong length");
    rows_.push_back(std::move(r));
  }

  BitVector column(std::size_t c) const {
    BitVector out(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r)
      if (rows_[r].get(c)) out.set(r, true);
    return out;
  }

  std::size_t max_row_weight() const {
    std::size_t w = 0;
    for (const auto& r : rows_) w = std::max(w, r.weight());
    return w;
  }

  std::size_t max_column_weight() const {
    std::vector<std::size_t> counts(cols_, 0);
    for (const auto& r : rows_)
      for (auto c : r.support()) ++counts[c];
    return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
  }

  bool is_zero() const {
    return std::all_of(rows_.begin(), rows_.end(), [](const BitVector& r) { return r.none(); });
  }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<BitVector> rows_;
};

inline BitVector product(const BitMatrix& m, const BitVector& v) {
  if (v.size() != m.cols()) throw Error(Errc::DimensionMismatch, "matrix-vector product");
  BitVector out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    if (m.row(r).dot(v)) out.set(r, true);
  return out;
}

inline BitMatrix transpose(const BitMatrix& m) {
  BitMatrix t(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (auto c : m.row(r).support()) t.set(c, r, true);
  return t;
}

inline BitMatrix matmul(const BitMatrix& a, const BitMatrix& b) {
  if (a.cols() != b.rows()) throw Error(Errc::DimensionMismatch, "matrix product");
  BitMatrix out(a.rows(), b.cols());
  std::vector<BitVector> rows(a.rows(), BitVector(b.cols()));
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (auto k : a.row(r).support()) rows[r] ^= b.row(k);
  return BitMatrix::from_rows(std::move(rows), b.cols());
}

/// Stacks the rows of a over the rows of b.
inline BitMatrix vstack(const BitMatrix& a, const BitMatrix& b) {
  if (a.cols() != b.cols()) throw Error(Errc::DimensionMismatch, "vstack");
  auto rows = a.row_vectors();
  rows.insert(rows.end(), b.row_vectors().begin(), b.row_vectors().end());
  return BitMatrix::from_rows(std::move(rows), a.cols());
}

/// Reduced row echelon form. Pivots are chosen at the lowest available column
/// index, scanning rows in input order, so the result is deterministic.
struct RowEchelon {
  std::size_t cols = 0;
  std::vector<BitVector> rows;      // nonzero rows only, pivot columns increasing
  std::vector<std::size_t> pivots;  // pivots[i] is the leading column of rows[i]

  std::size_t rank() const noexcept { return rows.size(); }

  /// Reduces v against the echelon rows; the result is zero iff v is in the row space.
  BitVector reduce(BitVector v) const {
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (v.get(pivots[i])) v ^= rows[i];
    return v;
  }

  bool contains(const BitVector& v) const { return reduce(v).none(); }
};

inline RowEchelon row_echelon(const BitMatrix& m) {
  RowEchelon e;
  e.cols = m.cols();
  std::vector<BitVector> work = m.row_vectors();
  std::size_t next = 0;
  for (std::size_t c = 0; c < m.cols() && next < work.size(); ++c) {
    std::size_t p = next;
    while (p < work.size() && !work[p].get(c)) ++p;
    if (p == work.size()) continue;
    std::swap(work[p], work[next]);
    for (std::size_t r = 0; r < work.size(); ++r)
      if (r != next && work[r].get(c)) work[r] ^= work[next];
    e.pivots.push_back(c);
    ++next;
  }
  work.resize(next);
  e.rows = std::move(work);
  return e;
}

inline std::size_t rank(const BitMatrix& m) { return row_echelon(m).rank(); }

/// Basis of {v : Mv = 0}, one vector per free column of the echelon form,
/// ordered by increasing free-column index.
inline std::vector<BitVector> kernel_basis(const BitMatrix& m) {
  const auto e = row_echelon(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<BitVector> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    BitVector v(m.cols());
    v.set(free, true);
    for (std::size_t i = 0; i < e.rows.size(); ++i)
      if (e.rows[i].get(free)) v.set(e.pivots[i], true);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Keeps the rows of m (in order) that are independent of the rows kept before them.
inline BitMatrix independent_rows(const BitMatrix& m) {
  RowEchelon acc;
  acc.cols = m.cols();
  std::vector<BitVector> kept;
  for (const auto& r : m.row_vectors()) {
    auto red = acc.reduce(r);
    if (red.none()) continue;
    kept.push_back(r);
    acc = row_echelon(BitMatrix::from_rows(kept, m.cols()));
  }
  return BitMatrix::from_rows(std::move(kept), m.cols());
}

/// True when the row spaces of a and b coincide.
inline bool same_row_space(const BitMatrix& a, const BitMatrix& b) {
  if (a.cols() != b.cols()) return false;
  auto ra = rank(a);
  return ra == rank(b) && ra == rank(vstack(a, b));
}

/// True when every row of a is orthogonal to every row of b.
inline bool orthogonal(const BitMatrix& a, const BitMatrix& b) {
  if (a.cols() != b.cols()) throw Error(Errc::DimensionMismatch, "orthogonality test");
  return matmul(a, transpose(b)).is_zero();
}

// ---------------------------------------------------------------------------
// Single-word fast paths. Everything enumerative in this project runs with
// n <= 26, so spans and member sets are handled as raw 64-bit words.

namespace words {

inline std::vector<Word> to_words(const std::vector<BitVector>& vs) {
  std::vector<Word> out;
  out.reserve(vs.size());
  for (const auto& v : vs) out.push_back(v.to_word());
  return out;
}

inline std::size_t weight(Word w) { return static_cast<std::size_t>(std::popcount(w)); }

/// Echelon basis over words supporting constant-time-per-row membership.
struct WordBasis {
  std::vector<Word> rows;
  std::vector<Word> pivot_bits;

  explicit WordBasis(const std::vector<Word>& gens = {}) {
    for (auto g : gens) insert(g);
  }

  Word reduce(Word v) const {
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (v & pivot_bits[i]) v ^= rows[i];
    return v;
  }

  bool contains(Word v) const { return reduce(v) == 0; }

  /// Adds v to the basis if independent; returns whether it was added.
  bool insert(Word v) {
    v = reduce(v);
    if (v == 0) return false;
    Word pivot = v & (~v + 1);
    for (auto& r : rows)
      if (r & pivot) r ^= v;
    rows.push_back(v);
    pivot_bits.push_back(pivot);
    return true;
  }

  std::size_t dimension() const { return rows.size(); }
};

/// All 2^k elements of the span of an independent list, in Gray-code order
/// starting at zero.
inline std::vector<Word> span(const std::vector<Word>& basis) {
  if (basis.size() >= 40) throw Error(Errc::CapExceeded, "span too large to materialize");
  const std::size_t count = std::size_t{1} << basis.size();
  std::vector<Word> out;
  out.reserve(count);
  Word cur = 0;
  out.push_back(cur);
  for (std::size_t i = 1; i < count; ++i) {
    cur ^= basis[static_cast<std::size_t>(std::countr_zero(i))];
    out.push_back(cur);
  }
  return out;
}

/// Calls f(w) for every word of length n with weight <= max_weight, in
/// increasing weight, lexicographic within a weight class. Stops early if f
/// returns false.
template <typename F>
bool for_each_weight_bounded(std::size_t n, std::size_t max_weight, F&& f) {
  max_weight = std::min(max_weight, n);
  for (std::size_t w = 0; w <= max_weight; ++w) {
    if (w == 0) {
      if (!f(Word{0})) return false;
      continue;
    }
    Word v = low_mask(w);
    while (true) {
      if (!f(v)) return false;
      // Gosper's hack: next word with the same popcount.
      const Word c = v & (~v + 1);
      const Word r = v + c;
      if (r == 0) break;
      const Word next = (((r ^ v) >> 2) / c) | r;
      if (n < kWordBits && next >= (Word{1} << n)) break;
      v = next;
    }
  }
  return true;
}

}  // namespace words

// ---------------------------------------------------------------------------

/// The subspace S used by the coset distance |y|_S = min_{s in S} |y + s|.
class CosetFamily {
 public:
  static constexpr std::size_t kDefaultEnumerationCap = 20;

  CosetFamily(const BitMatrix& generator, std::size_t enumeration_cap = kDefaultEnumerationCap)
      : generator_(generator), cap_(enumeration_cap) {
    echelon_ = row_echelon(generator);
    basis_ = echelon_.rows;
    if (basis_.size() <= cap_ && generator.cols() <= kWordBits) span_ = words::span(words::to_words(basis_));
  }

  std::size_t length() const noexcept { return generator_.cols(); }
  std::size_t dimension() const noexcept { return basis_.size(); }
  std::size_t enumeration_cap() const noexcept { return cap_; }
  bool enumerable() const noexcept { return basis_.size() <= cap_; }

  const BitMatrix& generator() const noexcept { return generator_; }
  const std::vector<BitVector>& basis() const noexcept { return basis_; }

  /// Cached span; empty unless enumerable() and length() <= 64.
  const std::vector<Word>& span_words() const noexcept { return span_; }

  bool contains(const BitVector& v) const { return echelon_.contains(v); }

 private:
  BitMatrix generator_;
  std::size_t cap_;
  RowEchelon echelon_;
  std::vector<BitVector> basis_;
  std::vector<Word> span_;
};

struct CosetDistance {
  std::size_t value = 0;
  bool exact = true;  // false: value is an upper bound from a bounded search
};

/// |y|_S. Exhaustive over the span when dim(S) is within the family's cap;
/// otherwise, if a search radius r is given, the minimum over sums of at
/// most r basis rows (an upper bound, flagged as such).
inline CosetDistance coset_distance(const BitVector& y, const CosetFamily& s,
                                    std::optional<std::size_t> search_radius = std::nullopt) {
  if (y.size() != s.length()) throw Error(Errc::DimensionMismatch, "coset distance");
  if (s.enumerable()) {
    if (!s.span_words().empty()) {
      const Word yw = y.to_word();
      std::size_t best = y.size() + 1;
      for (auto sw : s.span_words()) best = std::min(best, words::weight(yw ^ sw));
      return {best, true};
    }
    BitVector cur = y;
    std::size_t best = cur.weight();
    const std::size_t count = std::size_t{1} << s.dimension();
    for (std::size_t i = 1; i < count; ++i) {
      cur ^= s.basis()[static_cast<std::size_t>(std::countr_zero(i))];
      best = std::min(best, cur.weight());
    }
    return {best, true};
  }
  if (!search_radius) {
    throw Error(Errc::CapExceeded, "coset family of dimension " + std::to_string(s.dimension()) +
                                       " exceeds enumeration cap " + std::to_string(s.enumeration_cap()));
  }
  const auto& basis = s.basis();
  std::size_t best = y.weight();
  // Depth-first over index combinations of size <= radius.
  std::vector<std::size_t> idx;
  BitVector cur = y;
  auto recurse = [&](auto&& self, std::size_t start) -> void {
    if (idx.size() == *search_radius) return;
    for (std::size_t i = start; i < basis.size(); ++i) {
      cur ^= basis[i];
      idx.push_back(i);
      best = std::min(best, cur.weight());
      self(self, i + 1);
      idx.pop_back();
      cur ^= basis[i];
    }
  };
  recurse(recurse, 0);
  return {best, false};
}

/// |y|_S for every y in F_2^n at once, by breadth-first search on the
/// hypercube from all elements of S. Entry y (as a word) holds the distance.
inline std::vector<std::uint8_t> coset_distance_table(const CosetFamily& s, std::size_t max_length = 26) {
  const std::size_t n = s.length();
  if (n > max_length) throw Error(Errc::CapExceeded, "coset distance table needs n <= " + std::to_string(max_length));
  if (!s.enumerable()) throw Error(Errc::CapExceeded, "coset family not enumerable");
  const std::size_t size = std::size_t{1} << n;
  constexpr std::uint8_t kUnset = 0xFF;
  std::vector<std::uint8_t> dist(size, kUnset);
  std::vector<Word> frontier;
  for (auto w : s.span_words()) {
    dist[w] = 0;
    frontier.push_back(w);
  }
  std::uint8_t level = 0;
  std::vector<Word> next;
  while (!frontier.empty()) {
    ++level;
    next.clear();
    for (auto w : frontier) {
      for (std::size_t b = 0; b < n; ++b) {
        Word u = w ^ (Word{1} << b);
        if (dist[u] == kUnset) {
          dist[u] = level;
          next.push_back(u);
        }
      }
    }
    std::swap(frontier, next);
  }
  return dist;
}

}  // namespace nlts::gf2
