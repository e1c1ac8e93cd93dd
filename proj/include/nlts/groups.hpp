#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "nlts/error.hpp"

namespace nlts {

using Element = std::size_t;

/// A finite group given by its full multiplication table. Elements are the
/// indices 0..order-1; table[a][b] is the product ab.
class FiniteGroup {
 public:
  FiniteGroup(std::vector<std::vector<Element>> table, std::string name = "")
      : name_(std::move(name)), table_(std::move(table)) {
    validate();
  }

  static FiniteGroup cyclic(std::size_t m) {
    if (m == 0) throw Error(Errc::InvalidGroup, "cyclic group of order 0");
    std::vector<std::vector<Element>> t(m, std::vector<Element>(m));
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) t[a][b] = (a + b) % m;
    return FiniteGroup(std::move(t), "Z" + std::to_string(m));
  }

  /// Dihedral group of order 2m. Element k + m*e stands for r^k s^e, with
  /// s r s = r^{-1}.
  static FiniteGroup dihedral(std::size_t m) {
    if (m < 1) throw Error(Errc::InvalidGroup, "dihedral group needs m >= 1");
    const std::size_t order = 2 * m;
    std::vector<std::vector<Element>> t(order, std::vector<Element>(order));
    for (std::size_t x = 0; x < order; ++x) {
      for (std::size_t y = 0; y < order; ++y) {
        const std::size_t k1 = x % m, e1 = x / m, k2 = y % m, e2 = y / m;
        // r^k1 s^e1 r^k2 s^e2 = r^(k1 + (-1)^e1 k2) s^(e1+e2)
        const std::size_t k = e1 == 0 ? (k1 + k2) % m : (k1 + m - k2) % m;
        t[x][y] = k + m * ((e1 + e2) % 2);
      }
    }
    return FiniteGroup(std::move(t), "D" + std::to_string(m));
  }

  /// Symmetric group on k letters (k <= 5). Elements are the permutations in
  /// lexicographic order; the product pq is the composition p after q.
  static FiniteGroup symmetric(std::size_t k) {
    if (k < 1 || k > 5) throw Error(Errc::InvalidGroup, "symmetric group supported for 1 <= k <= 5");
    std::vector<std::vector<std::size_t>> perms;
    std::vector<std::size_t> p(k);
    std::iota(p.begin(), p.end(), 0);
    do {
      perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    auto index_of = [&](const std::vector<std::size_t>& q) {
      return static_cast<Element>(std::lower_bound(perms.begin(), perms.end(), q) - perms.begin());
    };
    std::vector<std::vector<Element>> t(perms.size(), std::vector<Element>(perms.size()));
    for (std::size_t a = 0; a < perms.size(); ++a) {
      for (std::size_t b = 0; b < perms.size(); ++b) {
        std::vector<std::size_t> c(k);
        for (std::size_t x = 0; x < k; ++x) c[x] = perms[a][perms[b][x]];
        t[a][b] = index_of(c);
      }
    }
    return FiniteGroup(std::move(t), "S" + std::to_string(k));
  }

  std::size_t order() const noexcept { return table_.size(); }
  const std::string& name() const noexcept { return name_; }
  Element identity() const noexcept { return identity_; }
  Element mul(Element a, Element b) const { return table_[a][b]; }
  Element mul(Element a, Element b, Element c) const { return table_[table_[a][b]][c]; }
  Element inverse(Element a) const { return inverse_[a]; }
  const std::vector<std::vector<Element>>& table() const noexcept { return table_; }

  bool is_abelian() const {
    for (Element a = 0; a < order(); ++a)
      for (Element b = 0; b < order(); ++b)
        if (table_[a][b] != table_[b][a]) return false;
    return true;
  }

 private:
  void validate() {
    const std::size_t n = table_.size();
    if (n == 0) throw Error(Errc::InvalidGroup, "empty multiplication table");
    for (const auto& row : table_) {
      if (row.size() != n) throw Error(Errc::InvalidGroup, "multiplication table is not square");
      for (auto v : row)
        if (v >= n) throw Error(Errc::InvalidGroup, "table entry out of range");
    }
    bool found = false;
    for (Element e = 0; e < n && !found; ++e) {
      bool ok = true;
      for (Element a = 0; a < n && ok; ++a) ok = table_[e][a] == a && table_[a][e] == a;
      if (ok) {
        identity_ = e;
        found = true;
      }
    }
    if (!found) throw Error(Errc::InvalidGroup, "no identity element");
    inverse_.assign(n, n);
    for (Element a = 0; a < n; ++a) {
      for (Element b = 0; b < n; ++b) {
        if (table_[a][b] == identity_ && table_[b][a] == identity_) {
          inverse_[a] = b;
          break;
        }
      }
      if (inverse_[a] == n) throw Error(Errc::InvalidGroup, "element " + std::to_string(a) + " has no inverse");
    }
    for (Element a = 0; a < n; ++a)
      for (Element b = 0; b < n; ++b)
        for (Element c = 0; c < n; ++c)
          if (table_[table_[a][b]][c] != table_[a][table_[b][c]])
            throw Error(Errc::InvalidGroup, "multiplication is not associative");
  }

  std::string name_;
  std::vector<std::vector<Element>> table_;
  std::vector<Element> inverse_;
  Element identity_ = 0;
};

enum class Side { Left, Right };

/// An ordered generator list. The order fixes edge labels, local-view
/// coordinates and therefore qubit numbering downstream.
struct GeneratorSet {
  std::vector<Element> elements;
  Side side = Side::Right;

  std::size_t size() const noexcept { return elements.size(); }

  std::size_t index_of(Element g) const {
    auto it = std::find(elements.begin(), elements.end(), g);
    if (it == elements.end()) throw Error(Errc::AsymmetricGenerators, "element not in generator set");
    return static_cast<std::size_t>(it - elements.begin());
  }

  bool contains(Element g) const { return std::find(elements.begin(), elements.end(), g) != elements.end(); }

  bool is_symmetric(const FiniteGroup& g) const {
    return std::all_of(elements.begin(), elements.end(), [&](Element a) { return contains(g.inverse(a)); });
  }

  /// Rejects out-of-range, duplicate, identity or non-inverse-closed lists.
  void validate(const FiniteGroup& g) const {
    for (std::size_t i = 0; i < elements.size(); ++i) {
      if (elements[i] >= g.order()) throw Error(Errc::AsymmetricGenerators, "generator out of range");
      if (elements[i] == g.identity())
        throw Error(Errc::AsymmetricGenerators, "generator set contains the identity");
      for (std::size_t j = 0; j < i; ++j)
        if (elements[j] == elements[i]) throw Error(Errc::AsymmetricGenerators, "duplicate generator");
    }
    if (!is_symmetric(g)) throw Error(Errc::AsymmetricGenerators, "generator set is not closed under inverses");
  }
};

}  // namespace nlts
