#pragma once

// Cayley graphs, their bipartite double covers, the bipartite balanced
// product complex built from two of them, its square graphs, and the
// spectral / combinatorial expansion checks run on these graphs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "nlts/error.hpp"
#include "nlts/gf2.hpp"
#include "nlts/groups.hpp"

namespace nlts {

using Vertex = std::size_t;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected multigraph. A loop contributes 2 to its vertex's degree and
/// to the diagonal of the adjacency matrix.
class Graph {
 public:
  explicit Graph(std::size_t vertices = 0) : incident_(vertices) {}

  std::size_t add_edge(Vertex u, Vertex v, std::string label = {}) {
    if (u >= vertex_count() || v >= vertex_count()) throw Error(Errc::DimensionMismatch, "edge endpoint out of range");
    const std::size_t id = edges_.size();
    edges_.push_back({u, v});
    labels_.push_back(std::move(label));
    incident_[u].push_back(id);
    if (v != u) incident_[v].push_back(id);
    return id;
  }

  std::size_t vertex_count() const noexcept { return incident_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t id) const { return edges_.at(id); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Edge ids touching v, in insertion order (a loop is listed once).
  const std::vector<std::size_t>& incident(Vertex v) const { return incident_.at(v); }

  std::size_t degree(Vertex v) const {
    std::size_t d = 0;
    for (auto e : incident_.at(v)) d += edges_[e].u == edges_[e].v ? 2 : 1;
    return d;
  }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> out(vertex_count());
    for (Vertex v = 0; v < vertex_count(); ++v) out[v] = degree(v);
    return out;
  }

  std::optional<std::size_t> regular_degree() const {
    if (vertex_count() == 0) return std::nullopt;
    const auto d = degree(0);
    for (Vertex v = 1; v < vertex_count(); ++v)
      if (degree(v) != d) return std::nullopt;
    return d;
  }

  Vertex other_end(std::size_t edge_id, Vertex v) const {
    const auto& e = edges_.at(edge_id);
    return e.u == v ? e.v : e.u;
  }

  Eigen::MatrixXd adjacency() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(vertex_count()),
                                              static_cast<Eigen::Index>(vertex_count()));
    for (const auto& e : edges_) {
      a(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)) += 1.0;
      a(static_cast<Eigen::Index>(e.v), static_cast<Eigen::Index>(e.u)) += 1.0;
    }
    return a;
  }

  /// Component id per vertex, numbered in order of first appearance.
  std::vector<std::size_t> components() const {
    std::vector<std::size_t> comp(vertex_count(), SIZE_MAX);
    std::size_t next = 0;
    std::vector<Vertex> stack;
    for (Vertex s = 0; s < vertex_count(); ++s) {
      if (comp[s] != SIZE_MAX) continue;
      comp[s] = next;
      stack.push_back(s);
      while (!stack.empty()) {
        Vertex x = stack.back();
        stack.pop_back();
        for (auto e : incident_[x]) {
          Vertex y = other_end(e, x);
          if (comp[y] == SIZE_MAX) {
            comp[y] = next;
            stack.push_back(y);
          }
        }
      }
      ++next;
    }
    return comp;
  }

  std::size_t component_count() const {
    auto c = components();
    return c.empty() ? 0 : *std::max_element(c.begin(), c.end()) + 1;
  }

  bool is_bipartite() const {
    std::vector<int> color(vertex_count(), -1);
    std::vector<Vertex> stack;
    for (Vertex s = 0; s < vertex_count(); ++s) {
      if (color[s] != -1) continue;
      color[s] = 0;
      stack.push_back(s);
      while (!stack.empty()) {
        Vertex x = stack.back();
        stack.pop_back();
        for (auto e : incident_[x]) {
          Vertex y = other_end(e, x);
          if (y == x) return false;
          if (color[y] == -1) {
            color[y] = 1 - color[x];
            stack.push_back(y);
          } else if (color[y] == color[x]) {
            return false;
          }
        }
      }
    }
    return true;
  }

  /// Per-vertex ordering of incident edges ("local view" coordinates).
  /// Empty unless set explicitly.
  const std::vector<std::vector<std::size_t>>& local_order() const noexcept { return local_order_; }

  void set_local_order(std::vector<std::vector<std::size_t>> order) {
    if (order.size() != vertex_count()) throw Error(Errc::DimensionMismatch, "local order needs one list per vertex");
    for (Vertex v = 0; v < vertex_count(); ++v) {
      for (auto e : order[v]) {
        const auto& ed = edges_.at(e);
        if (ed.u != v && ed.v != v) throw Error(Errc::DimensionMismatch, "local order lists a non-incident edge");
      }
    }
    local_order_ = std::move(order);
  }

 private:
  std::vector<Edge> edges_;
  std::vector<std::string> labels_;
  std::vector<std::vector<std::size_t>> incident_;
  std::vector<std::vector<std::size_t>> local_order_;
};

// ---------------------------------------------------------------------------
// Cayley graphs and double covers

/// Cay^r(G, A) has edges g ~ ag; Cay^l(G, B) has edges g ~ gb. Each
/// undirected edge is produced by two half-edges (g, s) and (s g, s^-1) (or
/// their left analogues); the lexicographically smaller one names the edge.
inline Graph build_cayley(const FiniteGroup& g, const GeneratorSet& s) {
  s.validate(g);
  Graph out(g.order());
  for (Element x = 0; x < g.order(); ++x) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Element a = s.elements[i];
      const Element y = s.side == Side::Right ? g.mul(a, x) : g.mul(x, a);
      const std::size_t j = s.index_of(g.inverse(a));
      if (std::make_pair(y, j) < std::make_pair(x, i)) continue;
      out.add_edge(x, y, std::to_string(x) + "," + std::to_string(a));
    }
  }
  return out;
}

/// Double cover with vertex (g,+) at index g and (g,-) at |G| + g. Right
/// side: edges (g,+) ~ (ag,-) labeled by A x G. Left side: (+,g) ~ (-,gb)
/// labeled by G x B.
inline Graph double_cover(const FiniteGroup& g, const GeneratorSet& s) {
  s.validate(g);
  const std::size_t n = g.order();
  Graph out(2 * n);
  if (s.side == Side::Right) {
    for (std::size_t i = 0; i < s.size(); ++i)
      for (Element x = 0; x < n; ++x)
        out.add_edge(x, n + g.mul(s.elements[i], x), std::to_string(s.elements[i]) + "," + std::to_string(x));
  } else {
    for (Element x = 0; x < n; ++x)
      for (std::size_t i = 0; i < s.size(); ++i)
        out.add_edge(x, n + g.mul(x, s.elements[i]), std::to_string(x) + "," + std::to_string(s.elements[i]));
  }
  return out;
}

/// Generic bipartite double cover: vertex v splits into (v,+) = v and
/// (v,-) = V + v, each edge {u,v} lifts to (u,+)~(v,-) and (v,+)~(u,-).
inline Graph bipartite_double_cover(const Graph& base) {
  const std::size_t n = base.vertex_count();
  Graph out(2 * n);
  for (const auto& e : base.edges()) {
    out.add_edge(e.u, n + e.v);
    out.add_edge(e.v, n + e.u);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Balanced product complex

/// A square of the complex, stored by its canonical record (g, a, b); a and
/// b are indices into the generator lists. Corners follow the layout
/// (g,+), (ag,-), (gb,-), (agb,+).
struct Face {
  Element g = 0;
  std::size_t a = 0;
  std::size_t b = 0;
  std::array<Vertex, 4> corners{};
};

struct ComplexOptions {
  bool allow_degenerate = false;
};

class BalancedProductComplex {
 public:
  BalancedProductComplex(FiniteGroup group, GeneratorSet a, GeneratorSet b, ComplexOptions opts = {})
      : group_(std::move(group)), a_(std::move(a)), b_(std::move(b)) {
    a_.side = Side::Right;
    b_.side = Side::Left;
    a_.validate(group_);
    b_.validate(group_);
    if (a_.size() != b_.size())
      throw Error(Errc::DegreeMismatch, "|A| = " + std::to_string(a_.size()) + " but |B| = " + std::to_string(b_.size()));
    build(opts);
  }

  const FiniteGroup& group() const noexcept { return group_; }
  const GeneratorSet& a() const noexcept { return a_; }
  const GeneratorSet& b() const noexcept { return b_; }
  std::size_t delta() const noexcept { return a_.size(); }
  std::size_t group_order() const noexcept { return group_.order(); }

  std::size_t vertex_count() const noexcept { return 2 * group_.order(); }
  Vertex v0(Element g) const noexcept { return g; }
  Vertex v1(Element g) const noexcept { return group_.order() + g; }
  bool in_v0(Vertex v) const noexcept { return v < group_.order(); }

  const std::vector<Face>& faces() const noexcept { return faces_; }
  std::size_t face_count() const noexcept { return faces_.size(); }
  std::size_t degenerate_count() const noexcept { return degenerate_; }

  /// Face id of the record (g, a-index, b-index), under the identification
  /// (g,a,b) = (agb, a^-1, b^-1).
  std::size_t face_of(Element g, std::size_t ia, std::size_t ib) const {
    return record_to_face_.at((g * delta() + ia) * delta() + ib);
  }

 private:
  using Record = std::tuple<Element, std::size_t, std::size_t>;

  Record partner(const Record& r) const {
    const auto [g, ia, ib] = r;
    const Element a = a_.elements[ia], b = b_.elements[ib];
    return {group_.mul(a, g, b), a_.index_of(group_.inverse(a)), b_.index_of(group_.inverse(b))};
  }

  void build(const ComplexOptions& opts) {
    const std::size_t n = group_.order(), d = delta();
    std::vector<Record> canon;
    canon.reserve(n * d * d);
    for (Element g = 0; g < n; ++g) {
      for (std::size_t ia = 0; ia < d; ++ia) {
        for (std::size_t ib = 0; ib < d; ++ib) {
          const Element a = a_.elements[ia], b = b_.elements[ib];
          const bool coincident = group_.mul(a, g, b) == g || group_.mul(a, g) == group_.mul(g, b);
          if (coincident && !opts.allow_degenerate) {
            throw Error(Errc::DegenerateFace, "face (" + std::to_string(g) + "," + std::to_string(a) + "," +
                                                  std::to_string(b) + ") has coinciding corners");
          }
          Record r{g, ia, ib};
          canon.push_back(std::min(r, partner(r)));
        }
      }
    }
    std::vector<Record> unique = canon;
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    record_to_face_.resize(canon.size());
    for (std::size_t i = 0; i < canon.size(); ++i)
      record_to_face_[i] =
          static_cast<std::size_t>(std::lower_bound(unique.begin(), unique.end(), canon[i]) - unique.begin());
    faces_.reserve(unique.size());
    degenerate_ = 0;
    for (const auto& r : unique) {
      const auto [g, ia, ib] = r;
      const Element a = a_.elements[ia], b = b_.elements[ib];
      Face f{g, ia, ib, {v0(g), v1(group_.mul(a, g)), v1(group_.mul(g, b)), v0(group_.mul(a, g, b))}};
      if (f.corners[0] == f.corners[3] || f.corners[1] == f.corners[2]) ++degenerate_;
      faces_.push_back(f);
    }
  }

  FiniteGroup group_;
  GeneratorSet a_;
  GeneratorSet b_;
  std::vector<Face> faces_;
  std::vector<std::size_t> record_to_face_;
  std::size_t degenerate_ = 0;
};

inline BalancedProductComplex build_balanced_product(const FiniteGroup& g, const GeneratorSet& a,
                                                     const GeneratorSet& b, ComplexOptions opts = {}) {
  return BalancedProductComplex(g, a, b, opts);
}

/// The two square graphs. Edge i of each graph is face i of the complex, so
/// face_of_edge is the identity; it is returned so callers need not rely on
/// that. Vertex h of g0 is (h,+), vertex h of g1 is (h,-).
struct SquareGraphs {
  Graph g0;
  Graph g1;
  std::vector<std::size_t> face_of_edge0;
  std::vector<std::size_t> face_of_edge1;
};

/// Local-view coordinate (a, b) sits at index a * Delta + b. At (g,+) it is
/// the face of record (g, a, b); at (h,-) it is the face of record
/// (a h, a^-1, b). With this pairing, rows of A at a (+)-vertex meet rows of
/// A at a (-)-vertex in matching B-order, and columns meet columns in
/// matching A-order, which is what makes the two Tanner codes orthogonal.
inline SquareGraphs square_graphs(const BalancedProductComplex& x) {
  const auto& grp = x.group();
  const std::size_t n = grp.order(), d = x.delta();
  SquareGraphs out{Graph(n), Graph(n), {}, {}};
  for (std::size_t f = 0; f < x.face_count(); ++f) {
    const auto& face = x.faces()[f];
    const std::string label = std::to_string(face.g) + "," + std::to_string(x.a().elements[face.a]) + "," +
                              std::to_string(x.b().elements[face.b]);
    out.g0.add_edge(face.corners[0], face.corners[3], label);
    out.g1.add_edge(face.corners[1] - n, face.corners[2] - n, label);
    out.face_of_edge0.push_back(f);
    out.face_of_edge1.push_back(f);
  }
  std::vector<std::vector<std::size_t>> order0(n, std::vector<std::size_t>(d * d));
  std::vector<std::vector<std::size_t>> order1(n, std::vector<std::size_t>(d * d));
  for (Element h = 0; h < n; ++h) {
    for (std::size_t ia = 0; ia < d; ++ia) {
      const Element a = x.a().elements[ia];
      const std::size_t ia_inv = x.a().index_of(grp.inverse(a));
      for (std::size_t ib = 0; ib < d; ++ib) {
        order0[h][ia * d + ib] = x.face_of(h, ia, ib);
        order1[h][ia * d + ib] = x.face_of(grp.mul(a, h), ia_inv, ib);
      }
    }
  }
  out.g0.set_local_order(std::move(order0));
  out.g1.set_local_order(std::move(order1));
  return out;
}

// ---------------------------------------------------------------------------
// Spectra

struct SpectralReport {
  std::vector<double> eigenvalues;  // descending
  double lambda1 = 0;
  double lambda2 = 0;
  double lambda_min = 0;
  double lambda = 0;  // max(|lambda2|, |lambda_min|)
  std::size_t components = 0;
  double tolerance = 1e-9;
};

inline SpectralReport spectral_lambda(const Graph& g, double tolerance = 1e-9) {
  if (g.vertex_count() == 0) throw Error(Errc::DimensionMismatch, "spectrum of an empty graph");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g.adjacency(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(Errc::ConvergenceFailure, "symmetric eigensolver did not converge");
  SpectralReport r;
  r.tolerance = tolerance;
  const auto& ev = solver.eigenvalues();
  for (Eigen::Index i = ev.size() - 1; i >= 0; --i) r.eigenvalues.push_back(ev(i));
  r.lambda1 = r.eigenvalues.front();
  r.lambda2 = r.eigenvalues.size() > 1 ? r.eigenvalues[1] : r.eigenvalues.front();
  r.lambda_min = r.eigenvalues.back();
  r.lambda = std::max(std::abs(r.lambda2), std::abs(r.lambda_min));
  r.components = g.component_count();
  return r;
}

struct MixingReport {
  double edges_between = 0;  // E(S,T), ordered pairs with multiplicity
  double bound = 0;          // d|S||T|/|V| + lambda sqrt(|S||T|)
  std::size_t degree = 0;
  double lambda = 0;
  bool holds = true;
};

/// Expander mixing lemma for a d-regular graph, using the supplied lambda.
inline MixingReport mixing_lemma_check(const Graph& g, const std::vector<Vertex>& s, const std::vector<Vertex>& t,
                                       const SpectralReport& spectrum) {
  const auto d = g.regular_degree();
  if (!d) throw Error(Errc::DegreeMismatch, "mixing lemma needs a regular graph");
  std::vector<char> in_s(g.vertex_count(), 0), in_t(g.vertex_count(), 0);
  for (auto v : s) in_s.at(v) = 1;
  for (auto v : t) in_t.at(v) = 1;
  MixingReport r;
  r.degree = *d;
  r.lambda = spectrum.lambda;
  for (const auto& e : g.edges()) {
    if (in_s[e.u] && in_t[e.v]) r.edges_between += 1;
    if (in_s[e.v] && in_t[e.u]) r.edges_between += 1;
  }
  const double ss = static_cast<double>(s.size()), tt = static_cast<double>(t.size());
  r.bound = static_cast<double>(*d) * ss * tt / static_cast<double>(g.vertex_count()) + r.lambda * std::sqrt(ss * tt);
  r.holds = r.edges_between <= r.bound + spectrum.tolerance * (1.0 + r.bound);
  return r;
}

inline MixingReport mixing_lemma_check(const Graph& g, const std::vector<Vertex>& s, const std::vector<Vertex>& t) {
  return mixing_lemma_check(g, s, t, spectral_lambda(g));
}

// ---------------------------------------------------------------------------
// Bipartite expansion

/// Left vertices are 0..left-1, right vertices left..V-1.
struct BipartiteView {
  std::size_t left = 0;
  std::size_t right = 0;
  std::size_t left_degree = 0;
  std::vector<std::vector<std::size_t>> neighbors;  // per left vertex, right indices (0-based), with multiplicity
};

inline BipartiteView bipartite_view(const Graph& g, std::size_t left_count) {
  BipartiteView v;
  v.left = left_count;
  v.right = g.vertex_count() - left_count;
  v.neighbors.assign(left_count, {});
  for (const auto& e : g.edges()) {
    const bool ul = e.u < left_count, vl = e.v < left_count;
    if (ul == vl) throw Error(Errc::NotBipartite, "edge inside one side of the bipartition");
    const auto l = ul ? e.u : e.v, r = ul ? e.v : e.u;
    v.neighbors[l].push_back(r - left_count);
  }
  for (std::size_t l = 0; l < left_count; ++l) {
    if (l == 0) v.left_degree = v.neighbors[0].size();
    if (v.neighbors[l].size() != v.left_degree) throw Error(Errc::NotLeftRegular, "left degrees differ");
  }
  return v;
}

/// Interaction graph of a check matrix: variable j (left) ~ check i (right)
/// whenever H[i][j] = 1.
inline Graph interaction_graph(const gf2::BitMatrix& h) {
  Graph g(h.cols() + h.rows());
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (auto j : h.row(i).support()) g.add_edge(j, h.cols() + i);
  return g;
}

/// Inverse of interaction_graph for a bipartite view: checks are right vertices.
inline gf2::BitMatrix check_matrix(const BipartiteView& v) {
  gf2::BitMatrix h(v.right, v.left);
  for (std::size_t l = 0; l < v.left; ++l)
    for (auto r : v.neighbors[l]) h.set(r, l, !h.get(r, l));
  return h;
}

inline std::vector<std::size_t> neighborhood(const BipartiteView& v, const std::vector<std::size_t>& a) {
  std::vector<char> hit(v.right, 0);
  for (auto l : a)
    for (auto r : v.neighbors.at(l)) hit[r] = 1;
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < v.right; ++r)
    if (hit[r]) out.push_back(r);
  return out;
}

/// Gamma^+(A): right vertices joined to A by exactly one edge.
inline std::vector<std::size_t> unique_neighbors(const BipartiteView& v, const std::vector<std::size_t>& a) {
  std::vector<std::size_t> count(v.right, 0);
  for (auto l : a)
    for (auto r : v.neighbors.at(l)) ++count[r];
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < v.right; ++r)
    if (count[r] == 1) out.push_back(r);
  return out;
}

struct ExpansionOptions {
  std::size_t exhaustive_left_cap = 20;
  std::size_t samples = 20000;
  std::uint64_t seed = 1;
};

struct ExpansionReport {
  bool expanding = true;
  bool exhaustive = true;
  std::size_t max_set_size = 0;
  std::size_t sets_checked = 0;
  std::optional<std::vector<std::size_t>> first_violation;
  double min_ratio = 0;  // min over checked A of |Gamma(A)| / (d |A|)
  std::size_t unique_bound_violations = 0;
};

/// (gamma, alpha)-small-set expansion: every A subset of L with |A| <= alpha|L| has
/// |Gamma(A)| >= (1 - gamma) d |A|. For every gamma-expanding A the unique
/// neighbour bound |Gamma^+(A)| >= (1 - 2 gamma) d |A| is rechecked.
inline ExpansionReport small_set_expansion_check(const Graph& g, std::size_t left_count, double gamma, double alpha,
                                                 ExpansionOptions opts = {}) {
  const auto view = bipartite_view(g, left_count);
  ExpansionReport rep;
  rep.max_set_size = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(view.left) + 1e-12));
  rep.min_ratio = std::numeric_limits<double>::infinity();
  const double d = static_cast<double>(view.left_degree);
  auto check = [&](const std::vector<std::size_t>& a) {
    ++rep.sets_checked;
    const double size = static_cast<double>(a.size());
    const double gam = static_cast<double>(neighborhood(view, a).size());
    if (d > 0) rep.min_ratio = std::min(rep.min_ratio, gam / (d * size));
    if (gam + 1e-12 < (1.0 - gamma) * d * size) {
      if (rep.expanding) rep.first_violation = a;
      rep.expanding = false;
    } else if (static_cast<double>(unique_neighbors(view, a).size()) + 1e-12 < (1.0 - 2.0 * gamma) * d * size) {
      ++rep.unique_bound_violations;
    }
  };
  if (view.left <= opts.exhaustive_left_cap && view.left <= 64) {
    gf2::words::for_each_weight_bounded(view.left, rep.max_set_size, [&](gf2::Word w) {
      if (w == 0) return true;
      std::vector<std::size_t> a;
      for (std::size_t i = 0; i < view.left; ++i)
        if ((w >> i) & 1U) a.push_back(i);
      check(a);
      return true;
    });
  } else {
    rep.exhaustive = false;
    std::mt19937_64 rng(opts.seed);
    std::vector<std::size_t> all(view.left);
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t s = 0; s < opts.samples && rep.max_set_size > 0; ++s) {
      const std::size_t k = 1 + rng() % rep.max_set_size;
      std::shuffle(all.begin(), all.end(), rng);
      std::vector<std::size_t> a(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
      std::sort(a.begin(), a.end());
      check(a);
    }
  }
  if (rep.sets_checked == 0) rep.min_ratio = 0;
  return rep;
}

/// Random d-left-regular bipartite graph; each left vertex draws d distinct
/// right neighbours.
template <typename Rng>
Graph random_left_regular(std::size_t left, std::size_t right, std::size_t d, Rng& rng) {
  if (d > right) throw Error(Errc::DegreeMismatch, "left degree exceeds right side");
  Graph g(left + right);
  std::vector<std::size_t> pool(right);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t l = 0; l < left; ++l) {
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<std::size_t> pick(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(d));
    std::sort(pick.begin(), pick.end());
    for (auto r : pick) g.add_edge(l, left + r);
  }
  return g;
}

}  // namespace nlts
