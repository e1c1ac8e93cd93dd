#pragma once

// JSON and text formats for matrices, groups, graphs, codes, Hamiltonians,
// circuits and cluster reports.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlts/classical_codes.hpp"
#include "nlts/clustering.hpp"
#include "nlts/css.hpp"
#include "nlts/error.hpp"
#include "nlts/gf2.hpp"
#include "nlts/graphs.hpp"
#include "nlts/groups.hpp"
#include "nlts/hamiltonian.hpp"
#include "nlts/quantumsim.hpp"

namespace nlts::io {

using json = nlohmann::json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path);
  out << text;
  if (!out) throw Error(Errc::IoFailure, "write failed for " + path);
}

inline json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(Errc::ParseError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("field '") + key + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Matrices

/// {"m": rows, "n": cols, "ones": [[r, c], ...]} with ones in row-major order.
inline json matrix_to_json(const BitMatrix& m) {
  json ones = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (auto c : m.row(r).support()) ones.push_back({r, c});
  return {{"m", m.rows()}, {"n", m.cols()}, {"ones", ones}};
}

inline BitMatrix matrix_from_json(const json& j) {
  if (j.is_array()) {
    // dense [[0,1,...],...] or ["01...", ...]
    std::vector<BitVector> rows;
    if (!j.empty() && j.front().is_string()) {
      for (const auto& r : j) rows.push_back(BitVector::from_string(r.get<std::string>()));
      const std::size_t cols = rows.front().size();
      for (const auto& r : rows)
        if (r.size() != cols) throw Error(Errc::ParseError, "ragged matrix rows");
      return BitMatrix::from_rows(std::move(rows), cols);
    }
    std::size_t cols = j.empty() ? 0 : j.front().size();
    for (const auto& r : j) {
      if (r.size() != cols) throw Error(Errc::ParseError, "ragged matrix rows");
      BitVector v(cols);
      for (std::size_t c = 0; c < cols; ++c) {
        const int b = r[c].get<int>();
        if (b != 0 && b != 1) throw Error(Errc::ParseError, "matrix entries must be 0 or 1");
        v.set(c, b == 1);
      }
      rows.push_back(std::move(v));
    }
    return BitMatrix::from_rows(std::move(rows), cols);
  }
  const auto m = field<std::size_t>(j, "m"), n = field<std::size_t>(j, "n");
  BitMatrix out(m, n);
  for (const auto& e : j.at("ones")) {
    if (!e.is_array() || e.size() != 2) throw Error(Errc::ParseError, "ones entries are [row, col]");
    const auto r = e[0].get<std::size_t>(), c = e[1].get<std::size_t>();
    if (r >= m || c >= n) throw Error(Errc::ParseError, "entry out of range");
    out.set(r, c, !out.get(r, c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Groups and graphs

inline json group_to_json(const FiniteGroup& g) {
  return {{"order", g.order()}, {"name", g.name()}, {"table", g.table()}};
}

inline FiniteGroup group_from_json(const json& j) {
  if (j.contains("family")) {
    const auto fam = field<std::string>(j, "family");
    const auto k = field<std::size_t>(j, "k");
    if (fam == "cyclic") return FiniteGroup::cyclic(k);
    if (fam == "dihedral") return FiniteGroup::dihedral(k);
    if (fam == "symmetric") return FiniteGroup::symmetric(k);
    throw Error(Errc::InvalidConfig, "unknown group family '" + fam + "'");
  }
  auto table = field<std::vector<std::vector<Element>>>(j, "table");
  if (j.contains("order") && field<std::size_t>(j, "order") != table.size())
    throw Error(Errc::InvalidGroup, "order does not match table size");
  return FiniteGroup(std::move(table), j.value("name", std::string{}));
}

inline std::string graph_to_edge_list(const Graph& g) {
  std::ostringstream out;
  out << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
  return out.str();
}

inline Graph graph_from_edge_list(const std::string& text) {
  std::istringstream in(text);
  std::size_t v = 0, e = 0;
  if (!(in >> v >> e)) throw Error(Errc::ParseError, "edge list header");
  Graph g(v);
  for (std::size_t i = 0; i < e; ++i) {
    Vertex a = 0, b = 0;
    if (!(in >> a >> b) || a >= v || b >= v) throw Error(Errc::ParseError, "edge list line " + std::to_string(i + 2));
    g.add_edge(a, b);
  }
  return g;
}

inline json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (std::size_t i = 0; i < g.edge_count(); ++i)
    edges.push_back({{"u", g.edges()[i].u}, {"v", g.edges()[i].v}, {"label", g.labels()[i]}});
  return {{"vertices", g.vertex_count()}, {"edges", edges}};
}

inline json spectral_to_json(const SpectralReport& s) {
  return {{"eigenvalues", s.eigenvalues}, {"lambda1", s.lambda1}, {"lambda2", s.lambda2},
          {"lambda_min", s.lambda_min},   {"lambda", s.lambda},   {"components", s.components}};
}

// ---------------------------------------------------------------------------
// Codes

/// {"n": .., "generator": rows} or {"parity": rows}, or a named family
/// {"family": "repetition"|"parity"|"zero"|"full"|"hamming", "n": ..}.
inline LinearCode code_from_json(const json& j) {
  if (j.contains("family")) {
    const auto fam = field<std::string>(j, "family");
    const auto n = j.value("n", std::size_t{0});
    if (fam == "repetition") return LinearCode::repetition(n);
    if (fam == "parity") return LinearCode::parity(n);
    if (fam == "zero") return LinearCode::zero(n);
    if (fam == "full") return LinearCode::full(n);
    if (fam == "hamming") return LinearCode::hamming(j.value("r", std::size_t{3}));
    throw Error(Errc::InvalidConfig, "unknown code family '" + fam + "'");
  }
  if (j.contains("generator")) {
    auto g = matrix_from_json(j.at("generator"));
    if (j.contains("n") && field<std::size_t>(j, "n") != g.cols()) throw Error(Errc::ParseError, "code length mismatch");
    return LinearCode::from_generator(g);
  }
  if (j.contains("parity")) return LinearCode::from_parity(matrix_from_json(j.at("parity")));
  throw Error(Errc::ParseError, "code spec needs 'generator', 'parity' or 'family'");
}

inline json code_to_json(const LinearCode& c) {
  json rows = json::array();
  for (const auto& r : c.generator().row_vectors()) {
    json row = json::array();
    for (std::size_t i = 0; i < r.size(); ++i) row.push_back(r.get(i) ? 1 : 0);
    rows.push_back(row);
  }
  return {{"n", c.length()}, {"generator", rows}};
}

inline json css_to_json(const CssCode& c) {
  return {{"hx", matrix_to_json(c.hx())},
          {"hz", matrix_to_json(c.hz())},
          {"parameters",
           {{"n", c.n()}, {"k", c.k()}, {"m_x", c.m_x()}, {"m_z", c.m_z()}, {"r_x", c.r_x()}, {"r_z", c.r_z()},
            {"locality", c.locality()}}}};
}

/// Accepts an export of css_to_json; the parameters block, if present, is
/// checked against the matrices.
inline CssCode css_from_json(const json& j) {
  auto c = CssCode::create(matrix_from_json(j.at("hx")), matrix_from_json(j.at("hz")));
  if (j.contains("parameters")) {
    const auto& p = j.at("parameters");
    if (p.contains("n") && p.at("n").get<std::size_t>() != c.n()) throw Error(Errc::ParseError, "parameter n disagrees");
    if (p.contains("k") && p.at("k").get<std::size_t>() != c.k()) throw Error(Errc::ParseError, "parameter k disagrees");
  }
  return c;
}

inline json hamiltonian_to_json(const StabilizerHamiltonian& h) {
  json terms = json::array();
  for (const auto& t : h.terms()) terms.push_back({{"basis", basis_name(t.basis)}, {"support", t.support.support()}});
  return {{"n", h.n()}, {"terms", terms}};
}

inline StabilizerHamiltonian hamiltonian_from_json(const json& j) {
  const auto n = field<std::size_t>(j, "n");
  std::vector<PauliTerm> terms;
  for (const auto& t : j.at("terms")) {
    const auto b = field<std::string>(t, "basis");
    if (b != "X" && b != "Z") throw Error(Errc::ParseError, "term basis must be X or Z");
    const auto s = field<std::vector<std::size_t>>(t, "support");
    for (auto q : s)
      if (q >= n) throw Error(Errc::ParseError, "term support out of range");
    terms.push_back({b == "X" ? Basis::X : Basis::Z, BitVector::from_support(n, s)});
  }
  return StabilizerHamiltonian::from_terms(n, std::move(terms));
}

// ---------------------------------------------------------------------------
// Circuits

inline json circuit_to_json(const LayeredCircuit& c) {
  json layers = json::array();
  for (const auto& layer : c.layers()) {
    json l = json::array();
    for (const auto& g : layer) {
      json e = {{"gate", gate_name(g.kind)}, {"q", g.qubits}};
      if (g.kind == GateKind::U) {
        json m = json::array();
        for (const auto& z : g.matrix) m.push_back({z.real(), z.imag()});
        e["matrix"] = m;
      }
      l.push_back(e);
    }
    layers.push_back(l);
  }
  return {{"n", c.qubits()}, {"layers", layers}};
}

inline LayeredCircuit circuit_from_json(const json& j) {
  LayeredCircuit c(field<std::size_t>(j, "n"));
  for (const auto& l : j.at("layers")) {
    std::vector<Gate> layer;
    for (const auto& e : l) {
      const auto name = field<std::string>(e, "gate");
      const auto q = field<std::vector<std::size_t>>(e, "q");
      GateKind kind;
      if (name == "H") kind = GateKind::H;
      else if (name == "X") kind = GateKind::X;
      else if (name == "Z") kind = GateKind::Z;
      else if (name == "T") kind = GateKind::T;
      else if (name == "CNOT") kind = GateKind::CNOT;
      else if (name == "CZ") kind = GateKind::CZ;
      else if (name == "U") kind = GateKind::U;
      else throw Error(Errc::InvalidCircuit, "unknown gate '" + name + "'");
      std::vector<Complex> m;
      if (kind == GateKind::U) {
        for (const auto& z : e.at("matrix")) {
          if (z.is_number()) m.emplace_back(z.get<double>(), 0.0);
          else m.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
        }
      }
      layer.push_back(Gate{kind, q, std::move(m)});
    }
    c.add_layer(std::move(layer));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Cluster reports

inline json clusters_to_json(const ClusterDecomposition& d, const std::vector<double>* masses = nullptr) {
  json cl = json::array();
  for (std::size_t i = 0; i < d.count(); ++i) {
    json e = {{"size", d.clusters[i].size()}, {"representative", BitVector::from_word(d.n, d.representative(i)).to_string()}};
    if (masses) e["mass"] = (*masses)[i];
    cl.push_back(e);
  }
  json out = {{"basis", basis_name(d.basis)},
              {"threshold", d.threshold},
              {"members", d.members.size()},
              {"clusters", cl},
              {"transitivity_violations", d.transitivity_violations}};
  out["min_inter_hamming"] = d.min_inter_hamming ? json(*d.min_inter_hamming) : json(nullptr);
  out["min_inter_coset"] = d.min_inter_coset ? json(*d.min_inter_coset) : json(nullptr);
  return out;
}

/// "coset_distance,multiplicity" rows, one per histogram bin.
inline std::string gap_profile_csv(const std::map<std::size_t, std::size_t>& histogram) {
  std::ostringstream out;
  out << "coset_distance,multiplicity\n";
  for (const auto& [v, c] : histogram) out << v << ',' << c << '\n';
  return out.str();
}

}  // namespace nlts::io
