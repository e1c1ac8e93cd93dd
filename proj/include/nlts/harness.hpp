#pragma once

// Experiment configuration, the epsilon calculator and the end-to-end
// pipeline: code -> Hamiltonian -> G^delta -> clusters -> circuit states.

#include <chrono>
#include <filesystem>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nlts/classical_codes.hpp"
#include "nlts/clustering.hpp"
#include "nlts/css.hpp"
#include "nlts/error.hpp"
#include "nlts/graphs.hpp"
#include "nlts/groups.hpp"
#include "nlts/hamiltonian.hpp"
#include "nlts/io.hpp"
#include "nlts/quantumsim.hpp"

namespace nlts {

inline constexpr const char* kVersion = "0.3.0";

/// An Error raised inside run_pipeline, tagged with the stage it came from.
class StageError : public Error {
 public:
  StageError(Errc code, std::string stage, const std::string& what)
      : Error(code, "[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

// ---------------------------------------------------------------------------
// Configuration

struct CodeSpec {
  enum class Kind { Css, HammingCss, Tanner } kind = Kind::HammingCss;
  BitMatrix hx, hz;              // Css
  std::size_t hamming_r = 3;     // HammingCss
  io::json group;                // Tanner
  std::vector<Element> a, b;
  io::json code_a, code_b;
};

struct CircuitSampler {
  std::size_t depth_min = 1;
  std::size_t depth_max = 3;
  std::size_t trials = 20;
};

struct Caps {
  std::size_t enumeration_n = 20;  // G^delta, clustering, property scans
  std::size_t statevector_n = 20;
  std::size_t dense_n = 12;        // exact diagonalization
  std::size_t audit_triples = std::size_t{1} << 22;
};

struct ExperimentConfig {
  std::string name = "experiment";
  CodeSpec code;
  std::vector<double> delta_grid{0.0};
  std::optional<double> c1, c2, delta0;
  std::optional<double> epsilon;
  CircuitSampler circuits;
  std::uint64_t seed = 1;
  Caps caps;
  std::string out_dir = "out";

  void validate() const {
    if (delta_grid.empty()) throw Error(Errc::InvalidConfig, "delta_grid is empty");
    for (std::size_t i = 0; i < delta_grid.size(); ++i) {
      if (!(delta_grid[i] >= 0 && delta_grid[i] <= 1)) throw Error(Errc::InvalidConfig, "delta outside [0, 1]");
      if (i > 0 && delta_grid[i] <= delta_grid[i - 1]) throw Error(Errc::InvalidConfig, "delta_grid must increase");
    }
    for (auto v : {c1, c2, delta0})
      if (v && !(*v > 0)) throw Error(Errc::InvalidConfig, "constants must be positive");
    if (epsilon && !(*epsilon >= 0)) throw Error(Errc::InvalidConfig, "epsilon must be non-negative");
    if (circuits.depth_min > circuits.depth_max) throw Error(Errc::InvalidConfig, "depth_min > depth_max");
    if (caps.enumeration_n > 26) throw Error(Errc::InvalidConfig, "enumeration_n above the hard cap 26");
    if (caps.statevector_n > kMaxStatevectorQubits) throw Error(Errc::InvalidConfig, "statevector_n above 26");
    if (caps.dense_n > kMaxDenseQubits) throw Error(Errc::InvalidConfig, "dense_n above 12");
  }
};

namespace detail {

inline void require_keys(const io::json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw Error(Errc::InvalidConfig, where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw Error(Errc::InvalidConfig, "unknown key '" + k + "' in " + where);
}

template <class T>
T config_value(const io::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const io::json::exception&) {
    throw Error(Errc::InvalidConfig, std::string("bad value for '") + key + "'");
  }
}

}  // namespace detail

inline ExperimentConfig config_from_json(const io::json& j) {
  detail::require_keys(j, {"name", "code", "delta_grid", "constants", "epsilon", "circuits", "seed", "caps", "output"},
                       "config");
  ExperimentConfig c;
  c.name = detail::config_value<std::string>(j, "name", c.name);
  if (!j.contains("code")) throw Error(Errc::InvalidConfig, "config needs a 'code' block");
  const auto& code = j.at("code");
  detail::require_keys(code, {"type", "hx", "hz", "r", "group", "A", "B", "code_a", "code_b"}, "code");
  const auto type = detail::config_value<std::string>(code, "type", "");
  try {
    if (type == "css") {
      c.code.kind = CodeSpec::Kind::Css;
      c.code.hx = io::matrix_from_json(code.at("hx"));
      c.code.hz = io::matrix_from_json(code.at("hz"));
    } else if (type == "hamming_css") {
      c.code.kind = CodeSpec::Kind::HammingCss;
      c.code.hamming_r = detail::config_value<std::size_t>(code, "r", 3);
    } else if (type == "tanner") {
      c.code.kind = CodeSpec::Kind::Tanner;
      c.code.group = code.at("group");
      c.code.a = code.at("A").get<std::vector<Element>>();
      c.code.b = code.at("B").get<std::vector<Element>>();
      c.code.code_a = code.at("code_a");
      c.code.code_b = code.at("code_b");
    } else {
      throw Error(Errc::InvalidConfig, "code.type must be css, hamming_css or tanner");
    }
  } catch (const io::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("code block: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidConfig) throw;
    throw Error(Errc::InvalidConfig, std::string(errc_name(e.code())) + ": " + e.message());
  }
  c.delta_grid = detail::config_value<std::vector<double>>(j, "delta_grid", c.delta_grid);
  if (j.contains("constants")) {
    const auto& k = j.at("constants");
    detail::require_keys(k, {"c1", "c2", "delta0"}, "constants");
    if (k.contains("c1")) c.c1 = detail::config_value<double>(k, "c1", 0);
    if (k.contains("c2")) c.c2 = detail::config_value<double>(k, "c2", 0);
    if (k.contains("delta0")) c.delta0 = detail::config_value<double>(k, "delta0", 0);
  }
  if (j.contains("epsilon")) c.epsilon = detail::config_value<double>(j, "epsilon", 0);
  if (j.contains("circuits")) {
    const auto& k = j.at("circuits");
    detail::require_keys(k, {"depth_min", "depth_max", "trials"}, "circuits");
    c.circuits.depth_min = detail::config_value<std::size_t>(k, "depth_min", c.circuits.depth_min);
    c.circuits.depth_max = detail::config_value<std::size_t>(k, "depth_max", c.circuits.depth_max);
    c.circuits.trials = detail::config_value<std::size_t>(k, "trials", c.circuits.trials);
  }
  c.seed = detail::config_value<std::uint64_t>(j, "seed", c.seed);
  if (j.contains("caps")) {
    const auto& k = j.at("caps");
    detail::require_keys(k, {"enumeration_n", "statevector_n", "dense_n", "audit_triples"}, "caps");
    c.caps.enumeration_n = detail::config_value<std::size_t>(k, "enumeration_n", c.caps.enumeration_n);
    c.caps.statevector_n = detail::config_value<std::size_t>(k, "statevector_n", c.caps.statevector_n);
    c.caps.dense_n = detail::config_value<std::size_t>(k, "dense_n", c.caps.dense_n);
    c.caps.audit_triples = detail::config_value<std::size_t>(k, "audit_triples", c.caps.audit_triples);
  }
  if (j.contains("output")) {
    detail::require_keys(j.at("output"), {"dir"}, "output");
    c.out_dir = detail::config_value<std::string>(j.at("output"), "dir", c.out_dir);
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  try {
    return config_from_json(io::parse(io::read_file(path)));
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidConfig) throw;
    throw Error(Errc::InvalidConfig, std::string(errc_name(e.code())) + ": " + e.message());
  }
}

// ---------------------------------------------------------------------------
// Building the code

struct BuiltCode {
  CssCode code;
  std::optional<QuantumTannerCode> tanner;
  std::optional<SpectralReport> spectrum_g0;
  std::optional<SpectralReport> spectrum_g1;
  std::size_t delta = 0;
  std::size_t v1_count = 0;
};

inline BuiltCode build_code(const CodeSpec& spec) {
  switch (spec.kind) {
    case CodeSpec::Kind::Css: return {CssCode::create(spec.hx, spec.hz), {}, {}, {}, 0, 0};
    case CodeSpec::Kind::HammingCss: {
      const auto h = LinearCode::hamming_parity(spec.hamming_r);
      return {CssCode::create(h, h), {}, {}, {}, 0, 0};
    }
    case CodeSpec::Kind::Tanner: {
      const auto g = io::group_from_json(spec.group);
      const auto x = build_balanced_product(g, GeneratorSet{spec.a}, GeneratorSet{spec.b});
      const LocalCodePair pair(io::code_from_json(spec.code_a), io::code_from_json(spec.code_b));
      auto q = quantum_tanner(x, pair);
      BuiltCode out{q.code, std::nullopt, spectral_lambda(q.squares.g0), spectral_lambda(q.squares.g1), x.delta(),
                    q.squares.g1.vertex_count()};
      out.tanner = std::move(q);
      return out;
    }
  }
  throw Error(Errc::InvalidConfig, "unknown code kind");
}

// ---------------------------------------------------------------------------
// Constants

struct Constants {
  double c1 = 0;
  double c2 = 0;
  double delta0 = 0;
  std::string source;  // "config" or "fitted"
};

/// epsilon = (1 / 400 c1) (min(m_x, m_z) / n) min(((k - 1) / 4n)^2, delta0, c2 / 2).
inline double nlts_epsilon(const CssCode& code, const Constants& k) {
  if (code.k() == 0) throw Error(Errc::DegenerateCode, "k = 0: no logical qubits");
  if (!(k.c1 > 0 && k.c2 > 0 && k.delta0 > 0)) throw Error(Errc::PreconditionFailed, "constants must be positive");
  const double n = static_cast<double>(code.n());
  const double q = (static_cast<double>(code.k()) - 1.0) / (4.0 * n);
  const double mmin = static_cast<double>(std::min(code.m_x(), code.m_z()));
  return (1.0 / (400.0 * k.c1)) * (mmin / n) * std::min({q * q, k.delta0, k.c2 / 2.0});
}

/// Constants not fixed by the config are fitted: c2 = d / n, c1 the smallest
/// value making every observed coset distance below c2 n at most c1 delta n
/// over the positive grid points, and delta0 the largest grid point at which
/// the dichotomy still holds from the bottom of the grid.
inline Constants fit_constants(const CssCode& code, const std::vector<double>& grid, const ExperimentConfig& cfg,
                               std::size_t max_n) {
  if (code.k() == 0) throw Error(Errc::DegenerateCode, "k = 0: no logical qubits");
  Constants k;
  k.source = cfg.c1 && cfg.c2 && cfg.delta0 ? "config" : "fitted";
  Property1Options opts;
  opts.max_n = max_n;
  if (cfg.c2) {
    k.c2 = *cfg.c2;
  } else {
    const auto d = css_distance(code, {max_n, std::nullopt}).d;
    k.c2 = static_cast<double>(*d.value) / static_cast<double>(code.n());
  }
  if (cfg.c1) {
    k.c1 = *cfg.c1;
  } else {
    const double high = k.c2 * static_cast<double>(code.n());
    for (double delta : grid) {
      if (delta <= 0) continue;
      for (auto b : {Basis::Z, Basis::X}) {
        const auto scan = property1_scan(code, b, delta, 0, 0, opts);
        for (const auto& [v, c] : scan.histogram)
          if (static_cast<double>(v) < high - 1e-9)
            k.c1 = std::max(k.c1, static_cast<double>(v) / (delta * static_cast<double>(code.n())));
      }
    }
    if (k.c1 == 0) k.c1 = 1.0 / static_cast<double>(code.n());
  }
  if (cfg.delta0) {
    k.delta0 = *cfg.delta0;
  } else {
    const auto d0 = empirical_delta0(code, k.c1, k.c2, grid, opts);
    k.delta0 = d0 && *d0 > 0 ? *d0 : 1.0 / static_cast<double>(std::max(code.m_x(), code.m_z()));
  }
  return k;
}

// ---------------------------------------------------------------------------
// Pipeline

struct MassRow {
  std::size_t trial = 0;
  std::size_t depth = 0;
  double energy = 0;
  double mass_z = 0;
  double mass_x = 0;
  double bound_z = 0;
  double bound_x = 0;
  bool hypothesis = false;
  double max_cluster_z = 0;
  double max_cluster_x = 0;
  std::string certificate;  // "valid", "invalid" or the precondition that failed
};

struct NltsReport {
  io::json body;  // deterministic under a fixed seed
  io::json timing;
  std::vector<std::pair<std::string, std::map<std::size_t, std::size_t>>> gap_profiles;  // label -> histogram
  std::vector<MassRow> mass_table;
  bool passed = true;
  std::vector<std::string> failures;
};

namespace detail {

template <class F>
auto stage(const char* name, io::json& timing, F&& f) -> decltype(f()) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      timing[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    } else {
      auto r = f();
      timing[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return r;
    }
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(e.code(), name, e.message());
  }
}

inline io::json optional_json(const std::optional<std::size_t>& v) { return v ? io::json(*v) : io::json(nullptr); }

inline io::json distance_json(const DistanceResult& r) {
  const char* bound = r.bound == Bound::Exact ? "exact" : r.bound == Bound::Upper ? "upper" : "lower";
  return {{"value", optional_json(r.value)}, {"bound", bound}};
}

inline std::vector<Word> cluster_union(const ClusterDecomposition& d, const std::vector<std::size_t>& ids) {
  std::vector<Word> out;
  for (auto i : ids)
    for (auto w : d.words(i)) out.push_back(w);
  return out;
}

}  // namespace detail

inline NltsReport run_pipeline(const ExperimentConfig& cfg) {
  cfg.validate();
  NltsReport rep;
  auto& body = rep.body;
  auto fail = [&](const std::string& what) {
    rep.passed = false;
    rep.failures.push_back(what);
  };

  body["provenance"] = {{"name", cfg.name}, {"seed", cfg.seed}, {"version", kVersion}};

  const auto built = detail::stage("build", rep.timing, [&] { return build_code(cfg.code); });
  const auto& code = built.code;
  body["code"] = io::css_to_json(code)["parameters"];
  if (built.tanner) {
    body["code"]["delta"] = built.delta;
    body["code"]["lambda_g0"] = built.spectrum_g0->lambda;
    body["code"]["lambda_g1"] = built.spectrum_g1->lambda;
  }
  if (code.n() > cfg.caps.enumeration_n)
    throw StageError(Errc::CapExceeded, "build", "n = " + std::to_string(code.n()) + " above enumeration cap");

  detail::stage("hamiltonian", rep.timing, [&] {
    const auto h = StabilizerHamiltonian::from_code(code);
    const auto comm = commuting_check(h);
    GroundSpaceOptions go;
    go.ed_max_n = cfg.caps.dense_n;
    const auto gs = ground_space_dimension(h, go);
    body["hamiltonian"] = {{"terms", h.term_count()},
                           {"locality", h.locality()},
                           {"commuting", comm.commuting},
                           {"ground_space_predicted", gs.predicted},
                           {"ground_space_diagonalized", detail::optional_json(gs.diagonalized)}};
    if (!comm.commuting) fail("hamiltonian: non-commuting terms");
    if (gs.diagonalized && !gs.verified) fail("hamiltonian: ground space dimension");
  });

  const auto dist = detail::stage("distance", rep.timing, [&] {
    return css_distance(code, {cfg.caps.enumeration_n, std::nullopt});
  });
  body["code"]["d_x"] = detail::distance_json(dist.d_x);
  body["code"]["d_z"] = detail::distance_json(dist.d_z);
  body["code"]["d"] = detail::distance_json(dist.d);

  const auto constants = detail::stage("constants", rep.timing, [&] {
    return fit_constants(code, cfg.delta_grid, cfg, cfg.caps.enumeration_n);
  });
  body["constants"] = {{"c1", constants.c1}, {"c2", constants.c2}, {"delta0", constants.delta0},
                       {"source", constants.source}};
  if (built.tanner) {
    const auto claim = claim1_constants(RobustnessParams{1, 1}, built.delta, code, built.v1_count);
    body["constants"]["claim"] = {{"c1", claim.c1}, {"c2", claim.c2}, {"delta0", claim.delta0}};
  }

  const auto eps = detail::stage("epsilon", rep.timing, [&] {
    const double threshold = nlts_epsilon(code, constants);
    body["epsilon"] = {{"threshold", threshold}, {"used", cfg.epsilon.value_or(threshold)}};
    return cfg.epsilon.value_or(threshold);
  });

  detail::stage("property1", rep.timing, [&] {
    Property1Options opts;
    opts.max_n = cfg.caps.enumeration_n;
    io::json grid = io::json::array();
    for (double delta : cfg.delta_grid) {
      const auto p = property1_check(code, delta, constants.c1, constants.c2, opts);
      grid.push_back({{"delta", delta},
                      {"passes", p.passes()},
                      {"violations_z", p.z.violations},
                      {"violations_x", p.x.violations},
                      {"members_z", p.z.members},
                      {"members_x", p.x.members},
                      {"best_fit", {{"a", p.fit.a}, {"b", detail::optional_json(p.fit.b)}}}});
      std::ostringstream label;
      label << "delta=" << delta;
      rep.gap_profiles.emplace_back("Z " + label.str(), p.z.histogram);
      rep.gap_profiles.emplace_back("X " + label.str(), p.x.histogram);
      if (!p.passes()) fail("property1 at delta " + label.str());
    }
    body["property1"] = grid;
  });

  detail::stage("gdelta", rep.timing, [&] {
    io::json audits = io::json::array();
    for (double delta : cfg.delta_grid) {
      for (auto b : {Basis::Z, Basis::X}) {
        GDeltaOptions go;
        go.max_n = cfg.caps.enumeration_n;
        go.allow_sampling = false;
        const auto set = enumerate_gdelta(code, b, delta, go);
        const auto xo = xor_closure_audit(set, code);
        const auto tr = triangle_audit(set, code, cfg.caps.audit_triples, cfg.seed);
        audits.push_back({{"delta", delta},
                          {"basis", basis_name(b)},
                          {"size", set.size()},
                          {"xor_violations", xo.violations},
                          {"triangle_triples", tr.triples},
                          {"triangle_exhaustive", tr.exhaustive},
                          {"triangle_violations", tr.violations}});
        if (xo.violations || tr.violations) fail("gdelta audit");
      }
    }
    body["gdelta"] = audits;
  });

  // Clusters at delta = 0 with threshold 0, and at delta = eps1 with the
  // threshold 2 c1 eps1 n used by the circuit-state checks.
  const double eps1 = 200.0 * static_cast<double>(code.n()) * eps /
                      static_cast<double>(std::max<std::size_t>(1, std::min(code.m_x(), code.m_z())));
  const std::size_t thr = cluster_threshold(constants.c1, eps1, code.n());
  struct Clusters {
    ApproximateCodewordSet gz, gx;
    ClusterDecomposition bz, bx;
  };
  const auto cl = detail::stage("clusters", rep.timing, [&] {
    GDeltaOptions go;
    go.max_n = cfg.caps.enumeration_n;
    go.allow_sampling = false;
    io::json out;
    for (auto b : {Basis::Z, Basis::X}) {
      const auto zero = cluster_decompose(enumerate_gdelta(code, b, 0.0, go), code, 0);
      out["delta0_threshold0"][basis_name(b)] = io::clusters_to_json(zero);
      if (zero.count() != (std::size_t{1} << code.k())) fail("cluster count at delta 0");
      if (dist.d.value && zero.min_inter_hamming != dist.d.value) fail("inter-cluster distance at delta 0");
    }
    Clusters c{enumerate_gdelta(code, Basis::Z, std::min(1.0, eps1), go),
               enumerate_gdelta(code, Basis::X, std::min(1.0, eps1), go), {}, {}};
    c.bz = cluster_decompose(c.gz, code, thr);
    c.bx = cluster_decompose(c.gx, code, thr);
    out["epsilon1"] = eps1;
    out["threshold"] = thr;
    out["Z"] = io::clusters_to_json(c.bz);
    out["X"] = io::clusters_to_json(c.bx);
    const auto sz = cluster_size_audit(c.bz, code), sx = cluster_size_audit(c.bx, code);
    out["size_audit"] = {{"literal_violations", sz.literal_violations + sx.literal_violations},
                         {"volume_violations", sz.volume_violations + sx.volume_violations}};
    if (sz.volume_violations || sx.volume_violations) fail("cluster size bound");
    body["clusters"] = out;
    return c;
  });

  detail::stage("circuits", rep.timing, [&] {
    if (code.n() > cfg.caps.statevector_n) {
      body["circuits"] = {{"skipped", "n above statevector cap"}};
      return;
    }
    std::mt19937_64 rng(cfg.seed);
    std::size_t hyp = 0, markov_bad = 0, lemma1_bad = 0, fact1_bad = 0, fact2_bad = 0, certificates = 0;
    double fact1_slack = std::numeric_limits<double>::infinity(), min_energy = std::numeric_limits<double>::infinity();
    std::optional<double> best_depth_bound;
    const auto h = StabilizerHamiltonian::from_code(code);
    for (std::size_t t = 0; t < cfg.circuits.trials; ++t) {
      const std::size_t depth =
          cfg.circuits.depth_min + rng() % (cfg.circuits.depth_max - cfg.circuits.depth_min + 1);
      const auto circuit = random_circuit(code.n(), depth, rng);
      const auto psi = simulate(circuit, cfg.caps.statevector_n);
      const auto [dz, dx] = measurement_distributions(psi);
      const auto e = energy_from_distributions(h, dz, dx);
      MassRow row;
      row.trial = t;
      row.depth = depth;
      row.energy = e.total();
      min_energy = std::min(min_energy, e.total());
      if (std::min(code.m_x(), code.m_z()) > 0) {
        const auto mb = mass_bound_check(dz, dx, code, eps);
        row.mass_z = mb.mass_z;
        row.mass_x = mb.mass_x;
        row.bound_z = mb.bound_z;
        row.bound_x = mb.bound_x;
        row.hypothesis = mb.hypothesis;
        hyp += mb.hypothesis ? 1 : 0;
        if (!mb.holds) ++markov_bad;
      }
      const auto l1 = lemma1_check(dz, dx, cl.bz, cl.bx, code, constants.c1, eps1);
      row.max_cluster_z = l1.max_mass_z;
      row.max_cluster_x = l1.max_mass_x;
      if (!l1.holds()) ++lemma1_bad;
      const auto f1 = fact1_check(dz, dx, cl.gz.members, cl.gx.members);
      fact1_slack = std::min(fact1_slack, f1.slack);
      if (!f1.holds) ++fact1_bad;
      try {
        const auto cert = spread_certificate(cl.bz, dz);
        row.certificate = cert.valid ? "valid" : "invalid";
        if (cert.valid && !cert.m_prime.empty()) {
          ++certificates;
          const auto f2 =
              fact2_check(circuit, detail::cluster_union(cl.bz, cert.m), detail::cluster_union(cl.bz, cert.m_prime));
          if (!f2.holds) ++fact2_bad;
          if (cert.depth_bound) best_depth_bound = std::max(best_depth_bound.value_or(*cert.depth_bound), *cert.depth_bound);
        }
      } catch (const Error& err) {
        if (err.code() != Errc::PreconditionFailed) throw;
        row.certificate = "precondition";
      }
      rep.mass_table.push_back(row);
    }
    body["circuits"] = {{"trials", cfg.circuits.trials},
                        {"depth_min", cfg.circuits.depth_min},
                        {"depth_max", cfg.circuits.depth_max},
                        {"min_energy", cfg.circuits.trials ? io::json(min_energy) : io::json(nullptr)},
                        {"hypothesis_met", hyp},
                        {"markov_violations", markov_bad},
                        {"lemma1_violations", lemma1_bad},
                        {"fact1_violations", fact1_bad},
                        {"fact1_min_slack", cfg.circuits.trials ? io::json(fact1_slack) : io::json(nullptr)},
                        {"spread_certificates", certificates},
                        {"fact2_violations", fact2_bad},
                        {"best_depth_bound", best_depth_bound ? io::json(*best_depth_bound) : io::json(nullptr)}};
    if (markov_bad) fail("mass bound");
    if (lemma1_bad) fail("clustering dichotomy");
    if (fact1_bad) fail("fact 1");
    if (fact2_bad) fail("fact 2");
  });

  body["verdict"] = {{"passed", rep.passed}, {"failures", rep.failures}};
  return rep;
}

// ---------------------------------------------------------------------------
// Emission

enum class Format { Json, Csv, Text };

inline Format parse_format(const std::string& s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  if (s == "text") return Format::Text;
  throw Error(Errc::InvalidConfig, "format must be json, csv or text");
}

inline std::string report_json(const NltsReport& r) { return r.body.dump(2) + "\n"; }

inline std::string gap_profiles_csv(const NltsReport& r) {
  std::ostringstream out;
  out << "profile,coset_distance,multiplicity\n";
  for (const auto& [label, hist] : r.gap_profiles)
    for (const auto& [v, c] : hist) out << label << ',' << v << ',' << c << '\n';
  return out.str();
}

inline std::string mass_table_csv(const NltsReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "trial,depth,energy,mass_z,mass_x,bound_z,bound_x,hypothesis,max_cluster_z,max_cluster_x,certificate\n";
  for (const auto& m : r.mass_table)
    out << m.trial << ',' << m.depth << ',' << m.energy << ',' << m.mass_z << ',' << m.mass_x << ',' << m.bound_z
        << ',' << m.bound_x << ',' << (m.hypothesis ? 1 : 0) << ',' << m.max_cluster_z << ',' << m.max_cluster_x
        << ',' << m.certificate << '\n';
  return out.str();
}

inline std::string report_text(const NltsReport& r) {
  const auto& b = r.body;
  std::ostringstream out;
  out << "name      " << b["provenance"]["name"].get<std::string>() << '\n';
  out << "code      [[" << b["code"]["n"] << ',' << b["code"]["k"] << ',' << b["code"]["d"]["value"] << "]]  m_x "
      << b["code"]["m_x"] << "  m_z " << b["code"]["m_z"] << "  locality " << b["code"]["locality"] << '\n';
  out << "constants c1 " << b["constants"]["c1"] << "  c2 " << b["constants"]["c2"] << "  delta0 "
      << b["constants"]["delta0"] << " (" << b["constants"]["source"].get<std::string>() << ")\n";
  out << "epsilon   " << b["epsilon"]["threshold"] << '\n';
  if (b.contains("clusters"))
    out << "clusters  " << b["clusters"]["delta0_threshold0"]["Z"]["clusters"].size() << " at delta 0\n";
  if (b.contains("circuits") && b["circuits"].contains("trials"))
    out << "circuits  " << b["circuits"]["trials"] << " trials, fact1 min slack " << b["circuits"]["fact1_min_slack"]
        << '\n';
  out << "verdict   " << (r.passed ? "PASS" : "FAIL") << '\n';
  for (const auto& f : r.failures) out << "  " << f << '\n';
  return out.str();
}

/// Writes <dir>/<name>.json (or .csv tables, or .txt) plus <name>.timing.json.
inline std::vector<std::string> emit(const NltsReport& r, Format f, const std::string& dir, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + dir);
  const auto base = (std::filesystem::path(dir) / name).string();
  std::vector<std::string> files;
  auto put = [&](const std::string& path, const std::string& text) {
    io::write_file(path, text);
    files.push_back(path);
  };
  switch (f) {
    case Format::Json: put(base + ".json", report_json(r)); break;
    case Format::Csv:
      put(base + ".gap.csv", gap_profiles_csv(r));
      put(base + ".mass.csv", mass_table_csv(r));
      break;
    case Format::Text: put(base + ".txt", report_text(r)); break;
  }
  put(base + ".timing.json", r.timing.dump(2) + "\n");
  return files;
}

}  // namespace nlts
