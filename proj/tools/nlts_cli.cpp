// nlts_cli: command-line front end for the lab.
//
//   nlts_cli <build|params|verify-property1|clusters|simulate|facts|report>
//            --config <path> [--seed N] [--out DIR] [--delta X] [--max-n N]
//            [--format json|csv|text]
//
// Exit codes: 0 pass, 1 property violation, 2 configuration error, 3 cap exceeded.

#include <iostream>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "nlts/harness.hpp"

namespace {

using nlts::io::json;

enum Exit { kPass = 0, kViolation = 1, kConfig = 2, kCap = 3 };

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<double> delta;
  std::optional<std::size_t> max_n;
  std::string format = "json";
};

void flatten(const json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out << prefix << " = " << j.dump() << '\n';
  }
}

int print(const json& j, const Options& o, const std::string& name, bool ok) {
  std::string text;
  if (o.format == "text") {
    std::ostringstream s;
    flatten(j, "", s);
    text = s.str();
  } else {
    text = j.dump(2) + "\n";
  }
  std::cout << text;
  if (!o.out.empty()) {
    std::filesystem::create_directories(o.out);
    nlts::io::write_file((std::filesystem::path(o.out) / (name + (o.format == "text" ? ".txt" : ".json"))).string(), text);
  }
  return ok ? kPass : kViolation;
}

nlts::ExperimentConfig load(const Options& o) {
  auto cfg = nlts::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.max_n) {
    cfg.caps.enumeration_n = *o.max_n;
    cfg.caps.statevector_n = std::min<std::size_t>(*o.max_n, nlts::kMaxStatevectorQubits);
  }
  if (!o.out.empty()) cfg.out_dir = o.out;
  cfg.validate();
  return cfg;
}

int cmd_build(const Options& o) {
  const auto cfg = load(o);
  const auto built = nlts::build_code(cfg.code);
  json j = {{"code", nlts::io::css_to_json(built.code)},
            {"hamiltonian", nlts::io::hamiltonian_to_json(nlts::StabilizerHamiltonian::from_code(built.code))}};
  if (built.spectrum_g0) {
    j["square_graphs"] = {{"g0", nlts::io::spectral_to_json(*built.spectrum_g0)},
                          {"g1", nlts::io::spectral_to_json(*built.spectrum_g1)}};
  }
  return print(j, o, cfg.name + ".code", true);
}

int cmd_params(const Options& o) {
  const auto cfg = load(o);
  const auto built = nlts::build_code(cfg.code);
  const auto& c = built.code;
  if (c.n() > cfg.caps.enumeration_n) throw nlts::Error(nlts::Errc::CapExceeded, "n above enumeration cap");
  const auto d = nlts::css_distance(c, {cfg.caps.enumeration_n, std::nullopt});
  json j = nlts::io::css_to_json(c)["parameters"];
  j["d"] = d.d.value ? json(*d.d.value) : json(nullptr);
  const auto k = nlts::fit_constants(c, cfg.delta_grid, cfg, cfg.caps.enumeration_n);
  j["constants"] = {{"c1", k.c1}, {"c2", k.c2}, {"delta0", k.delta0}, {"source", k.source}};
  j["epsilon"] = nlts::nlts_epsilon(c, k);
  return print(j, o, cfg.name + ".params", true);
}

int cmd_property1(const Options& o) {
  const auto cfg = load(o);
  const auto built = nlts::build_code(cfg.code);
  const auto k = nlts::fit_constants(built.code, cfg.delta_grid, cfg, cfg.caps.enumeration_n);
  const auto grid = o.delta ? std::vector<double>{*o.delta} : cfg.delta_grid;
  nlts::Property1Options po;
  po.max_n = cfg.caps.enumeration_n;
  json rows = json::array();
  bool ok = true;
  std::ostringstream csv;
  csv << "delta,basis,coset_distance,multiplicity\n";
  for (double delta : grid) {
    const auto p = nlts::property1_check(built.code, delta, k.c1, k.c2, po);
    ok = ok && p.passes();
    rows.push_back({{"delta", delta}, {"passes", p.passes()}, {"violations_z", p.z.violations},
                    {"violations_x", p.x.violations}});
    for (const auto* side : {&p.z, &p.x})
      for (const auto& [v, c] : side->histogram)
        csv << delta << ',' << nlts::basis_name(side->basis) << ',' << v << ',' << c << '\n';
  }
  if (o.format == "csv") {
    std::cout << csv.str();
    if (!o.out.empty()) {
      std::filesystem::create_directories(o.out);
      nlts::io::write_file((std::filesystem::path(o.out) / (cfg.name + ".gap.csv")).string(), csv.str());
    }
    return ok ? kPass : kViolation;
  }
  return print({{"c1", k.c1}, {"c2", k.c2}, {"grid", rows}}, o, cfg.name + ".property1", ok);
}

int cmd_clusters(const Options& o) {
  const auto cfg = load(o);
  const auto built = nlts::build_code(cfg.code);
  const auto& c = built.code;
  const auto k = nlts::fit_constants(c, cfg.delta_grid, cfg, cfg.caps.enumeration_n);
  const double delta = o.delta.value_or(0.0);
  const auto thr = nlts::cluster_threshold(k.c1, delta, c.n());
  nlts::GDeltaOptions go;
  go.max_n = cfg.caps.enumeration_n;
  go.allow_sampling = false;
  json j = {{"delta", delta}, {"threshold", thr}};
  bool ok = true;
  for (auto b : {nlts::Basis::Z, nlts::Basis::X}) {
    const auto d = nlts::cluster_decompose(nlts::enumerate_gdelta(c, b, delta, go), c, thr);
    j[nlts::basis_name(b)] = nlts::io::clusters_to_json(d);
    ok = ok && nlts::cluster_size_audit(d, c).volume_violations == 0;
  }
  return print(j, o, cfg.name + ".clusters", ok);
}

int cmd_simulate(const Options& o) {
  const auto cfg = load(o);
  const auto built = nlts::build_code(cfg.code);
  const auto h = nlts::StabilizerHamiltonian::from_code(built.code);
  std::mt19937_64 rng(cfg.seed);
  json rows = json::array();
  for (std::size_t t = 0; t < cfg.circuits.trials; ++t) {
    const std::size_t depth = cfg.circuits.depth_min + rng() % (cfg.circuits.depth_max - cfg.circuits.depth_min + 1);
    const auto circuit = nlts::random_circuit(built.code.n(), depth, rng);
    const auto psi = nlts::simulate(circuit, cfg.caps.statevector_n);
    const auto e = nlts::energy_expectation(psi, h);
    rows.push_back({{"trial", t}, {"depth", depth}, {"energy_z", e.z}, {"energy_x", e.x}});
  }
  return print({{"n", built.code.n()}, {"states", rows}}, o, cfg.name + ".simulate", true);
}

int cmd_facts(const Options& o) {
  const auto cfg = load(o);
  const auto built = nlts::build_code(cfg.code);
  const std::size_t n = built.code.n();
  if (n > cfg.caps.statevector_n) throw nlts::Error(nlts::Errc::CapExceeded, "n above statevector cap");
  std::mt19937_64 rng(cfg.seed);
  std::size_t f1_bad = 0, f2_bad = 0;
  double slack = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < cfg.circuits.trials; ++t) {
    const std::size_t depth = cfg.circuits.depth_min + rng() % (cfg.circuits.depth_max - cfg.circuits.depth_min + 1);
    const auto circuit = nlts::random_circuit(n, depth, rng);
    const auto psi = nlts::simulate(circuit, cfg.caps.statevector_n);
    const auto [dz, dx] = nlts::measurement_distributions(psi);
    std::vector<nlts::gf2::Word> s, t2, s1, s2;
    for (nlts::gf2::Word w = 0; w < (nlts::gf2::Word{1} << n); ++w) {
      if (rng() % 4 == 0) s.push_back(w);
      if (rng() % 4 == 0) t2.push_back(w);
      if (std::popcount(w) <= 1) s1.push_back(w);
      if (std::popcount(w) + 1 >= static_cast<int>(n)) s2.push_back(w);
    }
    const auto f1 = nlts::fact1_check(dz, dx, s, t2);
    slack = std::min(slack, f1.slack);
    f1_bad += f1.holds ? 0 : 1;
    f2_bad += nlts::fact2_check(circuit, s1, s2).holds ? 0 : 1;
  }
  return print({{"trials", cfg.circuits.trials}, {"fact1_violations", f1_bad}, {"fact1_min_slack", slack},
                {"fact2_violations", f2_bad}},
               o, cfg.name + ".facts", f1_bad == 0 && f2_bad == 0);
}

int cmd_report(const Options& o) {
  const auto cfg = load(o);
  const auto report = nlts::run_pipeline(cfg);
  const auto files = nlts::emit(report, nlts::parse_format(o.format), cfg.out_dir, cfg.name);
  std::cout << nlts::report_text(report);
  for (const auto& f : files) std::cout << "wrote " << f << '\n';
  return report.passed ? kPass : kViolation;
}

int exit_code(const nlts::Error& e) {
  switch (e.code()) {
    case nlts::Errc::InvalidConfig:
    case nlts::Errc::ParseError:
    case nlts::Errc::IoFailure: return kConfig;
    case nlts::Errc::CapExceeded: return kCap;
    default: return kViolation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum Tanner NLTS lab"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "experiment config (JSON)")->required();
    sub->add_option("--seed", o.seed, "override the config seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--delta", o.delta, "single delta for verify-property1 and clusters");
    sub->add_option("--max-n", o.max_n, "enumeration cap (at most 26)");
    sub->add_option("--format", o.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  };
  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Sub subs[] = {{"build", "build the code and Hamiltonian", cmd_build},
                      {"params", "code parameters, constants and epsilon", cmd_params},
                      {"verify-property1", "dichotomy scan over the delta grid", cmd_property1},
                      {"clusters", "cluster decomposition of G^delta", cmd_clusters},
                      {"simulate", "energies of random low-depth circuit states", cmd_simulate},
                      {"facts", "randomized uncertainty and spread audits", cmd_facts},
                      {"report", "full pipeline with report emission", cmd_report}};
  std::vector<std::pair<CLI::App*, int (*)(const Options&)>> handlers;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_common(sub);
    handlers.emplace_back(sub, s.run);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kConfig;
  }
  try {
    for (const auto& [sub, run] : handlers)
      if (sub->parsed()) return run(o);
  } catch (const nlts::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kConfig;
}
