#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "nlts/harness.hpp"

using namespace nlts;
using nlts::io::json;

namespace {

const std::string kRoot = NLTS_SOURCE_DIR;

ExperimentConfig config(const std::string& name) { return load_config(kRoot + "/configs/" + name); }

// Structural equality with a relative tolerance on floating-point leaves.
bool json_close(const json& a, const json& b, double tol, std::string path, std::string& where) {
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    if (std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)})) return true;
    where = path;
    return false;
  }
  if (a.type() != b.type() || a.size() != b.size()) {
    where = path;
    return false;
  }
  if (a.is_object()) {
    for (const auto& [k, v] : a.items()) {
      if (!b.contains(k) || !json_close(v, b.at(k), tol, path + "." + k, where)) {
        if (where.empty()) where = path + "." + k;
        return false;
      }
    }
    return true;
  }
  if (a.is_array()) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!json_close(a[i], b[i], tol, path + "[" + std::to_string(i) + "]", where)) return false;
    return true;
  }
  if (a != b) where = path;
  return a == b;
}

// A CSS code with n = 40, k = 5 and m_x = m_z = 40: H_x is all zero rows,
// H_z holds 35 unit rows plus 5 repeats.
CssCode forty() {
  BitMatrix hz(40, 40);
  for (std::size_t i = 0; i < 40; ++i) hz.set(i, i % 35, true);
  return CssCode::create(BitMatrix(40, 40), hz);
}

Errc config_error(const json& j) {
  try {
    config_from_json(j);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::IoFailure;
}

}  // namespace

TEST(Epsilon, ClosedFormExample) {
  const auto c = forty();
  ASSERT_EQ(c.k(), 5u);
  ASSERT_EQ(c.m_x(), 40u);
  const Constants k{1.0, 0.1, 0.01, "test"};
  // (1 / 400) * 1 * min{(4 / 160)^2, 0.01, 0.05} = 6.25e-4 / 400.
  EXPECT_NEAR(nlts_epsilon(c, k), 1.5625e-6, 1e-18);
  const Constants doubled{2.0, 0.1, 0.01, "test"};
  EXPECT_NEAR(nlts_epsilon(c, doubled), nlts_epsilon(c, k) / 2, 1e-18);
  // delta0 and c2 / 2 take over the minimum when small.
  EXPECT_NEAR(nlts_epsilon(c, {1.0, 0.1, 1e-4, "t"}), 1e-4 / 400, 1e-18);
  EXPECT_NEAR(nlts_epsilon(c, {1.0, 2e-4, 0.01, "t"}), 1e-4 / 400, 1e-18);
}

TEST(Epsilon, DegenerateCases) {
  const auto h = LinearCode::hamming_parity(3);
  const auto steane = CssCode::create(h, h);
  EXPECT_EQ(nlts_epsilon(steane, {1.0, 0.4, 0.3, "t"}), 0.0);
  const auto k0 = CssCode::create(BitMatrix::from_text("11\n"), BitMatrix::from_text("11\n"));
  try {
    nlts_epsilon(k0, {1, 1, 1, "t"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateCode);
  }
  EXPECT_THROW(nlts_epsilon(steane, {0.0, 0.4, 0.3, "t"}), Error);
}

TEST(Config, ShippedConfigsLoad) {
  for (const auto& entry : std::filesystem::directory_iterator(kRoot + "/configs")) {
    SCOPED_TRACE(entry.path().string());
    EXPECT_NO_THROW(load_config(entry.path().string()));
  }
  const auto c = config("tanner_z6.json");
  EXPECT_EQ(c.code.kind, CodeSpec::Kind::Tanner);
  EXPECT_EQ(c.code.a, (std::vector<Element>{1, 5}));
}

TEST(Config, RejectsMalformedInput) {
  const json base = json::parse(io::read_file(kRoot + "/configs/steane.json"));
  auto with = [&](const char* key, json v) {
    json j = base;
    j[key] = std::move(v);
    return j;
  };
  EXPECT_EQ(config_error(with("bogus", 1)), Errc::InvalidConfig);
  EXPECT_EQ(config_error(with("delta_grid", json::array({0.5, 0.1}))), Errc::InvalidConfig);
  EXPECT_EQ(config_error(with("delta_grid", json::array())), Errc::InvalidConfig);
  EXPECT_EQ(config_error(with("delta_grid", json::array({1.5}))), Errc::InvalidConfig);
  EXPECT_EQ(config_error(with("constants", {{"c1", -1}})), Errc::InvalidConfig);
  EXPECT_EQ(config_error(with("caps", {{"enumeration_n", 40}})), Errc::InvalidConfig);
  EXPECT_EQ(config_error(with("circuits", {{"depth_min", 3}, {"depth_max", 1}})), Errc::InvalidConfig);
  EXPECT_EQ(config_error(with("code", {{"type", "surface"}})), Errc::InvalidConfig);
  EXPECT_EQ(config_error(with("code", {{"type", "css"}, {"hx", {{"1", "1"}}}})), Errc::InvalidConfig);
  EXPECT_EQ(config_error(with("seed", "abc")), Errc::InvalidConfig);
  json nocode = base;
  nocode.erase("code");
  EXPECT_EQ(config_error(nocode), Errc::InvalidConfig);
  try {
    load_config(kRoot + "/configs/does_not_exist.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidConfig);
  }
}

TEST(Config, NonOrthogonalMatricesFailAtBuild) {
  json j = {{"code", {{"type", "css"}, {"hx", json::array({"110"})}, {"hz", json::array({"100"})}}}};
  const auto cfg = config_from_json(j);
  try {
    build_code(cfg.code);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotOrthogonal);
  }
  try {
    run_pipeline(cfg);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "build");
  }
}

TEST(Build, AllKindsProduceCodes) {
  const auto s = build_code(config("steane.json").code);
  EXPECT_EQ(s.code.n(), 7u);
  EXPECT_EQ(s.code.k(), 1u);
  const auto m = build_code(config("steane_matrices.json").code);
  EXPECT_TRUE(gf2::same_row_space(m.code.hx(), s.code.hx()));
  const auto t = build_code(config("tanner_z6.json").code);
  EXPECT_EQ(t.code.n(), 12u);
  EXPECT_EQ(t.code.k(), 2u);
  ASSERT_TRUE(t.tanner.has_value());
  EXPECT_TRUE(t.spectrum_g0.has_value());
}

TEST(FitConstants, SteaneValues) {
  const auto cfg = config("steane.json");
  const auto built = build_code(cfg.code);
  const auto k = fit_constants(built.code, cfg.delta_grid, cfg, 20);
  EXPECT_EQ(k.source, "fitted");
  EXPECT_NEAR(k.c2, 3.0 / 7, 1e-15);
  EXPECT_NEAR(k.c1, 6.0 / 7, 1e-12);
  // At 2/3 the low cut c1 delta n = 4 already covers every coset distance.
  EXPECT_NEAR(k.delta0, 2.0 / 3, 1e-15);
  const auto fixed = config("steane_matrices.json");
  const auto kf = fit_constants(build_code(fixed.code).code, fixed.delta_grid, fixed, 20);
  EXPECT_EQ(kf.source, "config");
  EXPECT_EQ(kf.c1, 1.0);
}

TEST(Pipeline, DeterministicUnderFixedSeed) {
  const auto cfg = config("steane.json");
  const auto a = run_pipeline(cfg);
  const auto b = run_pipeline(cfg);
  EXPECT_EQ(report_json(a), report_json(b));
  EXPECT_EQ(mass_table_csv(a), mass_table_csv(b));
  EXPECT_TRUE(a.passed);
  auto other = cfg;
  other.seed = cfg.seed + 1;
  EXPECT_NE(report_json(run_pipeline(other)), report_json(a));
}

TEST(Pipeline, SteaneMatchesGoldenReport) {
  const auto r = run_pipeline(config("steane.json"));
  const auto golden = json::parse(io::read_file(kRoot + "/tests/golden/steane.json"));
  std::string where;
  EXPECT_TRUE(json_close(r.body, golden, 1e-9, "", where)) << "first difference at " << where;
  EXPECT_EQ(r.body["clusters"]["delta0_threshold0"]["Z"]["clusters"].size(), 2u);
  EXPECT_EQ(r.body["verdict"]["passed"], true);
}

TEST(Pipeline, ShippedTannerConfigsPass) {
  for (const char* name : {"tanner_z6.json", "tanner_d4.json", "tanner_s3.json", "steane_matrices.json"}) {
    SCOPED_TRACE(name);
    const auto r = run_pipeline(config(name));
    EXPECT_TRUE(r.passed);
    for (const auto& f : r.failures) ADD_FAILURE() << f;
  }
}

TEST(Pipeline, ZeroLogicalsStopWithStageTag) {
  try {
    run_pipeline(config("tanner_k0.json"));
    FAIL() << "expected a stage error";
  } catch (const StageError& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateCode);
    EXPECT_EQ(e.stage(), "constants");
    EXPECT_NE(std::string(e.what()).find("[constants]"), std::string::npos);
  }
}

TEST(Emit, FormatsAndRowCounts) {
  auto cfg = config("steane.json");
  const auto r = run_pipeline(cfg);
  EXPECT_EQ(r.mass_table.size(), cfg.circuits.trials);
  const auto csv = mass_table_csv(r);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), cfg.circuits.trials + 1);
  const auto gap = gap_profiles_csv(r);
  std::size_t rows = 0;
  for (const auto& [label, hist] : r.gap_profiles) rows += hist.size();
  EXPECT_EQ(static_cast<std::size_t>(std::count(gap.begin(), gap.end(), '\n')), rows + 1);
  const auto dir = (std::filesystem::temp_directory_path() / "nlts_emit_test").string();
  std::filesystem::remove_all(dir);
  EXPECT_EQ(emit(r, Format::Json, dir, "s").size(), 2u);
  EXPECT_EQ(emit(r, Format::Csv, dir, "s").size(), 3u);
  EXPECT_EQ(emit(r, Format::Text, dir, "s").size(), 2u);
  EXPECT_EQ(json::parse(io::read_file(dir + "/s.json")), r.body);
  EXPECT_NE(report_text(r).find("verdict   PASS"), std::string::npos);
  EXPECT_THROW(parse_format("yaml"), Error);
  std::filesystem::remove_all(dir);
}

TEST(Io, RoundTrips) {
  std::mt19937_64 rng(5);
  BitMatrix m(5, 9);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 9; ++j) m.set(i, j, rng() & 1);
  EXPECT_EQ(io::matrix_from_json(io::matrix_to_json(m)).to_text(), m.to_text());
  EXPECT_EQ(io::matrix_from_json(json::array({"101", "011"})).to_text(), "101\n011\n");

  const auto g = FiniteGroup::dihedral(4);
  EXPECT_EQ(io::group_from_json(io::group_to_json(g)).order(), 8u);
  EXPECT_EQ(io::group_from_json({{"family", "symmetric"}, {"k", 3}}).order(), 6u);
  EXPECT_THROW(io::group_from_json({{"family", "mystery"}, {"k", 3}}), Error);

  Graph gr(4);
  gr.add_edge(0, 1);
  gr.add_edge(1, 2);
  gr.add_edge(2, 3);
  gr.add_edge(2, 3);
  const auto back = io::graph_from_edge_list(io::graph_to_edge_list(gr));
  EXPECT_EQ(back.vertex_count(), 4u);
  EXPECT_EQ(back.edge_count(), 4u);
  EXPECT_EQ(io::graph_to_edge_list(back), io::graph_to_edge_list(gr));

  const auto ham = LinearCode::hamming();
  EXPECT_TRUE(io::code_from_json(io::code_to_json(ham)).same_code(ham));
  EXPECT_TRUE(io::code_from_json({{"family", "repetition"}, {"n", 4}}).same_code(LinearCode::repetition(4)));

  const auto h = LinearCode::hamming_parity(3);
  const auto css = CssCode::create(h, h);
  const auto css2 = io::css_from_json(io::css_to_json(css));
  EXPECT_EQ(css2.hx().to_text(), css.hx().to_text());
  EXPECT_EQ(css2.hz().to_text(), css.hz().to_text());
  auto tampered = io::css_to_json(css);
  tampered["parameters"]["k"] = 2;
  EXPECT_THROW(io::css_from_json(tampered), Error);

  const auto sh = StabilizerHamiltonian::from_code(css);
  EXPECT_EQ(io::hamiltonian_to_json(io::hamiltonian_from_json(io::hamiltonian_to_json(sh))),
            io::hamiltonian_to_json(sh));

  const auto c = random_circuit(5, 3, rng);
  const auto c2 = io::circuit_from_json(io::circuit_to_json(c));
  EXPECT_EQ(c2.depth(), 3u);
  const auto p1 = simulate(c), p2 = simulate(c2);
  for (std::size_t i = 0; i < p1.dimension(); ++i) EXPECT_NEAR(std::abs(p1[i] - p2[i]), 0.0, 1e-12);

  EXPECT_THROW(io::parse("{not json"), Error);
  EXPECT_THROW(io::read_file("/nonexistent/file"), Error);
}
