#include "coarse/config.hpp"
#include "coarse/error.hpp"
#include "coarse/io.hpp"
#include "coarse/spaces.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

namespace {

std::string fixture(const std::string& rel) { return std::string(FIXTURE_DIR) + "/" + rel; }

std::string temp_file(const std::string& name, const std::string& content) {
  const auto dir = std::filesystem::temp_directory_path() / "coarse_io_tests";
  std::filesystem::create_directories(dir);
  const auto p = (dir / name).string();
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST(Io, WindowDocumentsLoadAndValidate) {
  const auto lw = coarse::load_window_json(fixture("metrics/path4.json"));
  EXPECT_TRUE(lw.verdict.valid);
  EXPECT_EQ(lw.window.size(), 4u);
  EXPECT_FALSE(lw.window.has_boundary());
  const auto bad = coarse::load_window_json(fixture("metrics/triangle-violation.json"));
  EXPECT_FALSE(bad.verdict.valid);
  EXPECT_EQ(bad.verdict.violation, "triangle");
  EXPECT_THROW(coarse::load_valid_window(fixture("metrics/triangle-violation.json")), coarse::ConfigError);
  EXPECT_THROW(coarse::make_space("file:" + fixture("metrics/triangle-violation.json")), coarse::ConfigError);
}

TEST(Io, WindowShapeErrors) {
  EXPECT_THROW(coarse::load_window_json(temp_file("short.json", R"({"points": ["a", "b"], "dist": [[0, 1]]})")),
               coarse::ConfigError);
  EXPECT_THROW(coarse::load_window_json(temp_file("dup.json", R"({"points": ["a", "a"], "dist": [[0, 1], [1, 0]]})")),
               coarse::ConfigError);
  EXPECT_THROW(coarse::load_window_json(temp_file("extra.json", R"({"points": ["a"], "dist": [[0]], "x": 1})")),
               coarse::ConfigError);
  EXPECT_THROW(coarse::load_window_json("/nonexistent/window.json"), coarse::ConfigError);
}

TEST(Io, OperatorTripletsRoundTrip) {
  auto w = std::make_shared<const coarse::MetricWindow>(coarse::z_window(3));
  coarse::SparseMatrix m(w->size(), w->size());
  m.set(0, 1, coarse::make_rational(1, 3));
  m.set(4, 2, -2);
  const coarse::BandedOperator op(w, m);
  const auto j = coarse::operator_to_triplets(op);
  EXPECT_EQ(j.dump(), R"([["-3","-2","1/3"],["1","-1","-2"]])");
  EXPECT_EQ(coarse::operator_from_triplets(j, w), op);
  const auto mm = coarse::matrix_market(op);
  EXPECT_NE(mm.find("7 7 2"), std::string::npos);
  EXPECT_THROW(coarse::operator_from_triplets(coarse::Json::parse(R"([["9","0","1"]])"), w), coarse::ConfigError);
}

TEST(Io, ThetaDocument) {
  auto w = std::make_shared<const coarse::MetricWindow>(coarse::z_window(2));
  const auto doc = coarse::Json::parse(R"({"terms": [{"a": "0", "b": "1", "T": [["0", "1", "1/2"]]}]})");
  const auto th = coarse::theta_from_json(doc, w);
  EXPECT_EQ(th.size(), 1u);
  EXPECT_EQ(th.provenance(), coarse::ThetaProvenance::user_supplied);
  EXPECT_THROW(coarse::theta_from_json(coarse::Json::parse(R"({"terms": []})"), w), coarse::ConfigError);
}

TEST(Io, WitnessDocument) {
  auto w = std::make_shared<const coarse::MetricWindow>(coarse::discrete_points(3));
  const auto f = coarse::load_witness_json(fixture("property_a/witness-small.json"), w);
  EXPECT_EQ(f.support_bound, 1);
  EXPECT_EQ(f.sets[1].size(), 3u);
  EXPECT_THROW(coarse::witness_from_json(coarse::Json::parse(R"({"sets": {"1": [["1", 1]]}})"), w),
               coarse::ConfigError);
}

TEST(Io, KernelCsvQuotesIdsWithCommas) {
  auto w = std::make_shared<const coarse::MetricWindow>(coarse::z2_window(1));
  const auto u = coarse::kernel_from_descriptor(w, "triangular:1");
  const auto csv = coarse::kernel_csv(u);
  EXPECT_EQ(csv.substr(0, 8), "x,y,d,u\n");
  EXPECT_NE(csv.find("\"(0,0)\",\"(0,0)\",0,1\n"), std::string::npos);
}

TEST(Config, ParsesAPipelineConfig) {
  const auto c = coarse::load_config(fixture("pipelines/folner-dihedral.json"));
  EXPECT_EQ(c.id, "folner-dihedral");
  ASSERT_TRUE(c.theta.has_value());
  EXPECT_EQ(c.theta->kind, "folner");
  EXPECT_EQ(c.theta->length, 100);
  EXPECT_EQ(c.theta->lo, -150);
  ASSERT_EQ(c.schedule.size(), 1u);
  EXPECT_EQ(c.schedule[0].eps, coarse::make_rational(1, 8));
}

TEST(Config, RejectsUnknownKeysTomlAndFloats) {
  EXPECT_THROW(coarse::load_config(fixture("metrics/unknown-key.json")), coarse::ConfigError);
  EXPECT_THROW(coarse::load_config(fixture("metrics/config.toml")), coarse::ConfigError);
  EXPECT_THROW(coarse::load_config(fixture("metrics/malformed.json")), coarse::ConfigError);
  EXPECT_THROW(coarse::parse_config(coarse::Json::parse(R"({"schedule": [{"R": 1, "eps": 0.125}]})"), "."),
               coarse::ConfigError);
  EXPECT_THROW(coarse::parse_config(coarse::Json::parse(R"({"theta": {"kind": "folner", "L": 0, "window": [0, 1]}})"), "."),
               coarse::ConfigError);
}

TEST(Config, WindowOverrideAndRelativePaths) {
  auto c = coarse::parse_config(coarse::Json::parse(R"({"space": "Z-window:200", "metric_file": "m.json"})"), "/base");
  c.window = 50;
  EXPECT_EQ(coarse::effective_space(c), "Z-window:50");
  EXPECT_EQ(c.metric_file, "/base/m.json");
  auto closed = coarse::parse_config(coarse::Json::parse(R"({"space": "cycle:5"})"), ".");
  closed.window = 3;
  EXPECT_THROW(coarse::effective_space(closed), coarse::ConfigError);
}
