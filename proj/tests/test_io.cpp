#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "optdom/analysis.hpp"
#include "optdom/io.hpp"

using namespace optdom;
using io::json;

namespace {

std::string schema_path(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const SchemaError& e) {
    return e.path();
  }
  return "<no error>";
}

}  // namespace

TEST(SpaceJson, RoundTrip) {
  const SpaceSpec specs[] = {SpaceSpec::lq(kInf), SpaceSpec::weighted_lq(2.0, Weights::power_decay(-1.0, 2.0)),
                             SpaceSpec::power(SpaceSpec::lq(1.0), 0.5),
                             SpaceSpec::sum(SpaceSpec::lq(1.0), SpaceSpec::intersection(SpaceSpec::lq(2.0), SpaceSpec::lq(3.0)))};
  const FiniteVector f = FiniteVector::from_dense({1.0, -2.0, 0.5});
  for (const SpaceSpec& s : specs) {
    const SpaceSpec back = io::space_from_json(json::parse(io::space_to_json(s).dump()));
    EXPECT_EQ(back.describe(), s.describe());
    EXPECT_EQ(norm(back, f), norm(s, f));
  }
}

TEST(SpaceJson, ErrorsCarryPaths) {
  EXPECT_EQ(schema_path([] { io::space_from_json(json{{"variant", "sum"}, {"left", {{"variant", "lq"}, {"q", 1}}}}, "/codomain"); }),
            "/codomain/right");
  EXPECT_EQ(schema_path([] {
              io::space_from_json(json{{"variant", "sum"}, {"left", {{"variant", "lq"}}}, {"right", {{"variant", "lq"}, {"q", 1}}}}, "/codomain");
            }),
            "/codomain/left/q");
  EXPECT_EQ(schema_path([] { io::space_from_json(json{{"variant", "lq"}, {"q", -1}}, "/e"); }), "/e");
  EXPECT_EQ(schema_path([] { io::space_from_json(json{{"variant", "orlicz"}}, "/e"); }), "/e/variant");
}

TEST(VectorJson, Forms) {
  EXPECT_EQ(io::vector_from_json(json::array({1.0, 0.0, 2.0})), FiniteVector::from_entries({{1, 1.0}, {3, 2.0}}));
  EXPECT_EQ(io::vector_from_json(json{{"indices", {4, 2}}, {"values", {1.0, 3.0}}}),
            FiniteVector::from_entries({{2, 3.0}, {4, 1.0}}));
  EXPECT_EQ(schema_path([] { io::vector_from_json(json{{"indices", {0}}, {"values", {1.0}}}, "/v"); }), "/v/indices/0");
  EXPECT_EQ(schema_path([] { io::vector_from_json(json{{"indices", {1, 1}}, {"values", {1.0, 2.0}}}, "/v"); }), "/v");
  const FiniteVector f = FiniteVector::from_entries({{3, -1.5}, {7, 2.0}});
  EXPECT_EQ(io::vector_from_json(io::vector_to_json(f)), f);
}

TEST(MatrixJson, Kinds) {
  EXPECT_EQ(io::matrix_from_json(json{{"kind", "hilbert"}}).entry(2, 3), 0.25);
  const MatrixOperator d = io::matrix_from_json(json{{"kind", "diagonal"}, {"params", {{"kind", "geometric"}, {"ratio", 0.5}}}});
  EXPECT_EQ(d.entry(3, 3), 0.125);
  const MatrixOperator e = io::matrix_from_json(
      json{{"kind", "expr"}, {"params", {{"entry", "(j <= i) * 2^(-i)"}}}, {"nonnegative", true}, {"row_extent", "i"}});
  EXPECT_TRUE(e.nonnegative());
  ASSERT_TRUE(e.row_extent(5).has_value());
  EXPECT_EQ(*e.row_extent(5), 5u);
  const MatrixOperator dense = io::matrix_from_json(json{{"kind", "dense"}, {"params", {{"rows", 2}, {"cols", 2}, {"values", {1, 2, 3, 4}}}}});
  EXPECT_EQ(dense.entry(2, 1), 3.0);
  EXPECT_EQ(dense.entry(3, 1), 0.0);
  EXPECT_EQ(schema_path([] { io::matrix_from_json(json{{"kind", "toeplitz"}}, "/matrix"); }), "/matrix/kind");
  EXPECT_EQ(schema_path([] { io::matrix_from_json(json{{"kind", "dense"}, {"params", {{"rows", 2}}}}, "/matrix"); }),
            "/matrix/params/cols");
}

TEST(MatrixJson, CsvFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "optdom_test_io";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "dense.csv") << "1,2\n3,4\n";
    std::ofstream(dir / "sparse.csv") << "i,j,value\n1,1,5\n3,2,-1\n";
    std::ofstream(dir / "broken.csv") << "1,2\n3\n";
  }
  const MatrixOperator a = io::matrix_from_json(json{{"kind", "dense"}, {"params", {{"file", "dense.csv"}}}}, "", dir);
  EXPECT_EQ(a.entry(1, 2), 2.0);
  EXPECT_EQ(a.entry(2, 1), 3.0);
  const MatrixOperator b = io::matrix_from_json(json{{"kind", "dense"}, {"params", {{"file", "sparse.csv"}}}}, "", dir);
  EXPECT_EQ(b.entry(3, 2), -1.0);
  EXPECT_EQ(b.entry(2, 2), 0.0);
  EXPECT_THROW(io::matrix_from_json(json{{"kind", "dense"}, {"params", {{"file", "broken.csv"}}}}, "", dir), SchemaError);
  EXPECT_THROW(io::matrix_from_json(json{{"kind", "dense"}, {"params", {{"file", "missing.csv"}}}}, "", dir), SchemaError);
  std::filesystem::remove_all(dir);
}

TEST(NumberJson, NonFiniteValuesAreStrings) {
  EXPECT_EQ(io::number(kInf), json("inf"));
  EXPECT_EQ(io::number(-kInf), json("-inf"));
  EXPECT_EQ(io::number(1.5), json(1.5));
}

TEST(AnalysisConfig, Validation) {
  AnalysisConfig cfg;
  cfg.matrix = {{"kind", "identity"}};
  cfg.codomain = {{"variant", "lq"}, {"q", 2}};
  EXPECT_EQ(schema_path([&] { apply_config_json(cfg, json{{"schedule", {4, 2}}}); cfg.validate(); }), "/schedule");
  cfg = AnalysisConfig{};
  EXPECT_EQ(schema_path([&] { apply_config_json(cfg, json{{"p", 1}}); cfg.validate(); }), "/p");
  cfg = AnalysisConfig{};
  EXPECT_EQ(schema_path([&] { apply_config_json(cfg, json{{"n_enum", 30}}); cfg.validate(); }), "/n_enum");
  cfg = AnalysisConfig{};
  EXPECT_EQ(schema_path([&] { apply_config_json(cfg, json{{"colour", "red"}}); }), "/colour");
  cfg = AnalysisConfig{};
  EXPECT_EQ(schema_path([&] { apply_config_json(cfg, json{{"probes", {{{"indices", {1}}}}}}); }), "/probes/0/values");
}

TEST(Analysis, IdentityReports) {
  AnalysisConfig cfg;
  cfg.matrix = {{"kind", "identity"}};
  cfg.codomain = {{"variant", "lq"}, {"q", 2}};
  cfg.n_E = 64;
  cfg.seed = 3;
  cfg.probes = {FiniteVector::from_dense({1.0, 1.0})};
  const AnalysisResult r = run_analyze(cfg);
  EXPECT_EQ(r.report.at("schema_version"), 1);
  EXPECT_EQ(r.report.at("verdict"), "bounded-evidence");
  EXPECT_TRUE(r.disagreements.empty());
  EXPECT_FALSE(r.report.contains("metadata"));
  EXPECT_EQ(r.report.at("condition_II").at("verdict"), "diverges");
  EXPECT_NE(r.markdown.find("## Verdict"), std::string::npos);
  EXPECT_EQ(r.report.at("probes").at(0).at("l1").at("value"), std::sqrt(2.0));

  cfg.codomain = {{"variant", "lq"}, {"q", 1}};
  const AnalysisResult u = run_analyze(cfg);
  EXPECT_EQ(u.report.at("verdict"), "unbounded-evidence");
  EXPECT_EQ(run_analyze(cfg).report.dump(), u.report.dump());
}
