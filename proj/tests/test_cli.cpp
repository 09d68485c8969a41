#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("optdom_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " \"" + std::string(OPTDOM_CLI) + "\" " + args + " > \"" + (dir_ / "stdout").string() +
                            "\" 2> \"" + (dir_ / "stderr").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string slurp(const fs::path& p) const {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  std::string out() const { return slurp(dir_ / "stdout"); }
  std::string err() const { return slurp(dir_ / "stderr"); }
  std::string demo(const std::string& name) const { return "\"" + std::string(OPTDOM_DEMOS) + "/" + name + "\""; }
  std::string at(const std::string& name) const { return "\"" + (dir_ / name).string() + "\""; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, NormSelectors) {
  ASSERT_EQ(run("norm --selector space --space '{\"variant\":\"lq\",\"q\":2}' --vector '[3,4]'"), 0);
  EXPECT_EQ(json::parse(out()).at("value"), 5.0);
  ASSERT_EQ(run("norm --config " + demo("norm_l1m.json")), 0);
  EXPECT_EQ(json::parse(out()).at("value"), 3.0);
  ASSERT_EQ(run("norm --selector lpm --p 0.5 --matrix '{\"kind\":\"identity\"}' --codomain '{\"variant\":\"lq\",\"q\":1}' "
                "--vector '[1,1]' --n-E 4"),
            0);
  EXPECT_EQ(json::parse(out()).at("value"), 4.0);
}

TEST_F(Cli, AnalyzeWritesReportsAndIsDeterministic) {
  ASSERT_EQ(run("analyze --config " + demo("diagonal_geometric.json") + " --out " + at("a.json") + " --md " + at("a.md")), 0);
  ASSERT_EQ(run("analyze --config " + demo("diagonal_geometric.json") + " --out " + at("b.json")), 0);
  json a = json::parse(slurp(dir_ / "a.json")), b = json::parse(slurp(dir_ / "b.json"));
  EXPECT_TRUE(a.contains("metadata"));
  EXPECT_EQ(a.at("verdict"), "bounded-evidence");
  EXPECT_NEAR(a.at("factorability").at("condition_I").at("partial_sums_lower").back().get<double>(), 1.0 / 3.0, 1e-9);
  a.erase("metadata");
  b.erase("metadata");
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_NE(slurp(dir_ / "a.md").find("bounded-evidence"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "a.json.tmp"));
}

TEST_F(Cli, FlagsAndSeedFallback) {
  const std::string flags = "analyze --matrix '{\"kind\":\"identity\"}' --codomain '{\"variant\":\"lq\",\"q\":1}' --p 2 "
                            "--schedule 2,4,8,16 --n-E 32";
  ASSERT_EQ(run(flags + " --out " + at("flags.json")), 0) << err();
  const json r = json::parse(slurp(dir_ / "flags.json"));
  EXPECT_EQ(r.at("verdict"), "unbounded-evidence");
  EXPECT_EQ(r.at("input").at("seed"), 0);
  ASSERT_EQ(run(flags + " --out " + at("env.json"), "OPTDOM_SEED=99"), 0);
  EXPECT_EQ(json::parse(slurp(dir_ / "env.json")).at("input").at("seed"), 99);
  ASSERT_EQ(run(flags + " --seed 5 --out " + at("seed.json"), "OPTDOM_SEED=99"), 0);
  EXPECT_EQ(json::parse(slurp(dir_ / "seed.json")).at("input").at("seed"), 5);
}

TEST_F(Cli, ConfigOverridesFlags) {
  ASSERT_EQ(run("analyze --config " + demo("identity_l2.json") + " --p 3 --out " + at("r.json")), 0);
  EXPECT_EQ(json::parse(slurp(dir_ / "r.json")).at("input").at("p"), 2.0);
}

TEST_F(Cli, MalformedInputExitsTwo) {
  std::ofstream(dir_ / "bad.json") << "{\"kind\": \"dense\", \"params\": {\"rows\": 2";
  EXPECT_EQ(run("verify --matrix " + at("bad.json")), 2);
  EXPECT_NE(err().find("schema error"), std::string::npos);
  std::ofstream(dir_ / "badp.json") << R"({"matrix": {"kind": "identity"}, "codomain": {"variant": "lq", "q": 2}, "p": 1})";
  EXPECT_EQ(run("analyze --config " + at("badp.json")), 2);
  EXPECT_NE(err().find("/p"), std::string::npos);
  std::ofstream(dir_ / "badq.json") << R"({"matrix": {"kind": "identity"}, "codomain": {"variant": "lq", "q": -2}})";
  EXPECT_EQ(run("analyze --config " + at("badq.json")), 2);
  EXPECT_NE(err().find("/codomain"), std::string::npos);
  EXPECT_EQ(run("analyze --matrix '{\"kind\":\"cesaro\"}'"), 2);
  EXPECT_EQ(run("norm --selector l1m --matrix '{\"kind\":\"identity\"}' --codomain '{\"variant\":\"lq\",\"q\":0.5}' --vector '[1]'"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
}

TEST_F(Cli, GenerateEmitsLoadableSpecs) {
  for (const std::string kind : {"identity", "cesaro", "hilbert", "diagonal-geometric", "diagonal-power", "row-decay"}) {
    ASSERT_EQ(run("generate " + kind + " --out " + at(kind + ".json")), 0) << kind;
    ASSERT_EQ(run("norm --selector l1m --matrix " + at(kind + ".json") +
                  " --codomain '{\"variant\":\"lq\",\"q\":2}' --vector '[1,1]' --n-E 16"),
              0)
        << kind << ": " << err();
  }
  ASSERT_EQ(run("generate random-dense --rows 3 --cols 3 --seed 4 --nonnegative"), 0);
  EXPECT_EQ(json::parse(out()).at("params").at("values").size(), 9u);
  EXPECT_EQ(run("generate toeplitz"), 2);
}

TEST_F(Cli, VerifyUserMatrix) {
  EXPECT_EQ(run("verify --matrix " + std::string(OPTDOM_DEMOS) + "/matrices/row_decay.json --out " + at("v.json")), 0) << out();
  const json v = json::parse(slurp(dir_ / "v.json"));
  for (const json& c : v.at("checks")) EXPECT_TRUE(c.at("passed").get<bool>()) << c.dump();
}
