#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "miura/experiment.hpp"

namespace {

using namespace miura;
namespace fs = std::filesystem;
using nlohmann::json;

class Workspace : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("miura_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const json& j) const {
    const auto path = dir_ / name;
    std::ofstream(path) << j.dump(2);
    return path.string();
  }

  std::string slurp(const fs::path& path) const {
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  // Runs the built executable and returns its exit status.
  int cli(const std::string& args) const {
    const std::string cmd = std::string(MIURA_CLI_PATH) + " " + args + " > " + (dir_ / "stdout.txt").string() +
                            " 2> " + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
};

ExperimentConfig config(const std::string& command, json parameters, const fs::path& out, std::uint64_t seed = 0) {
  ExperimentConfig cfg;
  cfg.command = command;
  cfg.seed = seed;
  cfg.parameters = std::move(parameters);
  cfg.output_dir = out.string();
  return cfg;
}

json scalar_generator(double a) { return {{"dim", 1}, {"re", {{a}}}}; }

TEST(Config, StrictParsing) {
  EXPECT_EQ(parse_config({{"command", "lemma1"}, {"seed", 3}}).seed, 3u);
  EXPECT_THROW(parse_config({{"command", "lemma1"}, {"extra", 1}}), ConfigError);
  EXPECT_THROW(parse_config({{"seed", -1}}), ConfigError);
  EXPECT_THROW(parse_config({{"parameters", {1, 2}}}), ConfigError);
  EXPECT_THROW(parse_config(json::array()), ConfigError);
}

TEST(Config, MatrixSchema) {
  const ComplexMatrix m = matrix_from_json({{"dim", 2}, {"re", {{1, 2}, {3, 4}}}, {"im", {{0, 1}, {0, 0}}}});
  EXPECT_EQ(m(0, 1), cplx(2.0, 1.0));
  EXPECT_THROW(matrix_from_json({{"dim", 2}, {"re", {{1, 2}}}}), ConfigError);
  EXPECT_THROW(matrix_from_json({{"dim", 1}, {"re", {{1}}}, {"label", "x"}}), ConfigError);
  EXPECT_EQ(generator_from_json({{"dim", 1}, {"re", {{1}}}, {"label", "x"}}).label, "x");
  EXPECT_THROW(matrix_from_json({{"dim", 0}, {"re", json::array()}}), ConfigError);
}

TEST(Config, MatrixJsonRoundtripIsExact) {
  ComplexMatrix m(2, 2);
  m << cplx{1.0 / 3.0, -2e-17}, cplx{std::exp(1.0), 0.1}, cplx{-7.25, 1e300}, cplx{0.0, -1.0 / 7.0};
  EXPECT_EQ(matrix_from_json(json::parse(matrix_to_json(m))), m);
}

TEST(Config, DigestDependsOnContentOnly) {
  ExperimentConfig a = config("lemma1", {{"instances", 3}}, "/tmp/a");
  ExperimentConfig b = config("lemma1", {{"instances", 3}}, "/tmp/b");
  EXPECT_EQ(config_digest(a), config_digest(b));
  EXPECT_EQ(config_digest(a).size(), 16u);
  b.seed = 1;
  EXPECT_NE(config_digest(a), config_digest(b));
}

TEST_F(Workspace, ReconstructionOfZeroGenerator) {
  const auto report =
      run(config("lemma1", {{"generator", {{"dim", 2}, {"re", {{0, 0}, {0, 0}}}, {"label", "zero"}}}}, dir_));
  ASSERT_EQ(report.cases.size(), 1u);
  EXPECT_TRUE(report.cases[0].pass);
  EXPECT_EQ(report.cases[0].residual, 0.0);
  EXPECT_TRUE(fs::exists(dir_ / "report.json"));
  EXPECT_TRUE(fs::exists(dir_ / "report.csv"));
}

TEST_F(Workspace, AbstractMiuraScalarFour) {
  const auto report = run(config("abstract-miura", {{"generator", scalar_generator(4.0)}}, dir_));
  bool u_first = false, v_first = false;
  for (const auto& c : report.cases) {
    EXPECT_TRUE(c.pass) << c.name << " " << c.residual;
    u_first = u_first || c.name.rfind("reconstruction_U_first", 0) == 0;
    v_first = v_first || c.name.rfind("reconstruction_V_first", 0) == 0;
  }
  EXPECT_TRUE(u_first && v_first);
}

TEST_F(Workspace, SolitonZeroData) {
  const auto report = run(config(
      "soliton", {{"initial", "zero"}, {"n", 64}, {"L", 20.0}, {"dt", 1e-3}, {"t_end", 0.05}}, dir_));
  ASSERT_FALSE(report.cases.empty());
  for (const auto& c : report.cases) EXPECT_EQ(c.residual, 0.0) << c.name;
  EXPECT_TRUE(fs::exists(dir_ / "snapshots.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "run.json"));
}

TEST_F(Workspace, SmallRandomSuitesPass) {
  const std::pair<std::string, json> suites[] = {
      {"matfun-check", {{"dim", 4}, {"instances", 3}}},
      {"lemma1", {{"instances", 5}, {"kappa_instances", 2}}},
      {"abstract-miura", {{"instances", 3}, {"max_dim", 4}}},
      {"factorize", {{"instances", 3}, {"max_dim", 4}}},
      {"transform-chain", {{"fields", 2}}},
  };
  for (const auto& [command, params] : suites) {
    const auto report = run(config(command, params, dir_ / command, 7));
    EXPECT_FALSE(report.cases.empty()) << command;
    EXPECT_TRUE(report.all_pass()) << command << " max residual " << report.max_residual();
    EXPECT_TRUE(std::is_sorted(report.cases.begin(), report.cases.end(),
                               [](const auto& a, const auto& b) { return a.name < b.name; }));
  }
}

TEST_F(Workspace, MatrixFixtureWritesResults) {
  const json m = {{"dim", 2}, {"re", {{2, 1}, {0, 3}}}};
  const auto report = run(config("matfun-check", {{"instances", 1}, {"dim", 2}, {"matrix", m}}, dir_));
  EXPECT_TRUE(report.all_pass());
  const ComplexMatrix log_m = matrix_from_json(json::parse(slurp(dir_ / "logm.json")));
  EXPECT_LE(relative_difference(expm(log_m), matrix_from_json(m)), 1e-12);
}

TEST_F(Workspace, UnknownParameterIsConfigError) {
  EXPECT_THROW(run(config("lemma1", {{"instancez", 3}}, dir_)), ConfigError);
  EXPECT_THROW(run(config("no-such-command", json::object(), dir_)), ConfigError);
  EXPECT_THROW(run(config("soliton", {{"equation", "burgers"}}, dir_)), ConfigError);
}

TEST_F(Workspace, ReportJsonRoundtrip) {
  const auto report = run(config("lemma1", {{"instances", 2}, {"kappa_instances", 1}}, dir_, 3));
  const Report back = report_from_json(json::parse(slurp(dir_ / "report.json")));
  EXPECT_EQ(back.command, "lemma1");
  ASSERT_EQ(back.cases.size(), report.cases.size());
  for (std::size_t i = 0; i < back.cases.size(); ++i) {
    EXPECT_EQ(back.cases[i].name, report.cases[i].name);
    EXPECT_EQ(back.cases[i].residual, report.cases[i].residual);
  }
  EXPECT_EQ(back.config_digest, report.config_digest);
}

TEST_F(Workspace, EndToEndExitCodes) {
  const auto ok = write("ok.json", {{"command", "lemma1"},
                                    {"parameters", {{"generator", scalar_generator(0.5)}}}});
  EXPECT_EQ(cli("lemma1 --config " + ok + " --out " + (dir_ / "ok").string()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "ok" / "report.json"));
  EXPECT_NE(slurp(dir_ / "stdout.txt").find("1/1 cases passed"), std::string::npos);

  const auto unknown = write("unknown.json", {{"command", "lemma1"}, {"parameters", {{"bogus", 1}}}});
  EXPECT_EQ(cli("lemma1 --config " + unknown + " --out " + dir_.string()), kExitConfigError);
  EXPECT_EQ(cli("lemma1 --config " + (dir_ / "missing.json").string()), kExitConfigError);
  EXPECT_EQ(cli("abstract-miura --config " + ok + " --out " + dir_.string()), kExitConfigError);
  EXPECT_EQ(cli("lemma1"), kExitConfigError);

  // A generator on the cut for the square root is a compute error.
  const auto cut = write("cut.json", {{"parameters", {{"generator", scalar_generator(-1.0)}}}});
  EXPECT_EQ(cli("abstract-miura --config " + cut + " --out " + dir_.string()), kExitComputeError);

  // A case above tolerance exits 1.
  const auto loose = write("fail.json", {{"parameters",
                                          {{"initial", "kink-antikink"}, {"equation", "mkdv"}, {"n", 128},
                                           {"dt", 1e-3}, {"t_end", 0.05}, {"snapshot_stride", 10},
                                           {"miura_tolerance", 1e-30}}}});
  EXPECT_EQ(cli("soliton --config " + loose + " --out " + dir_.string()), kExitFailedCases);
}

TEST_F(Workspace, DeterministicReports) {
  const auto cfg = write("det.json", {{"command", "abstract-miura"},
                                      {"seed", 42},
                                      {"parameters", {{"instances", 3}, {"max_dim", 5}}}});
  ASSERT_EQ(cli("abstract-miura --config " + cfg + " --out " + (dir_ / "a").string()), 0);
  ASSERT_EQ(cli("abstract-miura --config " + cfg + " --out " + (dir_ / "b").string()), 0);
  auto a = json::parse(slurp(dir_ / "a" / "report.json"));
  auto b = json::parse(slurp(dir_ / "b" / "report.json"));
  a.erase("wall_time_s");
  b.erase("wall_time_s");
  EXPECT_EQ(a.dump(), b.dump());

  ASSERT_EQ(cli("abstract-miura --config " + cfg + " --seed 43 --out " + (dir_ / "c").string()), 0);
  auto c = json::parse(slurp(dir_ / "c" / "report.json"));
  c.erase("wall_time_s");
  EXPECT_NE(a.dump(), c.dump());
}

}  // namespace
