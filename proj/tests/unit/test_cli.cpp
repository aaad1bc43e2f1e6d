#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCli = RECTCONV_CLI_PATH;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rectconv_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string config(const std::string& name, const std::string& body) {
    const auto path = dir_ / name;
    std::ofstream(path) << body;
    return path.string();
  }

  int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >" + (dir_ / "stdout.txt").string() + " 2>" +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  fs::path dir_;
};

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_F(Cli, DensityMassAndDeterminism) {
  const auto cfg = config("mp.json", R"({"spectrum": {"zeros": 10}, "n": 10, "t": 1})");
  const auto out1 = (dir_ / "a").string(), out2 = (dir_ / "b").string();
  ASSERT_EQ(run("density --config " + cfg + " --out " + out1 + " --range 0 5 --samples 501"), 0) << read(dir_ / "stderr.txt");
  ASSERT_EQ(run("density --config " + cfg + " --out " + out2 + " --range 0 5 --samples 501 --threads 2"), 0);
  const auto text = read(fs::path(out1) / "density.csv");
  EXPECT_EQ(text, read(fs::path(out2) / "density.csv"));
  auto rows = parse_csv(text);
  ASSERT_EQ(rows.size(), 501u);
  EXPECT_TRUE(std::isnan(rows[0][1]));
  double mass = 0.0;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i)
    if (!std::isnan(rows[i][1]) && !std::isnan(rows[i + 1][1]))
      mass += 0.5 * (rows[i][1] + rows[i + 1][1]) * (rows[i + 1][0] - rows[i][0]);
  // The skipped first panel holds the integrable 1/sqrt(E) spike at the hard
  // edge; the trapezoid error on the next panel is about 1e-3.
  const double first_panel = 2.0 * std::sqrt(rows[1][0]) / std::numbers::pi;
  EXPECT_NEAR(mass + first_panel, 1.0, 2e-3);
  int peak = 1;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i][1] > rows[peak][1]) peak = static_cast<int>(i);
  EXPECT_EQ(peak, 1);
}

TEST_F(Cli, DensityEmptyRange) {
  const auto cfg = config("mp.json", R"({"spectrum": {"zeros": 10}, "n": 10, "t": 1})");
  ASSERT_EQ(run("density --config " + cfg + " --out " + dir_.string() + " --range 2 2"), 0);
  EXPECT_EQ(parse_csv(read(dir_ / "density.csv")).size(), 1u);
}

TEST_F(Cli, EdgeReportAndVelocity) {
  const auto cfg = config("mp.json", R"({"spectrum": {"zeros": 10}, "n": 20, "t": 0.25})");
  ASSERT_EQ(run("edge --config " + cfg + " --out " + dir_.string()), 0);
  auto j = nlohmann::json::parse(read(dir_ / "edge.json"));
  EXPECT_NEAR(j["lambda_plus"].get<double>(), 0.25 * std::pow(1 + std::sqrt(0.5), 2), 1e-10);
  for (const char* key : {"zeta_plus", "xi_plus", "velocity", "sqrt_coeff", "bbp_threshold"})
    EXPECT_TRUE(j.contains(key)) << key;

  const auto spec = R"("spectrum": {"canonical": {"p": 100, "edge": 1}}, "n": 250)";
  const double t = 0.2, h = 1e-4 * t;
  std::vector<double> lp;
  for (double tt : {t, t + h, t - h}) {
    const auto c = config("c.json", std::string("{") + spec + ", \"t\": " + std::to_string(tt) + "}");
    ASSERT_EQ(run("edge --config " + c + " --out " + dir_.string()), 0);
    auto e = nlohmann::json::parse(read(dir_ / "edge.json"));
    lp.push_back(e["lambda_plus"].get<double>());
    if (tt == t) lp.push_back(e["velocity"].get<double>());
  }
  const double fd = (lp[2] - lp[3]) / (2 * h);
  EXPECT_LT(std::abs(fd - lp[1]) / lp[1], 1e-4);
}

TEST_F(Cli, EdgeAtTZero) {
  const auto cfg = config("t0.json", R"({"spectrum": [2, 1], "n": 4, "t": 0})");
  ASSERT_EQ(run("edge --config " + cfg + " --out " + dir_.string()), 0);
  auto j = nlohmann::json::parse(read(dir_ / "edge.json"));
  EXPECT_EQ(j["lambda_plus"].get<double>(), 2.0);
  EXPECT_TRUE(j["velocity"].is_null());
}

TEST_F(Cli, Quantiles) {
  const auto cfg = config("mp.json", R"({"spectrum": {"zeros": 100}, "n": 100, "t": 1})");
  ASSERT_EQ(run("quantiles --config " + cfg + " --out " + dir_.string() + " --jmax 10"), 0);
  auto rows = parse_csv(read(dir_ / "quantiles.csv"));
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_NEAR(rows[0][1], 4.0, 1e-10);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i][1], rows[i - 1][1]);
}

TEST_F(Cli, Support) {
  const auto cfg = config("mp.json", R"({"spectrum": {"zeros": 10}, "c": 0.25, "t": 1})");
  ASSERT_EQ(run("support --config " + cfg + " --out " + dir_.string() + " --range 0 5 --step 0.01"), 0);
  auto j = nlohmann::json::parse(read(dir_ / "support.json"));
  ASSERT_EQ(j["intervals"].size(), 1u);
  EXPECT_NEAR(j["intervals"][0][0].get<double>(), 0.25, 2e-3);
  EXPECT_NEAR(j["intervals"][0][1].get<double>(), 2.25, 2e-3);
}

TEST_F(Cli, ExperimentSmokeAndExitCodes) {
  const auto cfg = config("rig.json",
                          R"({"spectrum": {"canonical": {"p": 100, "edge": 1}}, "n": 200, "t": {"n_power": -0.1666}})");
  const int code = run("experiment rigidity --config " + cfg + " --out " + dir_.string() + " --trials 1");
  EXPECT_TRUE(code == 0 || code == 1);
  auto j = nlohmann::json::parse(read(dir_ / "rigidity_report.json"));
  EXPECT_EQ(j["trials"], 1);
  EXPECT_EQ(j["pass"].get<bool>(), code == 0);
  EXPECT_TRUE(fs::exists(dir_ / "rigidity_trials.csv"));
  const auto first = read(dir_ / "rigidity_trials.csv");
  run("experiment rigidity --config " + cfg + " --out " + dir_.string() + " --trials 1");
  EXPECT_EQ(read(dir_ / "rigidity_trials.csv"), first);

  // A threshold nobody can meet turns into exit 1.
  const auto strict = config("strict.json",
                             R"({"spectrum": {"canonical": {"p": 100, "edge": 1}}, "n": 200, "t": 0.4,
                                 "experiment": {"thresholds": {"c_rigid": 1e-9}}})");
  EXPECT_EQ(run("experiment rigidity --config " + strict + " --out " + dir_.string() + " --trials 2"), 1);
}

TEST_F(Cli, UsageErrors) {
  const auto cfg = config("mp.json", R"({"spectrum": {"zeros": 10}, "n": 10, "t": 1})");
  EXPECT_EQ(run("experiment bogus --config " + cfg), 2);
  EXPECT_NE(read(dir_ / "stderr.txt").find("rigidity"), std::string::npos);
  EXPECT_EQ(run("edge --config " + (dir_ / "missing.json").string()), 2);
  const auto bad = config("bad.json", R"({"spectrum": {"zeros": 10}, "t": 1})");
  EXPECT_EQ(run("edge --config " + bad), 2);
  EXPECT_NE(read(dir_ / "stderr.txt").find("'n'"), std::string::npos);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("density --config " + cfg + " --out " + dir_.string() + " --range 3 1"), 2);
}
