#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "qes/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run qes_run(std::vector<std::string> args) {
  args.insert(args.begin(), "qes");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = qes::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("qes_cli_test_" + std::to_string(::getpid()) + "_" + name);
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST(CliBuild, PolynomialSummary) {
  const auto r = qes_run({"build", "--family", "poly-wplus", "--a", "2", "--b", "1"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("epsilon=1 E0=0 E1=1"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("family=poly-wplus"), std::string::npos);
}

TEST(CliBuild, SinhSummary) {
  const auto r = qes_run({"build", "--family", "sinh-wplus", "--A", "1", "--alpha", "1", "--x0", "0"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("epsilon=0.5"), std::string::npos) << r.out;
}

TEST(CliBuild, EmitsCsvTable) {
  const auto path = temp_file("table.csv");
  const auto r = qes_run({"build", "--family", "poly-phi", "--a", "1", "--b", "1", "--epsilon", "1",
                          "--grid-l", "10", "--grid-n", "201", "--emit", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto rows = lines(buf.str());
  ASSERT_EQ(rows.size(), 202u);
  EXPECT_EQ(rows[0], "x,v_minus,v_plus,w,w1,psi0,psi1");
  fs::remove(path);
}

TEST(CliBuild, EmitsJsonTable) {
  const auto path = temp_file("table.json");
  const auto r = qes_run({"build", "--family", "poly-wplus", "--a", "2", "--b", "1", "--grid-l",
                          "5", "--grid-n", "11", "--emit", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["rows"].size(), 11u);
  fs::remove(path);
}

TEST(CliBuild, CustomExpression) {
  const auto r = qes_run({"build", "--family", "custom", "--expr", "2*x + x^3"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("epsilon=1 "), std::string::npos) << r.out;
  const auto p = qes_run({"build", "--family", "custom", "--generator", "phi", "--expr",
                          "x + x^3/3", "--epsilon", "1"});
  EXPECT_EQ(p.code, 0) << p.err;
  EXPECT_NE(p.out.find("method=method_b"), std::string::npos) << p.out;
}

TEST(CliValidation, NegativeParameter) {
  const auto r = qes_run({"verify", "--family", "poly-wplus", "--a", "2", "--b", "-1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("b must be > 0"), std::string::npos) << r.err;
}

TEST(CliValidation, MessagesNameKey) {
  auto r = qes_run({"build", "--family", "poly-phi", "--a", "1", "--b", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("epsilon"), std::string::npos) << r.err;
  r = qes_run({"build", "--family", "poly-wplus", "--a", "2", "--b", "1", "--grid-n", "100"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("grid-n"), std::string::npos) << r.err;
  r = qes_run({"build", "--family", "nope"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("family"), std::string::npos) << r.err;
  r = qes_run({"build", "--family", "custom", "--expr", "2*x +"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("expression error"), std::string::npos) << r.err;
}

TEST(CliValidation, UsageErrors) {
  EXPECT_EQ(qes_run({}).code, 2);
  EXPECT_EQ(qes_run({"frobnicate"}).code, 2);
  EXPECT_EQ(qes_run({"build", "--bogus", "1"}).code, 2);
  EXPECT_EQ(qes_run({"build", "--a", "notanumber"}).code, 2);
}

TEST(CliVerify, PolynomialReport) {
  const auto r = qes_run({"verify", "--family", "poly-wplus", "--a", "2", "--b", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["report"]["passed"].get<bool>());
  EXPECT_LT(j["report"]["energy_errors"][0].get<double>(), 1e-5);
  EXPECT_LT(j["report"]["energy_errors"][1].get<double>(), 1e-5);
  EXPECT_EQ(j["config"]["family"], "poly-wplus");
  EXPECT_TRUE(j["report"]["tolerances"].contains("energy"));
}

TEST(CliVerify, CesEigenvalues) {
  const auto r = qes_run({"verify", "--family", "poly-phi-ces", "--a", "1", "--b", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ev = nlohmann::json::parse(r.out)["report"]["eigenvalues"];
  EXPECT_NEAR(ev[0].get<double>(), 0.0, 1e-4);
  EXPECT_NEAR(ev[1].get<double>(), 1.5, 1e-4);
  EXPECT_NEAR(ev[2].get<double>(), 2.0, 1e-4);
}

TEST(CliVerify, GridPointsAloneRefineAutomaticGrid) {
  const auto coarse = qes_run({"verify", "--family", "poly-wplus", "--a", "2", "--b", "2"});
  EXPECT_EQ(coarse.code, 1);
  const auto r = qes_run({"verify", "--family", "poly-wplus", "--a", "2", "--b", "2", "--grid-n",
                          "8001"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out)["report"];
  EXPECT_EQ(j["grid"]["N"].get<int>(), 8001);
  EXPECT_EQ(j["grid"]["L"].get<double>(),
            nlohmann::json::parse(coarse.out)["report"]["grid"]["L"].get<double>());
}

TEST(CliVerify, TightToleranceFailsWithExitOne) {
  const auto r = qes_run({"verify", "--family", "poly-wplus", "--a", "2", "--b", "1", "--tol-e",
                          "1e-12"});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(nlohmann::json::parse(r.out)["report"]["passed"].get<bool>());
}

TEST(CliVerify, ConfigFileWithFlagOverride) {
  const auto cfg = temp_file("config.json");
  {
    std::ofstream f(cfg);
    f << R"({"family": "poly-wplus", "params": {"a": 2, "b": 5}, "grid": {"N": 4001}})";
  }
  const auto out = temp_file("report.json");
  const auto r = qes_run({"verify", "--config", cfg.string(), "--b", "1", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["config"]["params"]["b"].get<double>(), 1.0);
  EXPECT_EQ(j["config"]["params"]["a"].get<double>(), 2.0);
  EXPECT_EQ(j["config"]["grid"]["N"].get<int>(), 4001);
  fs::remove(cfg);
  fs::remove(out);
}

TEST(CliVerify, BadConfigFile) {
  const auto cfg = temp_file("bad.json");
  {
    std::ofstream f(cfg);
    f << R"({"family": "poly-wplus", "params": {"a": "two"}})";
  }
  const auto r = qes_run({"verify", "--config", cfg.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("config"), std::string::npos);
  EXPECT_EQ(qes_run({"verify", "--config", "/nonexistent/qes.json"}).code, 2);
  fs::remove(cfg);
}

TEST(CliSpectrum, CesLadder) {
  const auto r = qes_run({"spectrum", "--family", "poly-phi-ces", "--a", "1", "--b", "1",
                          "--n-max", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], "n,e_analytic,e_numeric,abs_diff");
  const std::vector<std::string> analytic{"0", "1.5", "2", "2.5", "3"};
  for (std::size_t n = 0; n < 5; ++n) {
    std::stringstream ss(rows[n + 1]);
    std::string idx, a;
    std::getline(ss, idx, ',');
    std::getline(ss, a, ',');
    EXPECT_EQ(idx, std::to_string(n));
    EXPECT_EQ(a, analytic[n]);
  }
}

TEST(CliSpectrum, PolynomialKnownLevelsOnly) {
  const auto r = qes_run({"spectrum", "--family", "poly-wplus", "--a", "2", "--b", "1", "--n-max", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].rfind("0,0,", 0), 0u) << rows[1];
  EXPECT_EQ(rows[2].rfind("1,1,", 0), 0u) << rows[2];
  const auto wide = qes_run({"spectrum", "--family", "poly-wplus", "--a", "2", "--b", "1", "--n-max", "3"});
  const auto more = lines(wide.out);
  ASSERT_EQ(more.size(), 5u);
  EXPECT_EQ(more[3].rfind("2,,", 0), 0u) << more[3];
}

TEST(CliSpectrum, DepthGuard) {
  const auto r = qes_run({"spectrum", "--family", "poly-phi-ces", "--a", "1", "--b", "1",
                          "--n-max", "9"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("exceeds supported excited-state depth"), std::string::npos) << r.err;
}

TEST(CliCrosscheck, PhiFamilies) {
  EXPECT_EQ(qes_run({"crosscheck", "--family", "poly-phi", "--a", "1", "--b", "1", "--epsilon", "1"}).code, 0);
  EXPECT_EQ(qes_run({"crosscheck", "--family", "poly-phi", "--a", "1", "--b", "1", "--epsilon", "1.5"}).code, 0);
  EXPECT_EQ(qes_run({"crosscheck", "--family", "poly-phi-ces", "--a", "2", "--b", "1"}).code, 0);
  EXPECT_EQ(qes_run({"crosscheck", "--family", "custom", "--generator", "phi", "--expr",
                     "x + x^3/3 + 0.1*x*tanh(x)", "--epsilon", "1"}).code,
            0);
}

TEST(CliCrosscheck, RequiresPhiFamily) {
  const auto r = qes_run({"crosscheck", "--family", "poly-wplus", "--a", "2", "--b", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("crosscheck requires a φ-based family"), std::string::npos) << r.err;
}

TEST(CliSweep, OrderedByValue) {
  const auto r = qes_run({"build", "--family", "poly-wplus", "--b", "1", "--sweep", "a=3:1:5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0], "# a=1");
  EXPECT_EQ(rows[8], "# a=3");
  EXPECT_NE(rows[1].find("epsilon=0.5 "), std::string::npos);
  EXPECT_NE(rows[9].find("epsilon=1.5 "), std::string::npos);
}

TEST(CliSweep, VerifyProducesArray) {
  const auto r = qes_run({"verify", "--family", "sinh-wplus", "--A", "1", "--alpha", "1",
                          "--sweep", "x0=-0.5:0.5:3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_TRUE(j.is_array());
  ASSERT_EQ(j.size(), 3u);
  EXPECT_EQ(j[0]["sweep"]["value"].get<double>(), -0.5);
  EXPECT_EQ(j[2]["sweep"]["value"].get<double>(), 0.5);
}

TEST(CliSweep, MalformedSpec) {
  EXPECT_EQ(qes_run({"build", "--family", "poly-wplus", "--b", "1", "--sweep", "a=1:2"}).code, 2);
  EXPECT_EQ(qes_run({"build", "--family", "poly-wplus", "--b", "1", "--sweep", "a1:2:3"}).code, 2);
}

TEST(CliBinary, ExitCodesFromProcess) {
  const std::string exe = QES_CLI_PATH;
  auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  EXPECT_EQ(status(exe + " build --family poly-wplus --a 2 --b 1"), 0);
  EXPECT_EQ(status(exe + " build --family poly-wplus --a 2 --b -1"), 2);
  EXPECT_EQ(status(exe + " verify --family poly-wplus --a 2 --b 1 --tol-e 1e-12"), 1);
}
