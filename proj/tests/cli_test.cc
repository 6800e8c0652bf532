#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult RunCli(const std::string& args) {
  const std::string command = std::string(LOOPSFM_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  std::array<char, 4096> buffer;
  std::size_t n;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    result.output.append(buffer.data(), n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string Temp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("loopsfm_cli_" + name)).string();
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Cli, SimulateThenSolve) {
  const std::string csv = Temp("sim.csv");
  ASSERT_EQ(RunCli("simulate --shape 2,3,4,1 --frames 30 --seed 5 --out " + csv).exit_code, 0);
  const RunResult solved = RunCli("solve --in " + csv + " --out -");
  ASSERT_EQ(solved.exit_code, 0);
  const auto json = nlohmann::json::parse(solved.output);
  EXPECT_NEAR(json["lengths"][2].get<double>(), 4.0, 1e-6);
  EXPECT_FALSE(json["rank_deficient"].get<bool>());
  std::filesystem::remove(csv);
}

TEST(Cli, SimulateIsDeterministic) {
  const std::string a = Temp("a.csv"), b = Temp("b.csv");
  RunCli("simulate --shape 2,3,4,1 --frames 8 --seed 9 --noise gauss:0.01 --out " + a);
  RunCli("simulate --shape 2,3,4,1 --frames 8 --seed 9 --noise gauss:0.01 --out " + b);
  EXPECT_FALSE(ReadFile(a).empty());
  EXPECT_EQ(ReadFile(a), ReadFile(b));
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(Cli, ValidationErrorsExitOne) {
  EXPECT_EQ(RunCli("simulate --shape 1,1,1,10 --frames 5 --seed 1 --out " + Temp("x.csv"))
                .exit_code,
            1);
  EXPECT_EQ(RunCli("solve --in /nonexistent.csv --out -").exit_code, 1);
  EXPECT_EQ(RunCli("simulate --frames 5").exit_code, 1);
  EXPECT_EQ(RunCli("reproduce-paper --noise round9").exit_code, 1);
}

TEST(Cli, StrictSolveExitsTwoOnDegenerateMotion) {
  const std::string csv = Temp("static.csv");
  ASSERT_EQ(RunCli("simulate --shape 2,3,4,1 --frames 20 --seed 2 --motion static --out " + csv)
                .exit_code,
            0);
  EXPECT_EQ(RunCli("solve --in " + csv + " --out - --strict").exit_code, 2);
  EXPECT_EQ(RunCli("solve --in " + csv + " --out -").exit_code, 0);
  std::filesystem::remove(csv);
}

TEST(Cli, ResidualAndDepths) {
  const std::string csv = Temp("res.csv");
  RunCli("simulate --shape 2,3,4,1 --frames 4 --seed 3 --out " + csv);
  const RunResult residual = RunCli("residual --shape 2,3,4,1 --in " + csv);
  EXPECT_EQ(residual.exit_code, 0);
  EXPECT_NE(residual.output.find("verdict consistent"), std::string::npos);
  const RunResult wrong = RunCli("residual --shape 2,3,4,2 --in " + csv);
  EXPECT_NE(wrong.output.find("verdict inconsistent"), std::string::npos);
  const RunResult depths = RunCli("depths --shape 2,3,4,1 --in " + csv + " --frame 2");
  ASSERT_EQ(depths.exit_code, 0);
  EXPECT_GE(nlohmann::json::parse(depths.output).size(), 2u);
  std::filesystem::remove(csv);
}

TEST(Cli, ReproducePrintsOneLinePerCheck) {
  const RunResult run = RunCli("reproduce-paper");
  EXPECT_EQ(run.exit_code, 0);
  EXPECT_NE(run.output.find("[PASS] system reaches structural rank 18"), std::string::npos);
}

}  // namespace
