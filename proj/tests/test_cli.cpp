#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace {

const char* cli_path() { return std::getenv("SSCI_CLI"); }

struct RunResult {
  int exit_code;
  std::string stdout_text;
};

RunResult run_cli(const std::string& args) {
  const std::string out_file = "cli_test_stdout.tmp";
  const std::string cmd =
      std::string(cli_path()) + " " + args + " > " + out_file + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream f(out_file, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return {code, ss.str()};
}

std::string nth_line(const std::string& text, int n) {
  std::stringstream ss(text);
  std::string line;
  for (int i = 0; i <= n; ++i)
    if (!std::getline(ss, line)) return "";
  return line;
}

}  // namespace

TEST_CASE("cli coverage subcommand") {
  if (!cli_path()) {
    FAIL("SSCI_CLI environment variable not set");
    return;
  }
  SUBCASE("[0,1] anchor") {
    auto r = run_cli("coverage --lambda 1 --c1 0 --c2 1");
    CHECK(r.exit_code == 0);
    CHECK(nth_line(r.stdout_text, 2) == "lambda,coverage");
    CHECK(nth_line(r.stdout_text, 3) == "1,0.5");
  }
  SUBCASE("lambda range with interior zero") {
    auto r = run_cli("coverage --lambda 0:2:1 --c1 -1 --c2 2");
    CHECK(r.exit_code == 0);
    CHECK(nth_line(r.stdout_text, 3) == "0,1");
    CHECK(nth_line(r.stdout_text, 5).substr(0, 2) == "2,");
  }
  SUBCASE("mc cross-check within 4 se") {
    auto r = run_cli(
        "--seed 7 coverage --lambda 1 --c1 -2 --c2 2 --mc-check --n 1000000");
    CHECK(r.exit_code == 0);
    std::string row = nth_line(r.stdout_text, 3);
    std::stringstream ss(row);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    REQUIRE(vals.size() == 4);
    CHECK(std::fabs(vals[1] - vals[2]) <= 4.0 * vals[3]);
  }
  SUBCASE("malformed range is a usage error") {
    auto r = run_cli("coverage --lambda 1:2 --c1 0 --c2 1");
    CHECK(r.exit_code == 2);
  }
}

TEST_CASE("cli optimize and sweep") {
  if (!cli_path()) {
    FAIL("SSCI_CLI environment variable not set");
    return;
  }
  SUBCASE("small h row") {
    auto r = run_cli("optimize --h 0.6");
    CHECK(r.exit_code == 0);
    std::string row = nth_line(r.stdout_text, 3);
    CHECK(row.find("SMALL_H") != std::string::npos);
    CHECK(row.find(",0.3,") != std::string::npos);
  }
  SUBCASE("h <= 0 usage error") {
    auto r = run_cli("optimize --h -1");
    CHECK(r.exit_code == 2);
  }
  SUBCASE("sweep rows keep input order") {
    auto r = run_cli("sweep --h-grid 0.2:0.6:0.2 --mesh 0.1");
    CHECK(r.exit_code == 0);
    CHECK(nth_line(r.stdout_text, 3).substr(0, 4) == "0.2,");
    CHECK(nth_line(r.stdout_text, 4).substr(0, 4) == "0.4,");
    CHECK(nth_line(r.stdout_text, 5).substr(0, 4) == "0.6,");
  }
  SUBCASE("csv output is byte-identical across thread counts") {
    auto r1 = run_cli("--threads 1 sweep --h-grid 0.2:1.4:0.4 --mesh 0.25");
    auto r4 = run_cli("--threads 4 sweep --h-grid 0.2:1.4:0.4 --mesh 0.25");
    CHECK(r1.exit_code == 0);
    // The manifest records the thread count; rows must match bytewise.
    for (int i = 2; i <= 6; ++i)
      CHECK(nth_line(r1.stdout_text, i) == nth_line(r4.stdout_text, i));
  }
}

TEST_CASE("cli mv subcommands") {
  if (!cli_path()) {
    FAIL("SSCI_CLI environment variable not set");
    return;
  }
  SUBCASE("mv-bound json report") {
    auto r = run_cli("--format json mv-bound --p 1 --alpha 0.05");
    CHECK(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.stdout_text);
    CHECK(doc["manifest"]["subcommand"] == "mv-bound");
    CHECK(std::stod(doc["rows"][0]["c_simple"].get<std::string>()) ==
          doctest::Approx(77.0));
    CHECK(std::stod(doc["rows"][0]["a"].get<std::string>()) <= 1.00086);
  }
  SUBCASE("alpha = 1 usage error") {
    auto r = run_cli("mv-bound --p 4 --alpha 1");
    CHECK(r.exit_code == 2);
  }
  SUBCASE("mv-verify guarantee holds") {
    auto r = run_cli(
        "--seed 1 mv-verify --p 2 --alpha 0.05 --mu 3,0 --sigma-eigs 1,1 "
        "--n 200000");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("true") != std::string::npos);
  }
}
