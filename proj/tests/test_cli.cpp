#include <doctest.h>

#include <array>
#include <cstdio>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fixtures.hpp"

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(CURSEDSIG_CLI_BIN) + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf{};
  CliResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe))
    res.output.append(buf.data(), got);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string q(const std::string& path) { return "\"" + path + "\""; }

}  // namespace

TEST_CASE("solve finds the separating equilibrium of the lab game") {
  const auto res =
      run_cli("solve --game " + q(fixtures::data_path("kmn.json")) + " --chi 0.3");
  REQUIRE(res.exit_code == 0);
  const auto j = nlohmann::json::parse(res.output);
  bool separating = false;
  for (const auto& eq : j["equilibria"])
    if (eq["kind"] == "separating") separating = true;
  CHECK(separating);
}

TEST_CASE("solve surfaces declared-support equilibria") {
  const auto res =
      run_cli("solve --game " + q(fixtures::data_path("beerquiche.json")) + " --chi 0");
  REQUIRE(res.exit_code == 0);
  const auto j = nlohmann::json::parse(res.output);
  int hybrids = 0, poolings = 0;
  for (const auto& eq : j["equilibria"]) {
    if (eq["kind"] == "hybrid") ++hybrids;
    if (eq["kind"] == "pooling") ++poolings;
  }
  CHECK(hybrids == 1);   // the mixed semi-separating profile
  CHECK(poolings >= 2);  // pure pooling plus the mixed-response family endpoint
}

TEST_CASE("verify accepts the bundled assessment") {
  const auto res = run_cli("verify --game " + q(fixtures::data_path("kmn.json")) +
                           " --assessment " + q(fixtures::data_path("kmn_separating_chi03.json")));
  REQUIRE(res.exit_code == 0);
  CHECK(nlohmann::json::parse(res.output)["pass"] == true);
}

TEST_CASE("refine reports survivors per criterion") {
  const auto res =
      run_cli("refine --game " + q(fixtures::data_path("kmn.json")) + " --chi 0.9");
  REQUIRE(res.exit_code == 0);
  const auto j = nlohmann::json::parse(res.output);
  for (const auto& eq : j["equilibria"]) {
    CHECK(eq["kind"] == "pooling");
    CHECK(eq["refinements"]["cursed_intuitive"] == true);
    CHECK(eq["refinements"]["standard_intuitive"] == false);
  }
}

TEST_CASE("sweeps are deterministic and parallelism preserves order") {
  const std::string args = "sweep --spence --cost linear --theta-h 2 --theta-l 1 --p 0.5 "
                           "--chi 0:1:0.05 --what regions";
  const auto once = run_cli(args);
  const auto again = run_cli(args);
  REQUIRE(once.exit_code == 0);
  CHECK(once.output == again.output);
  const auto parallel = run_cli(args + " --jobs 4");
  CHECK(once.output == parallel.output);
  CHECK(once.output.find("chi,sep_lo,sep_hi") != std::string::npos);
}

TEST_CASE("regimes sweep emits the survival columns") {
  const auto res = run_cli("sweep --kmn --chi 0.5:0.8:0.05 --what regimes");
  REQUIRE(res.exit_code == 0);
  CHECK(res.output.find("0.65,1,1,") != std::string::npos);
}

TEST_CASE("refine sweep tabulates verdicts per equilibrium") {
  const auto res = run_cli("sweep --game " + q(fixtures::data_path("kmn.json")) +
                           " --chi 0.3:0.9:0.3 --what refine");
  REQUIRE(res.exit_code == 0);
  CHECK(res.output.find("chi,kind,survives_standard,survives_cursed") != std::string::npos);
  CHECK(res.output.find("0.3,separating,1,1") != std::string::npos);
  CHECK(res.output.find("0.3,pooling,0,0") != std::string::npos);
  CHECK(res.output.find("0.9,pooling,0,1") != std::string::npos);
}

TEST_CASE("every subcommand documents itself with examples") {
  for (const char* sub :
       {"solve", "verify", "refine", "sweep", "spence", "continuum", "kmn-stats"}) {
    const auto res = run_cli(std::string(sub) + " --help");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("Example") != std::string::npos);
  }
}

TEST_CASE("exit codes distinguish input problems") {
  CHECK(run_cli("solve --game /missing.json --chi 0.3").exit_code == 2);
  CHECK(run_cli("sweep --kmn --chi 0:1:0 --what regimes").exit_code == 2);
  CHECK(run_cli("solve --game " + q(fixtures::data_path("kmn.json")) + " --chi 1.5").exit_code ==
        2);
  CHECK(run_cli("kmn-stats --sig2 /missing.csv").exit_code == 2);
  // unknown flags are hard errors
  CHECK(run_cli("solve --game " + q(fixtures::data_path("kmn.json")) +
                " --chi 0.3 --bogus").exit_code != 0);
}

TEST_CASE("statistics harness emits both formats") {
  const auto text = run_cli("kmn-stats --chi 0.7");
  REQUIRE(text.exit_code == 0);
  CHECK(text.output.find("SIG2") != std::string::npos);
  CHECK(text.output.find("<0.001") != std::string::npos);
  const auto csv = run_cli("kmn-stats --chi 0.7 --format csv");
  REQUIRE(csv.exit_code == 0);
  CHECK(csv.output.find("treatment,block,worker_type") != std::string::npos);
  CHECK(csv.output.find("SIG3,8,low") != std::string::npos);
}

TEST_CASE("confidence intervals: raw in CSV, clipped only for display") {
  // SIG2 block 4 low types have a 95% interval dipping below zero
  const auto csv = run_cli("kmn-stats --format csv");
  REQUIRE(csv.exit_code == 0);
  bool raw_negative = false;
  std::istringstream lines(csv.output);
  std::string line;
  while (std::getline(lines, line))
    if (line.rfind("SIG2,4,low", 0) == 0 && line.find(",-0.0") != std::string::npos)
      raw_negative = true;
  CHECK(raw_negative);
  const auto text = run_cli("kmn-stats");
  CHECK(text.output.find("-0.0") == std::string::npos);
}
