#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oscrit/cli.hpp"
#include "json.hpp"

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "oscrit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = oscrit::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"check", "--fixture", "nope"}).code == 2);
  CHECK(run({"check", "--fixture", "lazer", "--p", "1"}).code == 2);
  CHECK(run({"check", "--p", "0"}).code == 2);  // r is required
  CHECK(run({"check", "--r", "1", "--t0", "0"}).code == 2);

  const auto bad = run({"check", "--r", "1 +* t"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("cannot parse expression") != std::string::npos);

  CHECK(run({"riccati", "--case", "nope"}).code == 2);
  CHECK(run({"riccati", "--variant", "squared"}).code == 2);
  CHECK(run({"sweep", "--fixture", "example31", "--sweep", "b=1:x:1"}).code == 2);
}

TEST_CASE("check report schema") {
  const auto r = run({"check", "--fixture", "lazer", "--theorem", "lazer,thm31"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  for (const char* key : {"config", "theorem_reports", "trajectories_ref", "warnings", "version"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["config"]["command"] == "check");
  CHECK(j["config"]["fixture"] == "lazer");
  REQUIRE(j["theorem_reports"].size() == 2);
  CHECK(j["theorem_reports"][0]["theorem"] == "LAZER");
  CHECK(j["theorem_reports"][0]["overall"] == "APPLIES");
  CHECK(j["theorem_reports"][1]["theorem"] == "THM31");
  CHECK(j["theorem_reports"][1].contains("conditions"));

  // Raw expressions describe the same model as the fixture.
  const auto raw = run({"check", "--p", "0", "--q", "0", "--r", "1", "--theorem", "lazer,thm31"});
  REQUIRE(raw.code == 0);
  const auto k = nlohmann::json::parse(raw.out);
  CHECK(k["theorem_reports"] == j["theorem_reports"]);
}

TEST_CASE("check writes CSV trajectories") {
  const std::string csv = "test_cli_traj.csv";
  const auto r = run({"check", "--fixture", "lazer", "--theorem", "thm31", "--csv", csv});
  REQUIRE(r.code == 0);
  const auto text = slurp(csv);
  CHECK(text.rfind("t,S,criterion_id,alpha", 0) == 0);
  CHECK(text.size() > 100);
  std::remove(csv.c_str());
}

TEST_CASE("check output is byte-identical across runs") {
  for (const char* f : {"lazer", "example31"}) {
    const auto a = run({"check", "--fixture", f, "--theorem", "thm31,thm32"});
    const auto b = run({"check", "--fixture", f, "--theorem", "thm31,thm32"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("sweep CSV") {
  const auto r = run({"sweep", "--fixture", "example31", "--sweep", "b=1:2:1", "--jobs", "2"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "b,thm31,thm32,zeros,note\r\n1,DOES_NOT_APPLY,APPLIES,,\r\n2,DOES_NOT_APPLY,APPLIES,,\r\n");
  const auto one = run({"sweep", "--fixture", "example31", "--sweep", "b=1:2:1", "--jobs", "1"});
  CHECK(one.out == r.out);
}

TEST_CASE("verify and riccati reports") {
  const auto v = run({"verify", "--fixture", "lazer", "--tmax", "30", "--combos", "1"});
  REQUIRE(v.code == 0);
  const auto j = nlohmann::json::parse(v.out);
  CHECK(j.contains("oscillation_report"));
  CHECK(j["oscillation_report"]["solutions"].size() == 4);

  const auto r = run({"riccati", "--case", "identity", "--variant", "as-written"});
  REQUIRE(r.code == 0);
  const auto k = nlohmann::json::parse(r.out);
  CHECK(k["comparison_report"]["ordering_ok"] == true);
  CHECK(k["comparison_report"]["hypothesis_ok"] == true);
  CHECK(k["config"]["variant"] == "AS_WRITTEN");
}
