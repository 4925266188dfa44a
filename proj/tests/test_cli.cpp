#include <doctest.h>

#include <fstream>
#include <sstream>

#include "matchstab/cli.hpp"
#include "test_support.hpp"

using namespace matchstab;
using namespace matchstab::testing;

namespace {

struct RunResult {
  int exit_code;
  std::string out, err;
};

RunResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_command(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

size_t count_lines(const std::string& text) {
  size_t n = 0;
  for (char ch : text)
    if (ch == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("check prints the condition verdicts and exit codes") {
  auto ok = run({"check", fixture_path("nn.json")});
  CHECK(ok.exit_code == 0);
  CHECK(ok.out == "NCond: yes\n");

  auto bad = run({"check", fixture_path("nn-fanti.json")});
  CHECK(bad.exit_code == 1);
  CHECK(bad.out.find("NCond: no") == 0);
  CHECK(bad.out.find("mu_C(U)=") != std::string::npos);
  CHECK(bad.out.find(">= mu_S(S(U))=") != std::string::npos);

  auto scond = run({"check", fixture_path("nn.json"), "--scond"});
  CHECK(scond.exit_code == 1);  // x = y = 2/5 sits outside the region
  CHECK(scond.out.find("SCond: no") != std::string::npos);
  CHECK(scond.out.find("bullet_C,bullet_S,saturated,drift,scond_ok") !=
        std::string::npos);
  CHECK(scond.out.find("{3},{3'},false,1/25,false") != std::string::npos);
}

TEST_CASE("facets lists the classification") {
  auto nn = run({"facets", fixture_path("nn.json")});
  CHECK(nn.exit_code == 0);
  CHECK(count_lines(nn.out) == 7);

  auto nnn = run({"facets", fixture_path("nnn.json")});
  CHECK(nnn.exit_code == 0);
  CHECK(count_lines(nnn.out) == 25);
  size_t saturated = 0, pos = 0;
  while ((pos = nnn.out.find("saturated:true", pos)) != std::string::npos) {
    ++saturated;
    pos += 1;
  }
  CHECK(saturated == 13);
}

TEST_CASE("structure prints stability with a certificate") {
  auto good = run({"structure", fixture_path("nn-fdiag.json")});
  CHECK(good.exit_code == 0);
  CHECK(good.out == "stable-structure: yes\n");

  auto bad = run({"structure", fixture_path("nn-fanti.json")});
  CHECK(bad.exit_code == 1);
  CHECK(bad.out.find("stable-structure: no") == 0);
  CHECK(bad.out.find("no directed path") != std::string::npos);
}

TEST_CASE("measure emits a loadable stabilizing model") {
  auto result = run({"measure", fixture_path("nn-fdiag.json")});
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("\"2/5\"") != std::string::npos);

  auto bad = run({"measure", fixture_path("nn-fanti.json")});
  CHECK(bad.exit_code == 1);
}

TEST_CASE("simulate prints a deterministic summary") {
  auto a = run({"simulate", fixture_path("nn.json"), "--policy", "ml",
                "--horizon", "20000", "--seed", "9"});
  CHECK(a.exit_code == 0);
  CHECK(a.out.find("policy=ml seed=9 horizon=20000 avg_buffer=") == 0);
  auto b = run({"simulate", fixture_path("nn.json"), "--policy", "ml",
                "--horizon", "20000", "--seed", "9"});
  CHECK(a.out == b.out);

  auto traced = run({"simulate", fixture_path("nn.json"), "--policy", "pr",
                     "--horizon", "50", "--seed", "3", "--trace", "csv"});
  CHECK(traced.exit_code == 0);
  CHECK(traced.out.find("step,buffer,facet\n") == 0);
  CHECK(count_lines(traced.out) == 50 + 1 + 1);  // header + rows + summary
}

TEST_CASE("sweep and stationary write csv") {
  auto sweep = run({"sweep", fixture_path("nn.json"), "--policy", "ms",
                    "--grid", "0.25", "--horizon", "500", "--seeds", "2"});
  CHECK(sweep.exit_code == 0);
  CHECK(sweep.out.find("x,y,policy,seed,horizon") == 0);
  auto serial = run({"sweep", fixture_path("nn.json"), "--policy", "ms",
                     "--grid", "0.25", "--horizon", "500", "--seeds", "2",
                     "--serial"});
  CHECK(serial.out == sweep.out);

  auto st = run({"stationary", fixture_path("nn.json"), "--policy", "pr",
                 "--cap", "4"});
  CHECK(st.exit_code == 0);
  CHECK(st.out.find("state,prob\n") == 0);
  CHECK(st.out.find("0 0 0;0 0 0,") != std::string::npos);
}

TEST_CASE("counterexample prints the exact fractions") {
  auto pr = run({"counterexample", "nn-priority", "--horizon", "20000"});
  CHECK(pr.exit_code == 0);
  CHECK(pr.out.find("composite drift = 29/915") != std::string::npos);
  CHECK(pr.out.find("pi(0) = 25/61") != std::string::npos);
  CHECK(pr.out.find("alpha = -1/15") != std::string::npos);

  auto ms = run({"counterexample", "nn-ms", "--horizon", "20000"});
  CHECK(ms.exit_code == 0);
  CHECK(ms.out.find("nn_ms_stat_final=") != std::string::npos);
}

TEST_CASE("drain prints the arrival sequence") {
  auto ok = run({"drain", fixture_path("nn-fdiag.json"), "--state", "1,0,0;1,0,0"});
  CHECK(ok.exit_code == 0);
  CHECK(ok.out == "arrivals: 1\n2|2'\n");

  auto unstable =
      run({"drain", fixture_path("nn-fanti.json"), "--state", "0,0,1;0,0,1"});
  CHECK(unstable.exit_code == 1);

  auto malformed =
      run({"drain", fixture_path("nn.json"), "--state", "1,0,0;0,1,0"});
  CHECK(malformed.exit_code == 2);  // invalid buffer state
}

TEST_CASE("bad input exits with code 2") {
  CHECK(run({"check", "/nonexistent.json"}).exit_code == 2);
  CHECK(run({"nonsense"}).exit_code == 2);
  CHECK(run({"simulate", fixture_path("nn.json"), "--policy", "bogus"}).exit_code == 2);
  CHECK(run({"simulate", fixture_path("nn.json"), "--horizon", "0"}).exit_code == 2);
}

TEST_CASE("built-in fixture names resolve") {
  auto nn = run({"check", "nn"});
  CHECK(nn.exit_code == 0);
  auto nnn = run({"facets", "nnn"});
  CHECK(count_lines(nnn.out) == 25);
}

TEST_CASE("check exit codes match the library verdicts on every fixture") {
  struct Expected {
    const char* name;
    int ncond_exit;
  };
  for (auto [name, exit] : {Expected{"nn.json", 0}, Expected{"nnn.json", 0},
                            Expected{"nn-fdiag.json", 0},
                            Expected{"nn-fanti.json", 1}}) {
    auto result = run({"check", fixture_path(name)});
    CHECK(result.exit_code == exit);
  }
}

TEST_CASE("the constructed measure feeds back into the checker") {
  auto made = run({"measure", fixture_path("nn-fdiag.json")});
  REQUIRE(made.exit_code == 0);
  std::string temp = "/tmp/matchstab-measure-roundtrip.json";
  {
    std::ofstream out(temp);
    out << made.out;
  }
  auto verdict = run({"check", temp});
  CHECK(verdict.exit_code == 0);
  CHECK(verdict.out == "NCond: yes\n");
}
