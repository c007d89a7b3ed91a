#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "boltz/config.hpp"
#include "boltz/run.hpp"

using namespace boltz;
namespace fs = std::filesystem;

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_config(text, "t.cfg");
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("boltz_test_config_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig tiny_simulation() {
  RunConfig c = preset("bimodal-2d");
  c.grid = Grid{2, 16, 8.0};
  c.sim.T_final = 0.02;
  c.sim.record_every = 1;
  return c;
}

}  // namespace

TEST_CASE("every preset survives serialize and parse unchanged") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const RunConfig c = preset(name);
    const std::string text = serialize(c);
    const RunConfig back = parse_config(text, name);
    CHECK(serialize(back) == text);
    CHECK(back.command == c.command);
    CHECK(back.initial.size() == c.initial.size());
  }
}

TEST_CASE("serialization round-trips awkward doubles exactly") {
  RunConfig c = preset("maxwellian-2d");
  c.sim.dt = 0.1 + 0.2;
  c.kernel.nu = 1.0 / 3.0;
  c.initial[0].T = 0.7000000000000001;
  const RunConfig back = parse_config(serialize(c), "x");
  CHECK(back.sim.dt == c.sim.dt);
  CHECK(back.kernel.nu == c.kernel.nu);
  CHECK(back.initial[0].T == c.initial[0].T);
}

TEST_CASE("unknown preset names the valid ones") {
  try {
    preset("nope");
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    const std::string m = e.what();
    for (const auto& n : preset_names()) CHECK(m.find(n) != std::string::npos);
  }
}

TEST_CASE("nu outside (0, 1] is rejected with the bound in the message") {
  std::string text = serialize(preset("maxwellian-2d"));
  const auto at = text.find("nu = 0.5");
  REQUIRE(at != std::string::npos);
  text.replace(at, 8, "nu = 1.5");
  const std::string m = message_of(text);
  CHECK(m.find("0 < nu <= 1") != std::string::npos);
}

TEST_CASE("malformed input reports origin and line") {
  CHECK(message_of("[grid]\nN 48\n").find("t.cfg:2:") == 0);
  CHECK(message_of("[grid]\nN = 48\nN = 32\n").find("duplicate key grid.N") != std::string::npos);
  CHECK(message_of("[grid]\nbogus = 1\n").find("unknown key grid.bogus") != std::string::npos);
  CHECK(message_of("[nowhere]\n").find("unknown section") != std::string::npos);
  CHECK(message_of("[grid\n").find("malformed section header") != std::string::npos);
  CHECK(message_of("[grid]\nL = eight\n").find("t.cfg:2:") == 0);
  CHECK(message_of("[initial]\nhump = 1 2\n").find("hump needs") != std::string::npos);
  CHECK(message_of("[sim]\nmethod = leapfrog\n").find("t.cfg:2:") == 0);
}

TEST_CASE("humps accumulate and comments are ignored") {
  const RunConfig c = parse_config(
      "command = simulate  # trailing\n[initial]\nhump = 0.25 1 0 1\nhump = 0.75 -1 0.5 2\n", "h");
  REQUIRE(c.initial.size() == 2);
  CHECK(c.initial[1].mass == 0.75);
  CHECK(c.initial[1].center[1] == 0.5);
  CHECK(c.initial[1].T == 2.0);
  CHECK(mass(c.initial_distribution()) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("weight strings round-trip") {
  for (const Weight& w : {Weight::exponential(0.25, 1.0), Weight::mittag_leffler(1.0, 1.5),
                          Weight::constant()}) {
    const Weight back = parse_weight(to_string(w));
    CHECK(back.family == w.family);
    CHECK(back.alpha == w.alpha);
    CHECK(back.p == w.p);
  }
  CHECK_THROWS_AS(parse_weight("exponential:0.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_weight("gaussian:1:2"), std::invalid_argument);
}

TEST_CASE("preset cascades are strict") {
  for (const auto& name : preset_names()) {
    const RunConfig c = preset(name);
    if (c.weights.alpha0 <= 0.0) continue;
    CAPTURE(name);
    const auto cas = c.weights.cascade(c.grid.d, c.kernel.nu);
    CHECK(cas.strict);
    CHECK(c.weights.tracked(c.grid.d, c.kernel.nu).size() == 2);
  }
}

TEST_CASE("quick commands pass and are reproducible") {
  for (const std::string cmd : {"validate-kernel", "cone-check"}) {
    CAPTURE(cmd);
    RunConfig c = preset("cone-2d");
    c.command = cmd;
    const auto a = scratch(cmd + "_a"), b = scratch(cmd + "_b");
    const RunOutcome ra = run(c, a.string());
    const RunOutcome rb = run(c, b.string());
    CHECK_MESSAGE(ra.pass(), ra.failure_list());
    CHECK(ra.exit_code() == 0);
    CHECK(slurp(a / "report.txt") == slurp(b / "report.txt"));
    CHECK(parse_config(slurp(a / "config.cfg"), "written").command == cmd);
  }
}

TEST_CASE("short simulation writes identical diagnostics twice") {
  const RunConfig c = tiny_simulation();
  const auto a = scratch("sim_a"), b = scratch("sim_b");
  const RunOutcome ra = run(c, a.string());
  run(c, b.string());
  const std::string csv = slurp(a / "diagnostics.csv");
  REQUIRE(!csv.empty());
  CHECK(csv == slurp(b / "diagnostics.csv"));
  CHECK(csv.rfind("t,mass,", 0) == 0);
  bool conserved = false;
  for (const auto& ch : ra.checks)
    if (ch.name == "conservation") conserved = ch.pass;
  CHECK(conserved);
}

TEST_CASE("oversized time step is refused before integrating") {
  RunConfig c = tiny_simulation();
  c.sim.dt = 5.0;
  c.sim.T_final = 10.0;
  CHECK_THROWS_AS(run(c, scratch("dt").string()), std::invalid_argument);
}
