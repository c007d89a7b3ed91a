// One PASS/FAIL line per acceptance criterion. Optional arguments: output directory, then criterion numbers.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "boltz/collision.hpp"
#include "boltz/config.hpp"
#include "boltz/grid.hpp"
#include "boltz/run.hpp"

using namespace boltz;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

fs::path g_root;
std::map<std::string, RunOutcome> g_runs;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Runs `command` on `preset_name` once and caches the outcome under `key`.
const RunOutcome& outcome(const std::string& key, const std::string& preset_name, const std::string& command = "") {
  auto it = g_runs.find(key);
  if (it != g_runs.end()) return it->second;
  RunConfig cfg = preset(preset_name);
  if (!command.empty()) cfg.command = command;
  const fs::path dir = g_root / key;
  fs::remove_all(dir);
  return g_runs.emplace(key, run(cfg, dir.string())).first->second;
}

// Passes when every named check is present and passing; the detail lists them.
Verdict require(const RunOutcome& r, std::initializer_list<const char*> names, const std::string& tag = "") {
  Verdict v{true, ""};
  for (const char* n : names) {
    bool found = false;
    for (const auto& c : r.checks) {
      if (c.name != n) continue;
      found = true;
      v.pass = v.pass && c.pass;
      v.detail += (v.detail.empty() ? "" : "; ") + tag + c.name + (c.pass ? " ok" : " FAILED") + " (" + c.detail + ")";
    }
    if (!found) {
      v.pass = false;
      v.detail += (v.detail.empty() ? "" : "; ") + tag + n + " missing";
    }
  }
  for (const auto& c : r.checks)
    if (c.name == "integration" && !c.pass) {
      v.pass = false;
      v.detail += "; " + tag + "integration FAILED (" + c.detail + ")";
    }
  return v;
}

Verdict both(Verdict a, const Verdict& b) {
  a.pass = a.pass && b.pass;
  a.detail += "; " + b.detail;
  return a;
}

Distribution preset_initial(const std::string& name, int N) {
  RunConfig cfg = preset(name);
  cfg.grid.N = N;
  return cfg.initial_distribution();
}

Verdict equilibrium_annihilation() {
  std::vector<double> res;
  for (int N : {32, 64}) {
    const Distribution f = preset_initial("maxwellian-2d", N);
    const CollisionParams params{};
    const CollisionOperator op(f.grid, params, SplitConfig{}, CollisionQuad::for_grid(f.grid));
    const auto q = op.apply(f);
    double m = 0.0;
    for (std::size_t n = 0; n < q.size(); ++n)
      if (f.grid.speed(n) <= 0.5 * f.grid.L) m = std::max(m, std::abs(q[n]));
    res.push_back(m);
  }
  const double ratio = res[0] / res[1];
  return {ratio >= 2.0, "max|Q| on |v| <= L/2: N=32 " + num(res[0]) + ", N=64 " + num(res[1]) + ", ratio " +
                            num(ratio) + " >= 2"};
}

Verdict splitting_consistency() {
  const RunConfig cfg = preset("bimodal-2d");
  const Distribution f = cfg.initial_distribution();
  const Grid& g = f.grid;
  const auto quad = cfg.collision_quad();
  SplitConfig plain, weighted;
  weighted.weight = cfg.weights.tracked(g.d, cfg.kernel.nu).front();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
  std::vector<double> v(g.d);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    g.coords(pick(rng), v);
    const double a = q_total(f, v, plain, cfg.kernel, quad);
    const double b = q_total(f, v, weighted, cfg.kernel, quad);
    worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-12));
  }
  Verdict r{worst < 5e-2, "max relative gap constant vs " + to_string(weighted.weight) + " over 20 nodes " +
                              num(worst) + " < 5e-2"};
  r = both(r, require(outcome("bimodal", "bimodal-2d"), {"q11_sign"}, "bimodal "));
  r = both(r, require(outcome("shifted", "shifted-bump-2d"), {"q11_sign"}, "shifted-bump "));
  r = both(r, require(outcome("ml", "ml-weights"), {"q11_sign"}, "ml-weights "));
  return r;
}

Verdict tail_propagation() {
  Verdict r = require(outcome("shifted", "shifted-bump-2d"), {"alpha_cascade", "envelope", "linf_l1_chain"},
                      "shifted-bump ");
  return both(r, require(outcome("ml", "ml-weights"), {"alpha_cascade", "envelope", "linf_l1_chain"}, "ml-weights "));
}

Verdict determinism() {
  const std::string name = "maxwellian-2d";
  const auto& a = outcome("determinism_a", name);
  const auto& b = outcome("determinism_b", name);
  Verdict r{true, name + ":"};
  std::set<std::string> csvs;
  for (const auto& files : {a.files, b.files})
    for (const auto& f : files)
      if (fs::path(f).extension() == ".csv") csvs.insert(fs::path(f).filename().string());
  if (csvs.empty()) return {false, "no CSV output"};
  for (const auto& f : csvs) {
    const std::string x = slurp(g_root / "determinism_a" / f), y = slurp(g_root / "determinism_b" / f);
    const bool same = !x.empty() && x == y;
    r.pass = r.pass && same;
    r.detail += " " + f + (same ? " identical (" + std::to_string(x.size()) + " bytes)" : " DIFFERS");
  }
  return r;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> eval;
};

}  // namespace

int main(int argc, char** argv) {
  g_root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "boltz_acceptance";
  fs::create_directories(g_root);
  std::set<int> only;
  for (int i = 2; i < argc; ++i) only.insert(std::atoi(argv[i]));

  const std::vector<Criterion> criteria{
      {1, "equilibrium_annihilation", equilibrium_annihilation},
      {2, "conservation", [] { return require(outcome("bimodal", "bimodal-2d"), {"conservation"}); }},
      {3, "h_theorem", [] { return require(outcome("bimodal", "bimodal-2d"), {"entropy"}); }},
      {4, "carleman_identity",
       [] { return require(outcome("carleman", "cone-2d", "carleman-check"), {"identity", "identity_refinement"}); }},
      {5, "kernel_equivalence",
       [] {
         return require(outcome("kernel", "cone-2d", "validate-kernel"),
                        {"kernel_equivalence_spread", "kernel_equivalence_refinement"});
       }},
      {6, "change_of_variables",
       [] {
         return require(outcome("carleman", "cone-2d", "carleman-check"), {"change_of_vars_2d", "change_of_vars_3d"});
       }},
      {7, "weight_properties",
       [] { return require(outcome("weights", "cone-2d", "validate-weights"), {"P1_P4", "exponential_c2"}); }},
      {8, "mittag_leffler",
       [] {
         return require(outcome("weights", "cone-2d", "validate-weights"),
                        {"ml_exponential", "ml_moment_routes", "ml_equivalence"});
       }},
      {9, "cone_pipeline",
       [] {
         return require(outcome("cone", "cone-2d", "cone-check"),
                        {"cone_nonempty", "cone_symmetric", "cone_constants", "cone_dot_bound", "cone_integral",
                         "cone_equality_case"});
       }},
      {10, "splitting_consistency", splitting_consistency},
      {11, "tail_propagation", tail_propagation},
      {12, "moment_generation", [] { return require(outcome("bimodal", "bimodal-2d"), {"moment_generation"}); }},
      {13, "determinism", determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    Verdict v;
    try {
      v = c.eval();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("%s %d %s: %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
