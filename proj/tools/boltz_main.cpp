#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "boltz/run.hpp"

namespace {

std::string joined(const std::vector<std::string>& names) {
  std::string s;
  for (const auto& n : names) s += (s.empty() ? "" : ", ") + n;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic velocity-grid lab for the homogeneous non-cutoff Boltzmann equation"};
  app.require_subcommand(1);

  std::string config_path, preset_name, out_dir;
  std::int64_t seed = -1;
  bool quiet = false;
  std::vector<CLI::App*> runs;
  for (const auto& name : boltz::command_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " pipeline");
    auto* cfg = sub->add_option("--config", config_path, "configuration file");
    auto* pre = sub->add_option("--preset", preset_name, "built-in configuration (" + joined(boltz::preset_names()) + ")");
    cfg->excludes(pre);
    sub->add_option("--out", out_dir, "output directory (default: $BOLTZ_OUT_DIR or ./out)");
    sub->add_option("--seed", seed, "seed for randomized sampling")->check(CLI::NonNegativeNumber);
    sub->add_flag("--quiet", quiet, "suppress progress output");
    runs.push_back(sub);
  }
  auto* show = app.add_subcommand("preset", "print a preset configuration");
  std::string show_name;
  show->add_option("name", show_name, "preset name")->required();
  app.add_subcommand("presets", "list preset names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (show->parsed()) {
      std::cout << boltz::serialize(boltz::preset(show_name));
      return 0;
    }
    if (app.got_subcommand("presets")) {
      for (const auto& n : boltz::preset_names()) std::cout << n << "\n";
      return 0;
    }
    CLI::App* sub = nullptr;
    for (auto* s : runs)
      if (s->parsed()) sub = s;
    boltz::RunConfig cfg;
    if (!config_path.empty())
      cfg = boltz::load_config(config_path);
    else if (!preset_name.empty())
      cfg = boltz::preset(preset_name);
    else
      throw std::invalid_argument("one of --config or --preset is required");
    cfg.command = sub->get_name();
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (out_dir.empty()) {
      const char* env = std::getenv("BOLTZ_OUT_DIR");
      out_dir = env && *env ? env : "out";
    }
    const auto outcome = boltz::run(cfg, out_dir, quiet ? nullptr : &std::cerr);
    std::cerr << outcome.failure_list();
    if (!quiet) std::cerr << (outcome.pass() ? "all checks passed" : "some checks failed") << " (" << out_dir << ")\n";
    return outcome.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "FAIL config: " << e.what() << "\n";
    return 2;
  }
}
