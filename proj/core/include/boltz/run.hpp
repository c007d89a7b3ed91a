#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "boltz/config.hpp"

namespace boltz {

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

struct RunOutcome {
  std::vector<Check> checks;
  std::vector<std::string> files;

  bool pass() const;
  int exit_code() const { return pass() ? 0 : 1; }
  // One "FAIL name: detail" line per failed check.
  std::string failure_list() const;
};

// Executes cfg.command, writing diagnostics.csv, report.txt and any extra tables into out_dir.
// `log` receives progress lines; it never affects the files.
RunOutcome run(const RunConfig& cfg, const std::string& out_dir, std::ostream* log = nullptr);

}  // namespace boltz
