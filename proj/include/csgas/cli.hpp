#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace csgas {

// Fully resolved run description: subcommand plus a flat key -> value map
// holding every effective parameter (defaults, config-file entries, and
// command-line flags, in increasing precedence).
struct RunConfig {
  std::string subcommand;
  std::map<std::string, std::string> params;
};

// Parses `args` (argv without the program name).  A `--config FILE` option
// loads a flat key=value file; explicit flags override file values; unknown
// keys (file or flag) are rejected.  Throws ConfigError with a diagnostic
// that lists every violated constraint.
RunConfig parse_config(const std::vector<std::string>& args);

// Dispatches to the module operation and writes '#'-headed CSV to `out`
// (or to params["output"] when set).  Returns 0 on success, 2 when any
// grid point failed to converge (partial results are written with a
// `converged` column).
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// main() body: parse + run with exit codes 0 (ok), 1 (config error),
// 2 (convergence failure).
int cli_main(int argc, char** argv);

}  // namespace csgas
