#pragma once

#include <string>
#include <vector>

#include "drpolicy/experiment.hpp"

namespace drpolicy {

// Parsed command line. CLI flags override config-file values override the
// documented defaults.
struct RunConfig {
  std::string subcommand;  // evaluate|optimize|bench-pricing|bench-quadratic|bench-resource|dump-data
  ExperimentConfig exp;
  std::string out_path = "results.csv";
  std::string format = "csv";  // csv | json
  bool emit_raw = false;
  long dump_n = 1000;          // dump-data row count
};

struct ParsedCli {
  RunConfig cfg;
  std::string canonical;  // config-file serialization of the parsed subcommand
  int exit_code = 0;      // 0 parsed, 2 usage/config error (help text already printed)
  bool should_run = false;
};

// Parses argv-style arguments (program name excluded).
ParsedCli parse_config(const std::vector<std::string>& args);

// Executes a parsed run. Returns 0 on success, 1 on partial cell failure or
// I/O error, 2 on config error.
int run(const RunConfig& cfg);

int cli_main(int argc, char** argv);

}  // namespace drpolicy
