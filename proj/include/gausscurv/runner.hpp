#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "gausscurv/config.hpp"

namespace gcurv {

const std::vector<std::string>& subcommands();

struct RunOutcome {
  int status = 0;                   // 0 ok, 1 internal, 2 contract, 3 nonconvergence, 4 config
  std::string message;              // error text when status != 0
  std::vector<std::string> files;   // written reports, in order
};

/// Runs one subcommand on a parsed config and writes its reports into out_dir.
/// Never throws; failures are reported through the status.
RunOutcome run_subcommand(const std::string& subcommand, const ExperimentConfig& config, const std::string& out_dir,
                          std::ostream* log = nullptr);

/// Loads the config file, applies the overrides (empty / 0 keep the config
/// values) and runs the subcommand.
RunOutcome run_config_file(const std::string& subcommand, const std::string& config_path,
                           const std::string& out_dir_override, int threads_override, std::ostream* log = nullptr);

}  // namespace gcurv
