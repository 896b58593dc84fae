#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gausscurv/gausscurv.h"

int main(int argc, char** argv) {
  CLI::App app{"Prescribed Gaussian curvature experiments"};
  app.set_version_flag("--version", gc_version());

  std::string config_path;
  std::string out_dir;
  int threads = 0;
  bool verbose = false;
  app.add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides run.out_dir)");
  app.add_option("--threads", threads, "worker threads (overrides run.threads)")->check(CLI::PositiveNumber);
  app.add_flag("--verbose,-v", verbose, "progress on stderr");

  const std::vector<std::string> names{"alphap", "solve", "verify-exact", "verify-potential", "fit", "k0-probe"};
  std::string subcommand;
  app.add_option("subcommand", subcommand, "alphap | solve | verify-exact | verify-potential | fit | k0-probe")
      ->required()
      ->check(CLI::IsMember(names));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return GC_ERR_CONFIG;
  }

  const int status = gc_run(subcommand.c_str(), config_path.c_str(), out_dir.c_str(), threads, verbose ? 1 : 0);
  if (status != GC_OK) {
    std::cerr << "gausscurv " << subcommand << ": " << gc_last_error() << "\n";
  } else if (verbose) {
    std::cerr << "gausscurv " << subcommand << ": done\n";
  }
  return status;
}
