#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "urlab/config.hpp"
#include "urlab/dispatch.hpp"
#include "urlab/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Unit-root regression prediction experiments"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  bool strict = false;
  bool dump = false;

  auto* config_opt = app.add_option("--config", config_path, "Configuration file (defaults apply when omitted)")
                         ->check(CLI::ExistingFile);
  auto* out_opt = app.add_option("--out", out_dir, "Output directory, overrides [experiment] output");
  auto* seed_opt = app.add_option("--seed", seed, "Base seed, overrides [experiment] base_seed");
  auto* workers_opt = app.add_option("--workers", workers, "Worker threads, 0 = hardware concurrency");
  app.add_flag("--strict", strict, "Exit with status 1 when any check fails");
  app.add_flag("--dump-trajectory", dump, "Also write replication 0 as trajectory.csv");
  for (auto* opt : {config_opt, out_opt, seed_opt, workers_opt}) opt->configurable(false);

  for (const auto& name : urlab::subcommands()) {
    app.add_subcommand(name, "Run the " + name + " experiment")->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return urlab::kExitConfigError;
  }

  urlab::RunOptions options;
  options.subcommand = app.get_subcommands().front()->get_name();
  options.config_path = config_path;
  if (*out_opt) options.output_dir = out_dir;
  if (*seed_opt) options.seed = seed;
  if (*workers_opt) options.workers = workers;
  options.strict = strict;
  options.dump_trajectory = dump;

  try {
    const urlab::LabConfig config = config_path.empty() ? urlab::LabConfig{} : urlab::load_config(config_path);
    return urlab::dispatch(options, config, std::cout).exit_code;
  } catch (const urlab::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return urlab::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return urlab::kExitAcceptanceFailure;
  }
}
