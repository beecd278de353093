#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pspin/commands.hpp"
#include "pspin/version.hpp"

int main(int argc, char** argv) {
  using namespace pspin::cli;

  CLI::App app{"Phase-space simulation of driven dissipative spin ensembles"};
  app.set_version_flag("--version", std::string(pspin::kVersion));
  std::string command_name, config_path, out_dir, formats;
  std::uint64_t seed = 0;
  int threads = -1;
  bool force = false;
  app.add_option("command", command_name,
                 "coeffs | meanfield | fixed-points | sample | exact | compare | verify | density")
      ->required();
  app.add_option("--config", config_path, "JSON run configuration")->required();
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides output.directory)");
  app.add_flag("--force", force, "sample even where the Fokker-Planck condition fails");
  auto* fmt_opt = app.add_option("--format", formats, "csv[,svg][,json]");
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides sim.seed)");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads, 0 = all cores");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const auto command = parse_command(command_name);
  if (!command) {
    std::cerr << "pspin: unknown command '" << command_name << "'\n";
    return kExitConfig;
  }
  RunConfig config;
  try {
    config = load_config(config_path);
    if (*out_opt) config.output.directory = out_dir;
    if (*seed_opt) config.sim.seed = seed;
    if (*threads_opt) config.sim.threads = threads;
    if (force) config.sim.force = true;
    if (*fmt_opt) {
      config.output.svg = config.output.json = false;
      bool csv = false;
      std::stringstream list(formats);
      for (std::string item; std::getline(list, item, ',');) {
        if (item == "csv") {
          csv = true;
        } else if (item == "svg") {
          config.output.svg = true;
        } else if (item == "json") {
          config.output.json = true;
        } else {
          throw pspin::InvalidArgument("--format", "unknown format '" + item + "'");
        }
      }
      if (!csv) {
        throw pspin::InvalidArgument("--format", "csv output is mandatory");
      }
    }
    validate(config);
  } catch (const IoError& e) {
    std::cerr << "pspin: " << e.what() << "\n";
    return kExitIo;
  } catch (const pspin::InvalidArgument& e) {
    std::cerr << "pspin: invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  }
  return execute(*command, config, std::cerr);
}
