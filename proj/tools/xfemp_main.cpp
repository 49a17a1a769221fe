#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xfemp_tools/config.hpp"
#include "xfemp_tools/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Two-phase XFEM diffusion experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;
  int threads = 0;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON configuration");
  run->add_option("config", config_path, "Configuration file")->required();
  run->add_option("--override", overrides, "Override a configuration value (dotted.key=value)");
  run->add_option("--out", out_path, "Output path (overrides 'output')");
  run->add_option("--threads", threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!out_path.empty()) overrides.push_back("output=\"" + out_path + "\"");
    if (threads > 0) overrides.push_back("threads=" + std::to_string(threads));
    const auto cfg = xfemp::tools::load_config(config_path, overrides);
    return xfemp::tools::run_experiment(cfg, std::cout);
  } catch (const xfemp::tools::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
