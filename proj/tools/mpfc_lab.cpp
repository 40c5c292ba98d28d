// mpfc-lab <config-path> [--output-dir D] [--seed N] [--quiet]

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "mpfc/mpfc.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral PFC/MPFC experiment runner"};
  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("config", config_path, "key=value run configuration")->required();
  app.add_option("--output-dir", output_dir, "override output_dir");
  app.add_option("--seed", seed, "override seed");
  app.add_flag("--quiet", quiet, "print errors only");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mpfc::exit_config_error;
  }

  mpfc::RunConfig cfg;
  try {
    cfg = mpfc::load_config(config_path);
    mpfc::apply_overrides(cfg, output_dir, seed);
  } catch (const mpfc::ConfigError& e) {
    std::cerr << "error [" << config_path << " > " << e.key() << "] " << e.what() << '\n';
    return mpfc::exit_config_error;
  }
  mpfc::RunOptions opt;
  opt.quiet = quiet;
  return mpfc::run(cfg, opt);
}
