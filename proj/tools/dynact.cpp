// Command-line driver: dynact <stage> --config <path> [--out <dir>] [--seed <u64>]

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dynact/config.hpp"
#include "dynact/errors.hpp"
#include "dynact/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dynamic CT toolkit: simulate, estimate motion, reconstruct, evaluate"};
  std::string stage_name;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("stage", stage_name, "simulate | solve-motion | reconstruct | evaluate | all")
      ->required();
  app.add_option("--config", config_path, "pipeline configuration (JSON)")->required();
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.add_option("--seed", seed, "random seed (overrides seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const dynact::Stage stage = dynact::parse_stage(stage_name);
    dynact::PipelineConfig config = dynact::load_config(config_path);
    if (seed) {
      config.seed = *seed;
      config.resolve();
    }
    if (!out_dir.empty()) config.output_dir = out_dir;
    dynact::run_stage(stage, config, config.output_dir, std::cerr);
  } catch (const dynact::Error& e) {
    std::cerr << "dynact: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "dynact: internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
