#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "abp/experiment.hpp"

namespace {

abp::ExperimentConfig load_config(const std::string& config_path,
                                  const std::string& preset,
                                  const std::string& output_override,
                                  std::int64_t seed_override,
                                  const std::string& variant_filter,
                                  int threads_override) {
  abp::ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = abp::parse_config_file(config_path);
  } else if (!preset.empty()) {
    cfg = abp::parse_config("preset = " + preset);
  } else {
    throw std::runtime_error("either --config or --preset is required");
  }
  if (!output_override.empty()) cfg.output_dir = output_override;
  if (seed_override >= 0)
    cfg.seeds = {static_cast<std::uint64_t>(seed_override)};
  if (!variant_filter.empty())
    cfg.variants = {abp::variant_from_name(variant_filter)};
  if (threads_override > 0) cfg.threads = threads_override;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive biasing potential sampler on the flat torus"};
  app.require_subcommand(1);

  std::string config_path, preset, output_dir, variant_filter;
  std::int64_t seed_override = -1;
  int threads = 0;
  bool check = false;

  CLI::App* run = app.add_subcommand("run", "run the configured experiment");
  run->add_option("--config", config_path, "config file (key = value lines)");
  run->add_option("--preset", preset,
                  "experiment preset (uniform-smoke, separable-base, "
                  "double-well-acceptance)");
  run->add_option("--output", output_dir, "output directory override");
  run->add_option("--seed", seed_override, "run a single seed");
  run->add_option("--variant", variant_filter, "run a single variant");
  run->add_option("--threads", threads, "OpenMP thread count override");
  run->add_flag("--check", check,
                "evaluate the configured pass thresholds and set the exit code");

  CLI::App* oracle = app.add_subcommand(
      "oracle", "write only the quadrature reference outputs");
  oracle->add_option("--config", config_path, "config file");
  oracle->add_option("--preset", preset, "experiment preset");
  oracle->add_option("--output", output_dir, "output directory override");
  oracle->add_option("--threads", threads, "OpenMP thread count override");

  CLI11_PARSE(app, argc, argv);

  try {
    const abp::ExperimentConfig cfg = load_config(
        config_path, preset, output_dir, seed_override, variant_filter, threads);

    if (oracle->parsed()) {
      abp::write_oracle_outputs(cfg);
      std::cout << "oracle outputs written to " << cfg.output_dir << "\n";
      return 0;
    }

    const abp::ExperimentResult result = abp::run_experiment(cfg);
    std::cout << "artifacts written to " << result.output_dir << "\n";
    if (check) {
      for (const abp::CheckOutcome& c : result.checks) {
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " "
                  << c.variant << " seed=" << c.seed << " value=" << c.value
                  << " threshold=" << c.threshold << "\n";
      }
      if (!result.checks_enabled) {
        std::cout << "no checks configured (set check_* keys)\n";
        return 0;
      }
      return result.all_passed ? 0 : 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
