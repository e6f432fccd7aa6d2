#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abp/config.hpp"

namespace abp {

struct CheckOutcome {
  std::string name;
  std::string variant;
  std::uint64_t seed = 0;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ExperimentResult {
  std::string output_dir;
  bool checks_enabled = false;
  bool all_passed = true;
  std::vector<CheckOutcome> checks;
};

// Runs every (variant, seed) pair of the config, writes the oracle
// references, per-run CSV tables, report.json and manifest.json into
// output_dir, and evaluates the configured pass thresholds.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Writes only the oracle reference outputs (profile and moments).
void write_oracle_outputs(const ExperimentConfig& config);

}  // namespace abp
