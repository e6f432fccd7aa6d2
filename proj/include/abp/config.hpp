#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abp/dynamics.hpp"
#include "abp/potential.hpp"

namespace abp {

// Experiment description: potential preset, kernel, discretization, seeds,
// variants, output locations and optional pass thresholds. Built by
// parse_config from key = value text.
struct ExperimentConfig {
  std::string preset;  // optional bundle applied before explicit keys
  std::string potential = "double-well";
  int d = 2;
  int m = 1;
  double beta = 4.0;
  // double-well parameters
  double h = 1.0;
  double c = 0.5;
  double gamma = 0.25;
  // separable parameters
  double a1 = 1.0;
  double a2 = 0.5;

  double epsilon = 0.1;
  double floor_delta = 0.01;

  double dt = 1e-3;
  double T = 100.0;
  std::vector<std::uint64_t> seeds = {1};
  std::vector<Variant> variants = {Variant::abp};
  int refresh_every = 10;
  int family_size = 40;
  int histogram_bins = 256;
  int checkpoint_count = 160;
  std::string checkpoint_spacing = "log";
  int oracle_resolution = 512;
  std::vector<double> x0;  // empty: 0.25 per coordinate
  std::string mu0 = "uniform";
  double prior_weight = 1.0;
  double noise_scale = 1.0;
  double lambda_dt_cap = 0.1;
  std::string frozen_bias = "a-infinity";  // or "zero"
  std::string output_dir = "out";
  int threads = 0;  // 0: leave the OpenMP default

  // Pass thresholds for `--check`; NaN disables a check.
  double check_d_final = nan_value();
  double check_bias_sup = nan_value();
  double check_flat_dev = nan_value();

  static double nan_value();

  long long n_steps() const;
  Potential make_potential() const;
  std::vector<double> start_point() const;
  std::vector<double> checkpoint_times() const;

  // Canonical re-parseable key = value text with every effective key.
  std::string canonical_text() const;

  void validate() const;
};

// Parses key = value lines (# starts a comment). Unknown keys and constraint
// violations raise std::invalid_argument naming the key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace abp
