#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "abp/dynamics.hpp"
#include "abp/measure.hpp"
#include "abp/oracle.hpp"

namespace abp {

struct ConvergenceThresholds {
  int n_used = 20;            // moments entering the metric
  double d_final = 0.05;      // bound on the final-window metric values
  double bias_sup_final = 0.025;  // bound on the final-window sup errors
  double tail_fraction = 0.2;     // fraction of checkpoints in the final window
  int trend_window = 10;
  double trend_band_d = 0.01;
  double trend_band_bias = 0.01;
};

// Per-checkpoint distance-to-target, bias sup-error and flat-histogram
// deviation curves, with pass flags over the final window.
struct ConvergenceReport {
  std::vector<double> times;
  std::vector<double> d_values;
  std::vector<double> bias_sup_errors;
  std::vector<double> flat_histogram_dev;
  double final_d = 0.0;
  double final_bias_sup = 0.0;
  bool d_pass = false;
  bool bias_pass = false;
  bool d_tail_decreasing = false;
  bool bias_tail_decreasing = false;
  ConvergenceThresholds thresholds;
};

ConvergenceReport convergence_report(const RunRecord& record,
                                     const std::vector<double>& oracle_moments,
                                     const BiasFunction& oracle_a_infinity,
                                     const ConvergenceThresholds& thresholds = {});

// Frozen-bias consistency: runs the frozen dynamics for each supplied bias
// across the given seeds and compares moment averages to the oracle and to
// each other.
struct Prop1Result {
  struct PerBias {
    std::string label;
    std::vector<double> mean;  // first n_check moments, averaged over seeds
    std::vector<double> se;
    double max_abs_error = 0.0;  // vs oracle
    bool within_oracle_band = false;
  };
  std::vector<PerBias> runs;
  double max_pairwise_gap = 0.0;
  bool pairwise_ok = false;
  bool oracle_ok = false;
  std::vector<double> slope_times;
  std::vector<double> slope_errors;  // mean discrepancy at each time
  double slope = 0.0;                // log-log
};

Prop1Result prop1_check(const SimulationConfig& base_config,
                        const SimulationInputs& base_inputs,
                        const std::vector<std::pair<std::string, BiasFunction>>& biases,
                        const std::vector<std::uint64_t>& seeds,
                        const std::vector<double>& oracle_moments,
                        int n_check = 10,
                        const std::vector<double>& slope_eval_times = {});

// Ratio estimator from a star run's cumulative weighted sums: phi_index
// addresses a family member, -1 the constant function 1. The standard error
// comes from batch means over equal time windows.
struct ReweightResult {
  double estimate = 0.0;
  double oracle = 0.0;
  double error = 0.0;
  double se = 0.0;
  int batches = 0;
};

ReweightResult reweight_check(const RunRecord& star_record, int phi_index,
                              double oracle_value, int batches = 20);

// Asymptotic-pseudo-trajectory defect of a time-changed record:
//   Delta(s, S) = sup over sigma in [0, S] of
//                 d(nu at time e^{s+sigma}, Gamma_sigma(nu at time e^s)).
double apt_delta(const RunRecord& record, const std::vector<double>& oracle_moments,
                 double s, double big_s, int n_used = 20, int sigma_points = 33);

}  // namespace abp
