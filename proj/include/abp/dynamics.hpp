#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "abp/bias.hpp"
#include "abp/kernel.hpp"
#include "abp/measure.hpp"
#include "abp/oracle.hpp"
#include "abp/potential.hpp"
#include "abp/rng.hpp"
#include "abp/torus.hpp"

namespace abp {

enum class Variant { unbiased, star, abp, abp_time_changed, frozen };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct SimulationConfig {
  double beta = 4.0;
  double dt = 1e-3;
  long long n_steps = 0;
  std::uint64_t seed = 1;
  int refresh_every = 10;
  Variant variant = Variant::unbiased;
  double noise_scale = 1.0;    // test hook; production value is 1
  double lambda_dt_cap = 0.1;  // effective-step cap for time-scaled variants

  void validate() const;
};

struct SimulationInputs {
  const Potential* potential = nullptr;
  const TestFunctionFamily* family = nullptr;
  const PeriodicKernel* kernel = nullptr;  // adaptive variants
  int m = 1;
  int bins = 256;
  InitialMeasure mu0 = InitialMeasure::uniform;
  double prior_weight = 1.0;
  std::vector<double> x0;  // start point; defaults to 0.25 per coordinate
  const FreeEnergyProfile* star_profile = nullptr;  // star variant
  const BiasFunction* frozen_bias = nullptr;        // frozen variant
  const std::vector<double>* target_moments = nullptr;  // optional, for d curves
};

struct SimulationState {
  std::vector<double> x;
  double t = 0.0;
  double theta = 0.0;
  long long step = 0;
  OccupationMeasure measure;
  BiasFunction bias;
  GaussianRng rng;
  std::optional<BiasEstimator> estimator;      // abp / time-changed
  std::optional<OccupationMeasure> reweight;   // star: weight exp(-beta A_star(xi))

  SimulationState(OccupationMeasure measure_, BiasFunction bias_, GaussianRng rng_)
      : measure(std::move(measure_)), bias(std::move(bias_)), rng(std::move(rng_)) {}
};

SimulationState init_state(const SimulationConfig& config,
                           const SimulationInputs& inputs);

// One Euler-Maruyama update per variant. Move first, then accumulate at the
// new point with the bias evaluated at the new point.
void em_step_unbiased(SimulationState& s, const Potential& V,
                      const SimulationConfig& config);
void em_step_star(SimulationState& s, const Potential& V,
                  const SimulationConfig& config);
void em_step_abp(SimulationState& s, const Potential& V,
                 const SimulationConfig& config);
void em_step_time_changed(SimulationState& s, const Potential& V,
                          const SimulationConfig& config);
void em_step_frozen(SimulationState& s, const Potential& V,
                    const SimulationConfig& config);

struct Checkpoint {
  long long step = 0;
  double t = 0.0;
  double theta = 0.0;
  std::vector<double> x;
  std::vector<double> moments;      // normalized
  std::vector<double> bias_values;  // current bias grid
  std::vector<double> marginal;     // normalized xi histogram
  double flat_dev = 0.0;            // max |marginal - uniform|
  double d_to_target = 0.0;         // NaN when no target moments provided
  std::vector<double> reweight_sums;  // star: cumulative weighted moment sums
  double reweight_weight = 0.0;       // star: cumulative weight
};

struct RunRecord {
  SimulationConfig config;
  int m = 1;
  int bins = 256;
  std::vector<Checkpoint> checkpoints;
  std::vector<double> final_x;
  double final_t = 0.0;
  double final_theta = 0.0;

  const Checkpoint& final_checkpoint() const { return checkpoints.back(); }
};

// Deterministic given the config; checkpoints at the requested model times
// (rounded to steps; 0 and n_steps are always included).
RunRecord run_simulation(const SimulationConfig& config,
                         const SimulationInputs& inputs,
                         const std::vector<double>& checkpoint_times);

// Linear interpolation of checkpointed normalized moments at model time t.
std::vector<double> moments_at_time(const RunRecord& record, double t);

}  // namespace abp
