#include "abp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace abp {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::unbiased: return "unbiased";
    case Variant::star: return "star";
    case Variant::abp: return "abp";
    case Variant::abp_time_changed: return "abp-time-changed";
    case Variant::frozen: return "frozen";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "unbiased") return Variant::unbiased;
  if (name == "star") return Variant::star;
  if (name == "abp") return Variant::abp;
  if (name == "abp-time-changed" || name == "abp_time_changed")
    return Variant::abp_time_changed;
  if (name == "frozen") return Variant::frozen;
  throw std::invalid_argument("unknown variant '" + name + "'");
}

void SimulationConfig::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("config: beta must be > 0");
  if (!(dt > 0.0) || dt > 1e-2)
    throw std::invalid_argument("config: dt must lie in (0, 1e-2] (stability guard)");
  if (n_steps < 0) throw std::invalid_argument("config: n_steps must be >= 0");
  if (refresh_every < 1)
    throw std::invalid_argument("config: refresh_every must be >= 1");
  if (!(noise_scale >= 0.0))
    throw std::invalid_argument("config: noise_scale must be >= 0");
  if (!(lambda_dt_cap > 0.0))
    throw std::invalid_argument("config: lambda_dt_cap must be > 0");
}

namespace {

// Shared Euler-Maruyama move. Every variant runs the same arithmetic so that
// the degenerate configurations (zero bias, constant kernel, lambda = 1)
// reproduce the unbiased trajectory bit for bit under a shared seed.
void core_move(SimulationState& s, const Potential& V,
               const SimulationConfig& cfg, bool time_scaled) {
  const int d = static_cast<int>(s.x.size());
  const int m = s.bias.m;
  double lambda = 1.0;
  if (time_scaled) {
    lambda = std::exp(cfg.beta * s.bias.value_at(s.x.data()));
  }
  const double lam_dt = lambda * cfg.dt;
  if (time_scaled && lam_dt > cfg.lambda_dt_cap)
    throw std::runtime_error(
        "time-changed step exceeds stability cap (lambda*dt = " +
        std::to_string(lam_dt) + " > " + std::to_string(cfg.lambda_dt_cap) +
        "); reduce dt");

  double grad_v[8];
  double grad_b[4];
  double noise[8];
  V.gradient(s.x.data(), grad_v);
  s.bias.gradient_at(s.x.data(), grad_b);
  const double noise_coef =
      cfg.noise_scale * std::sqrt(2.0 / cfg.beta * lam_dt);
  s.rng.fill_normal(noise, d);
  for (int i = 0; i < d; ++i) {
    double drift = grad_v[i];
    if (i < m) drift -= grad_b[i];
    s.x[static_cast<std::size_t>(i)] = wrap_unit(
        s.x[static_cast<std::size_t>(i)] - drift * lam_dt + noise_coef * noise[i]);
  }
  s.t += cfg.dt;
  s.step += 1;
}

// Accumulate the new point into the primary measure (and the estimator when
// the bias adapts), with the given weight.
void accumulate_primary(SimulationState& s, const SimulationConfig& cfg,
                        double weight, bool feed_estimator) {
  static thread_local std::vector<double> vals;
  const std::size_t n = static_cast<std::size_t>(s.measure.family().size());
  vals.resize(n);
  s.measure.family().evaluate_all(s.x.data(), vals.data());
  const std::size_t bin = s.measure.bin_of(s.x.data());
  const double mass = weight * cfg.dt;
  s.measure.add_weighted(vals.data(), bin, mass);
  if (feed_estimator) s.estimator->deposit(bin, mass);
  s.theta += mass;
  if (s.reweight) {
    // Star variant: second accumulator weighted by exp(-beta A_star(xi)).
    const double w2 = std::exp(-cfg.beta * s.bias.value_at(s.x.data()));
    s.reweight->add_weighted(vals.data(), bin, w2 * cfg.dt);
  }
}

void maybe_refresh(SimulationState& s, const SimulationConfig& cfg) {
  if (s.step % cfg.refresh_every == 0) s.estimator->write_bias(s.bias);
}

}  // namespace

void em_step_unbiased(SimulationState& s, const Potential& V,
                      const SimulationConfig& cfg) {
  core_move(s, V, cfg, false);
  accumulate_primary(s, cfg, 1.0, false);
}

void em_step_star(SimulationState& s, const Potential& V,
                  const SimulationConfig& cfg) {
  core_move(s, V, cfg, false);
  accumulate_primary(s, cfg, 1.0, false);
}

void em_step_abp(SimulationState& s, const Potential& V,
                 const SimulationConfig& cfg) {
  core_move(s, V, cfg, false);
  const double weight = std::exp(-cfg.beta * s.bias.value_at(s.x.data()));
  accumulate_primary(s, cfg, weight, true);
  maybe_refresh(s, cfg);
}

void em_step_time_changed(SimulationState& s, const Potential& V,
                          const SimulationConfig& cfg) {
  core_move(s, V, cfg, true);
  accumulate_primary(s, cfg, 1.0, true);
  maybe_refresh(s, cfg);
}

void em_step_frozen(SimulationState& s, const Potential& V,
                    const SimulationConfig& cfg) {
  core_move(s, V, cfg, true);
  accumulate_primary(s, cfg, 1.0, false);
}

SimulationState init_state(const SimulationConfig& config,
                           const SimulationInputs& inputs) {
  config.validate();
  if (inputs.potential == nullptr || inputs.family == nullptr)
    throw std::invalid_argument("init_state: potential and family are required");
  const int d = inputs.potential->dim();
  if (inputs.m < 1 || inputs.m > d - 1)
    throw std::invalid_argument("init_state: need 1 <= m <= d-1");
  if (inputs.family->dim() != d)
    throw std::invalid_argument("init_state: family dimension mismatch");

  std::vector<double> x0 = inputs.x0;
  if (x0.empty()) x0.assign(static_cast<std::size_t>(d), 0.25);
  if (static_cast<int>(x0.size()) != d)
    throw std::invalid_argument("init_state: x0 dimension mismatch");
  const TorusPoint start = wrap(x0);

  OccupationMeasure measure(*inputs.family, inputs.m, inputs.bins, inputs.mu0,
                            &start, inputs.prior_weight);
  BiasFunction bias(inputs.m, inputs.bins, config.beta);

  SimulationState s(std::move(measure), std::move(bias), GaussianRng(config.seed));
  s.x = start.coords;

  switch (config.variant) {
    case Variant::unbiased:
      break;
    case Variant::star: {
      if (inputs.star_profile == nullptr)
        throw std::invalid_argument("init_state: star variant needs a profile");
      const BiasFunction& a = inputs.star_profile->a_star;
      if (a.m != inputs.m)
        throw std::invalid_argument("init_state: profile dimension mismatch");
      s.bias = a;
      s.bias.beta = config.beta;
      s.reweight.emplace(*inputs.family, inputs.m, inputs.bins,
                         InitialMeasure::none);
      break;
    }
    case Variant::abp:
    case Variant::abp_time_changed: {
      if (inputs.kernel == nullptr)
        throw std::invalid_argument("init_state: adaptive variants need a kernel");
      if (inputs.kernel->dim() != inputs.m)
        throw std::invalid_argument("init_state: kernel dimension mismatch");
      s.estimator.emplace(KernelStencil(*inputs.kernel, inputs.bins));
      s.estimator->reset_from(s.measure);
      // A_0 read off the initial measure, so it lands in the admissible set.
      s.estimator->write_bias(s.bias);
      break;
    }
    case Variant::frozen: {
      if (inputs.frozen_bias == nullptr)
        throw std::invalid_argument("init_state: frozen variant needs a bias");
      if (inputs.frozen_bias->m != inputs.m ||
          inputs.frozen_bias->grid_size != inputs.bins)
        throw std::invalid_argument("init_state: frozen bias grid mismatch");
      s.bias = *inputs.frozen_bias;
      s.bias.beta = config.beta;
      break;
    }
  }
  return s;
}

namespace {

Checkpoint make_checkpoint(const SimulationState& s, const SimulationInputs& inputs,
                           int n_used) {
  Checkpoint c;
  c.step = s.step;
  c.t = s.t;
  c.theta = s.theta;
  c.x = s.x;
  c.moments = s.measure.normalized_moments();
  c.bias_values = s.bias.values;
  c.marginal = s.measure.normalized_marginal();
  const double uniform = 1.0 / static_cast<double>(c.marginal.size());
  c.flat_dev = 0.0;
  for (double p : c.marginal)
    c.flat_dev = std::max(c.flat_dev, std::abs(p - uniform));
  if (inputs.target_moments != nullptr) {
    c.d_to_target =
        metric_d(c.moments, *inputs.target_moments,
                 std::min(n_used, static_cast<int>(c.moments.size()))).value;
  } else {
    c.d_to_target = std::numeric_limits<double>::quiet_NaN();
  }
  if (s.reweight) {
    c.reweight_sums = s.reweight->moment_sums();
    c.reweight_weight = s.reweight->total_weight();
  }
  return c;
}

}  // namespace

RunRecord run_simulation(const SimulationConfig& config,
                         const SimulationInputs& inputs,
                         const std::vector<double>& checkpoint_times) {
  SimulationState s = init_state(config, inputs);
  const Potential& V = *inputs.potential;

  std::vector<long long> marks;
  marks.push_back(0);
  for (double t : checkpoint_times) {
    long long step = std::llround(t / config.dt);
    step = std::clamp(step, 0LL, config.n_steps);
    marks.push_back(step);
  }
  marks.push_back(config.n_steps);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  RunRecord record;
  record.config = config;
  record.m = inputs.m;
  record.bins = inputs.bins;

  std::size_t next_mark = 0;
  if (marks[0] == 0) {
    record.checkpoints.push_back(make_checkpoint(s, inputs, 20));
    ++next_mark;
  }
  for (long long step = 0; step < config.n_steps; ++step) {
    switch (config.variant) {
      case Variant::unbiased: em_step_unbiased(s, V, config); break;
      case Variant::star: em_step_star(s, V, config); break;
      case Variant::abp: em_step_abp(s, V, config); break;
      case Variant::abp_time_changed: em_step_time_changed(s, V, config); break;
      case Variant::frozen: em_step_frozen(s, V, config); break;
    }
    if (next_mark < marks.size() && s.step == marks[next_mark]) {
      record.checkpoints.push_back(make_checkpoint(s, inputs, 20));
      ++next_mark;
    }
  }
  record.final_x = s.x;
  record.final_t = s.t;
  record.final_theta = s.theta;
  return record;
}

std::vector<double> moments_at_time(const RunRecord& record, double t) {
  const auto& cps = record.checkpoints;
  if (cps.empty()) throw std::out_of_range("moments_at_time: empty record");
  if (t < cps.front().t - 1e-12 || t > cps.back().t + 1e-9)
    throw std::out_of_range("moments_at_time: t outside checkpoint range");
  if (t <= cps.front().t) return cps.front().moments;
  if (t >= cps.back().t) return cps.back().moments;
  std::size_t hi = 1;
  while (cps[hi].t < t) ++hi;
  const Checkpoint& a = cps[hi - 1];
  const Checkpoint& b = cps[hi];
  const double f = (t - a.t) / (b.t - a.t);
  std::vector<double> out(a.moments.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = a.moments[i] + f * (b.moments[i] - a.moments[i]);
  return out;
}

}  // namespace abp
