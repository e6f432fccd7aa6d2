#include "abp/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "abp/parallel.hpp"
#include "abp/stats.hpp"

namespace abp {

ConvergenceReport convergence_report(const RunRecord& record,
                                     const std::vector<double>& oracle_moments,
                                     const BiasFunction& oracle_a_infinity,
                                     const ConvergenceThresholds& thresholds) {
  if (record.checkpoints.empty())
    throw std::invalid_argument("convergence_report: empty record");
  if (static_cast<int>(oracle_moments.size()) < thresholds.n_used)
    throw std::invalid_argument(
        "convergence_report: oracle moments shorter than n_used");
  if (static_cast<int>(record.checkpoints.front().moments.size()) <
      thresholds.n_used)
    throw std::invalid_argument(
        "convergence_report: record moments shorter than n_used");

  ConvergenceReport rep;
  rep.thresholds = thresholds;
  BiasFunction run_bias(record.m, record.bins, record.config.beta);
  for (const Checkpoint& c : record.checkpoints) {
    rep.times.push_back(c.t);
    rep.d_values.push_back(
        metric_d(c.moments, oracle_moments, thresholds.n_used).value);
    run_bias.values = c.bias_values;
    rep.bias_sup_errors.push_back(run_bias.sup_diff(oracle_a_infinity));
    rep.flat_histogram_dev.push_back(c.flat_dev);
  }
  rep.final_d = rep.d_values.back();
  rep.final_bias_sup = rep.bias_sup_errors.back();

  const std::size_t n = rep.times.size();
  std::size_t window_start = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * (1.0 - thresholds.tail_fraction)));
  if (window_start >= n) window_start = n - 1;
  rep.d_pass = true;
  rep.bias_pass = true;
  for (std::size_t i = window_start; i < n; ++i) {
    if (rep.d_values[i] > thresholds.d_final) rep.d_pass = false;
    if (rep.bias_sup_errors[i] > thresholds.bias_sup_final) rep.bias_pass = false;
  }
  rep.d_tail_decreasing = stats::tail_decreasing(
      rep.d_values, thresholds.trend_window, thresholds.trend_band_d);
  rep.bias_tail_decreasing = stats::tail_decreasing(
      rep.bias_sup_errors, thresholds.trend_window, thresholds.trend_band_bias);
  return rep;
}

Prop1Result prop1_check(const SimulationConfig& base_config,
                        const SimulationInputs& base_inputs,
                        const std::vector<std::pair<std::string, BiasFunction>>& biases,
                        const std::vector<std::uint64_t>& seeds,
                        const std::vector<double>& oracle_moments,
                        int n_check,
                        const std::vector<double>& slope_eval_times) {
  if (biases.size() < 2)
    throw std::invalid_argument("prop1_check: need at least two bias functions");
  if (seeds.size() < 2)
    throw std::invalid_argument("prop1_check: need at least two seeds");
  n_check = std::min(n_check, static_cast<int>(oracle_moments.size()));

  const std::size_t nb = biases.size();
  const std::size_t ns = seeds.size();

  // Checkpoints at the slope evaluation times plus the final time.
  std::vector<double> cp_times = slope_eval_times;
  std::vector<RunRecord> records(nb * ns);
  std::vector<std::string> errors(nb * ns);
  par::parallel_for(nb * ns, [&](std::size_t idx) {
    try {
      const std::size_t bi = idx / ns;
      const std::size_t si = idx % ns;
      SimulationConfig cfg = base_config;
      cfg.variant = Variant::frozen;
      cfg.seed = seeds[si];
      SimulationInputs in = base_inputs;
      in.frozen_bias = &biases[bi].second;
      records[idx] = run_simulation(cfg, in, cp_times);
    } catch (const std::exception& e) {
      errors[idx] = e.what();
    }
  });
  for (const std::string& err : errors)
    if (!err.empty()) throw std::runtime_error("prop1_check run failed: " + err);

  Prop1Result result;
  result.runs.resize(nb);
  for (std::size_t bi = 0; bi < nb; ++bi) {
    Prop1Result::PerBias& pb = result.runs[bi];
    pb.label = biases[bi].first;
    pb.mean.assign(static_cast<std::size_t>(n_check), 0.0);
    pb.se.assign(static_cast<std::size_t>(n_check), 0.0);
    for (int n = 0; n < n_check; ++n) {
      std::vector<double> vals(ns);
      for (std::size_t si = 0; si < ns; ++si)
        vals[si] = records[bi * ns + si]
                       .final_checkpoint()
                       .moments[static_cast<std::size_t>(n)];
      pb.mean[static_cast<std::size_t>(n)] = stats::mean(vals);
      pb.se[static_cast<std::size_t>(n)] = stats::standard_error(vals);
    }
    pb.max_abs_error = 0.0;
    pb.within_oracle_band = true;
    for (int n = 0; n < n_check; ++n) {
      const double err = std::abs(pb.mean[static_cast<std::size_t>(n)] -
                                  oracle_moments[static_cast<std::size_t>(n)]);
      pb.max_abs_error = std::max(pb.max_abs_error, err);
      if (err > 3.0 * pb.se[static_cast<std::size_t>(n)])
        pb.within_oracle_band = false;
    }
  }

  result.oracle_ok = true;
  for (const auto& pb : result.runs)
    if (!pb.within_oracle_band) result.oracle_ok = false;

  result.pairwise_ok = true;
  result.max_pairwise_gap = 0.0;
  for (std::size_t a = 0; a < nb; ++a)
    for (std::size_t b = a + 1; b < nb; ++b)
      for (int n = 0; n < n_check; ++n) {
        const double gap = std::abs(result.runs[a].mean[static_cast<std::size_t>(n)] -
                                    result.runs[b].mean[static_cast<std::size_t>(n)]);
        const double band =
            3.0 * std::hypot(result.runs[a].se[static_cast<std::size_t>(n)],
                             result.runs[b].se[static_cast<std::size_t>(n)]);
        result.max_pairwise_gap = std::max(result.max_pairwise_gap, gap);
        if (gap > band) result.pairwise_ok = false;
      }

  if (!slope_eval_times.empty()) {
    std::vector<double> log_t, log_err;
    for (double t : slope_eval_times) {
      std::vector<double> discrepancies;
      for (std::size_t idx = 0; idx < records.size(); ++idx) {
        const std::vector<double> mom = moments_at_time(records[idx], t);
        double worst = 0.0;
        for (int n = 0; n < n_check; ++n)
          worst = std::max(worst,
                           std::abs(mom[static_cast<std::size_t>(n)] -
                                    oracle_moments[static_cast<std::size_t>(n)]));
        discrepancies.push_back(worst);
      }
      result.slope_times.push_back(t);
      result.slope_errors.push_back(stats::mean(discrepancies));
      log_t.push_back(std::log(t));
      log_err.push_back(std::log(result.slope_errors.back()));
    }
    result.slope = stats::ls_slope(log_t, log_err);
  }
  return result;
}

ReweightResult reweight_check(const RunRecord& star_record, int phi_index,
                              double oracle_value, int batches) {
  if (star_record.config.variant != Variant::star)
    throw std::invalid_argument("reweight_check: record is not a star run");
  const auto& cps = star_record.checkpoints;
  if (cps.empty() || cps.back().reweight_sums.empty())
    throw std::invalid_argument("reweight_check: record lacks reweight sums");
  if (phi_index >= static_cast<int>(cps.back().reweight_sums.size()))
    throw std::invalid_argument("reweight_check: phi_index out of range");

  const auto cumulative = [&](const Checkpoint& c) -> std::pair<double, double> {
    const double num = phi_index < 0
                           ? c.reweight_weight
                           : c.reweight_sums[static_cast<std::size_t>(phi_index)];
    return {num, c.reweight_weight};
  };

  ReweightResult r;
  const auto [num_total, den_total] = cumulative(cps.back());
  r.estimate = num_total / den_total;
  r.oracle = oracle_value;
  r.error = std::abs(r.estimate - oracle_value);

  // Equal time windows, with cumulative sums interpolated linearly in t.
  const double t0 = cps.front().t;
  const double t1 = cps.back().t;
  batches = std::max(2, batches);
  const auto cumulative_at = [&](double t) -> std::pair<double, double> {
    if (t <= t0) return cumulative(cps.front());
    if (t >= t1) return cumulative(cps.back());
    std::size_t hi = 1;
    while (cps[hi].t < t) ++hi;
    const auto [na, da] = cumulative(cps[hi - 1]);
    const auto [nb, db] = cumulative(cps[hi]);
    const double f = (t - cps[hi - 1].t) / (cps[hi].t - cps[hi - 1].t);
    return {na + f * (nb - na), da + f * (db - da)};
  };
  std::vector<double> num_b(static_cast<std::size_t>(batches));
  std::vector<double> den_b(static_cast<std::size_t>(batches));
  auto prev = cumulative_at(t0);
  for (int b = 0; b < batches; ++b) {
    const double t = t0 + (t1 - t0) * static_cast<double>(b + 1) / batches;
    const auto cur = cumulative_at(t);
    num_b[static_cast<std::size_t>(b)] = cur.first - prev.first;
    den_b[static_cast<std::size_t>(b)] = cur.second - prev.second;
    prev = cur;
  }
  r.se = stats::ratio_batch_se(num_b, den_b);
  r.batches = batches;
  return r;
}

double apt_delta(const RunRecord& record, const std::vector<double>& oracle_moments,
                 double s, double big_s, int n_used, int sigma_points) {
  if (big_s < 0.0) throw std::invalid_argument("apt_delta: S must be >= 0");
  if (sigma_points < 1) throw std::invalid_argument("apt_delta: need sigma points");
  const double t_hi = std::exp(s + big_s);
  if (record.checkpoints.empty() ||
      t_hi > record.checkpoints.back().t + 1e-9 ||
      std::exp(s) < record.checkpoints.front().t - 1e-12)
    throw std::out_of_range("apt_delta: requested window outside the run horizon");

  const std::vector<double> base = moments_at_time(record, std::exp(s));
  double delta = 0.0;
  for (int i = 0; i < sigma_points; ++i) {
    const double sigma =
        sigma_points == 1
            ? 0.0
            : big_s * static_cast<double>(i) / static_cast<double>(sigma_points - 1);
    const std::vector<double> observed = moments_at_time(record, std::exp(s + sigma));
    const std::vector<double> flowed = gamma_flow(base, oracle_moments, sigma);
    delta = std::max(delta, metric_d(observed, flowed, n_used).value);
  }
  return delta;
}

}  // namespace abp
