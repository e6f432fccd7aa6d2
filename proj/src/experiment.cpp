#include "abp/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "abp/diagnostics.hpp"
#include "abp/parallel.hpp"

namespace abp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open output file '" + path.string() + "'");
  return out;
}

void write_profile_csv(const fs::path& path, const BiasFunction& a_star,
                       const BiasFunction& a_inf) {
  std::ofstream out = open_out(path);
  const int m = a_star.m;
  for (int i = 0; i < m; ++i) out << "z" << (i + 1) << ",";
  out << "A_star,A_infinity\n";
  std::vector<int> j(static_cast<std::size_t>(m), 0);
  for (std::size_t idx = 0; idx < a_star.values.size(); ++idx) {
    std::size_t rem = idx;
    for (int i = m - 1; i >= 0; --i) {
      j[static_cast<std::size_t>(i)] =
          static_cast<int>(rem % static_cast<std::size_t>(a_star.grid_size));
      rem /= static_cast<std::size_t>(a_star.grid_size);
    }
    for (int i = 0; i < m; ++i)
      out << fmt(a_star.node_coord(j[static_cast<std::size_t>(i)])) << ",";
    out << fmt(a_star.values[idx]) << "," << fmt(a_inf.values[idx]) << "\n";
  }
}

void write_moments_csv(const fs::path& path, const TestFunctionFamily& family,
                       const std::vector<double>& mu_moments) {
  std::ofstream out = open_out(path);
  out << "n,kind";
  for (int i = 0; i < family.dim(); ++i) out << ",k" << (i + 1);
  out << ",mu_beta_moment\n";
  for (int n = 0; n < family.size(); ++n) {
    out << n << "," << (family.is_sin(n) ? "sin" : "cos");
    for (int c : family.mode(n)) out << "," << c;
    out << "," << fmt(mu_moments[static_cast<std::size_t>(n)]) << "\n";
  }
}

void write_checkpoints_csv(const fs::path& path, const RunRecord& record) {
  std::ofstream out = open_out(path);
  out << "step,t,theta,flat_dev,d_to_target";
  const std::size_t n_moments = record.checkpoints.front().moments.size();
  for (std::size_t i = 0; i < n_moments; ++i) out << ",m" << i;
  out << "\n";
  for (const Checkpoint& c : record.checkpoints) {
    out << c.step << "," << fmt(c.t) << "," << fmt(c.theta) << ","
        << fmt(c.flat_dev) << "," << fmt(c.d_to_target);
    for (double m : c.moments) out << "," << fmt(m);
    out << "\n";
  }
}

void write_bias_csv(const fs::path& path, const RunRecord& record) {
  std::ofstream out = open_out(path);
  const Checkpoint& c = record.checkpoints.back();
  const int m = record.m;
  const int g = record.bins;
  for (int i = 0; i < m; ++i) out << "z" << (i + 1) << ",";
  out << "A\n";
  std::vector<int> j(static_cast<std::size_t>(m), 0);
  for (std::size_t idx = 0; idx < c.bias_values.size(); ++idx) {
    std::size_t rem = idx;
    for (int i = m - 1; i >= 0; --i) {
      j[static_cast<std::size_t>(i)] = static_cast<int>(rem % static_cast<std::size_t>(g));
      rem /= static_cast<std::size_t>(g);
    }
    for (int i = 0; i < m; ++i)
      out << fmt(static_cast<double>(j[static_cast<std::size_t>(i)]) / g) << ",";
    out << fmt(c.bias_values[idx]) << "\n";
  }
}

void write_marginal_csv(const fs::path& path, const RunRecord& record) {
  std::ofstream out = open_out(path);
  const Checkpoint& c = record.checkpoints.back();
  const int m = record.m;
  const int g = record.bins;
  for (int i = 0; i < m; ++i) out << "z" << (i + 1) << ",";
  out << "mass\n";
  std::vector<int> j(static_cast<std::size_t>(m), 0);
  for (std::size_t idx = 0; idx < c.marginal.size(); ++idx) {
    std::size_t rem = idx;
    for (int i = m - 1; i >= 0; --i) {
      j[static_cast<std::size_t>(i)] = static_cast<int>(rem % static_cast<std::size_t>(g));
      rem /= static_cast<std::size_t>(g);
    }
    for (int i = 0; i < m; ++i)
      out << fmt((j[static_cast<std::size_t>(i)] + 0.5) / g) << ",";
    out << fmt(c.marginal[idx]) << "\n";
  }
}

std::string run_stem(Variant v, std::uint64_t seed) {
  return std::string(variant_name(v)) + "_seed" + std::to_string(seed);
}

}  // namespace

void write_oracle_outputs(const ExperimentConfig& cfg) {
  cfg.validate();
  par::set_threads(cfg.threads);
  const Potential V = cfg.make_potential();
  const TestFunctionFamily family(cfg.d, cfg.family_size);
  const PeriodicKernel kernel(cfg.m, cfg.epsilon, cfg.floor_delta);
  const ReactionCoordinate xi(cfg.m);
  const QuadratureGrid grid{cfg.oracle_resolution, cfg.d};

  const FreeEnergyProfile profile = free_energy(V, cfg.beta, xi, grid, cfg.oracle_resolution);
  const BiasFunction a_inf = a_infinity(profile, kernel);
  const std::vector<double> moments = mu_beta_moments(V, cfg.beta, family, grid);

  fs::create_directories(cfg.output_dir);
  write_profile_csv(fs::path(cfg.output_dir) / "oracle_profile.csv",
                    profile.a_star, a_inf);
  write_moments_csv(fs::path(cfg.output_dir) / "oracle_moments.csv", family,
                    moments);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  par::set_threads(cfg.threads);

  const Potential V = cfg.make_potential();
  const TestFunctionFamily family(cfg.d, cfg.family_size);
  const PeriodicKernel kernel(cfg.m, cfg.epsilon, cfg.floor_delta);
  const ReactionCoordinate xi(cfg.m);
  const QuadratureGrid grid{cfg.oracle_resolution, cfg.d};

  const double z_beta = partition_function(V, cfg.beta, grid);
  const FreeEnergyProfile profile =
      free_energy(V, cfg.beta, xi, grid, cfg.oracle_resolution);
  const BiasFunction a_inf = a_infinity(profile, kernel);
  const std::vector<double> oracle_moments =
      mu_beta_moments(V, cfg.beta, family, grid);

  const fs::path outdir(cfg.output_dir);
  fs::create_directories(outdir / "runs");
  write_profile_csv(outdir / "oracle_profile.csv", profile.a_star, a_inf);
  write_moments_csv(outdir / "oracle_moments.csv", family, oracle_moments);

  // Frozen bias on the run grid.
  BiasFunction frozen(cfg.m, cfg.histogram_bins, cfg.beta);
  if (cfg.frozen_bias == "a-infinity") {
    frozen = a_inf.resampled(cfg.histogram_bins);
    frozen.beta = cfg.beta;
  }

  const std::vector<double> cp_times = cfg.checkpoint_times();
  const std::vector<double> start = cfg.start_point();

  struct Task {
    Variant variant;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (Variant v : cfg.variants)
    for (std::uint64_t s : cfg.seeds) tasks.push_back({v, s});

  std::vector<RunRecord> records(tasks.size());
  std::vector<std::string> run_errors(tasks.size());
  par::parallel_for(tasks.size(), [&](std::size_t i) {
    try {
    SimulationConfig sim;
    sim.beta = cfg.beta;
    sim.dt = cfg.dt;
    sim.n_steps = cfg.n_steps();
    sim.seed = tasks[i].seed;
    sim.refresh_every = cfg.refresh_every;
    sim.variant = tasks[i].variant;
    sim.noise_scale = cfg.noise_scale;
    sim.lambda_dt_cap = cfg.lambda_dt_cap;

    SimulationInputs in;
    in.potential = &V;
    in.family = &family;
    in.kernel = &kernel;
    in.m = cfg.m;
    in.bins = cfg.histogram_bins;
    in.mu0 = cfg.mu0 == "point" ? InitialMeasure::point : InitialMeasure::uniform;
    in.prior_weight = cfg.prior_weight;
    in.x0 = start;
    in.star_profile = &profile;
    in.frozen_bias = &frozen;
    in.target_moments = &oracle_moments;
    records[i] = run_simulation(sim, in, cp_times);
    } catch (const std::exception& e) {
      run_errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (!run_errors[i].empty())
      throw std::runtime_error("run " + run_stem(tasks[i].variant, tasks[i].seed) +
                               " failed: " + run_errors[i]);

  const KernelStencil stencil(kernel, cfg.histogram_bins);
  const KernelBounds stencil_bounds = stencil.bounds();

  ExperimentResult result;
  result.output_dir = cfg.output_dir;

  json report;
  report["oracle"] = {{"Z", z_beta},
                      {"potential", V.description()},
                      {"beta", cfg.beta},
                      {"epsilon", cfg.epsilon},
                      {"floor_delta", cfg.floor_delta}};
  report["runs"] = json::array();

  ConvergenceThresholds th;
  th.d_final = std::isnan(cfg.check_d_final) ? 0.05 : cfg.check_d_final;
  th.bias_sup_final =
      std::isnan(cfg.check_bias_sup) ? 0.1 / cfg.beta : cfg.check_bias_sup;

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const RunRecord& rec = records[i];
    const std::string stem = run_stem(tasks[i].variant, tasks[i].seed);
    write_checkpoints_csv(outdir / "runs" / (stem + "_checkpoints.csv"), rec);
    write_bias_csv(outdir / "runs" / (stem + "_bias.csv"), rec);
    write_marginal_csv(outdir / "runs" / (stem + "_marginal.csv"), rec);

    const ConvergenceReport conv =
        convergence_report(rec, oracle_moments, a_inf, th);

    json entry;
    entry["variant"] = variant_name(tasks[i].variant);
    entry["seed"] = tasks[i].seed;
    entry["final_t"] = rec.final_t;
    entry["final_theta"] = rec.final_theta;
    entry["final_d"] = conv.final_d;
    entry["final_bias_sup_error"] = conv.final_bias_sup;
    entry["final_flat_dev"] = conv.flat_histogram_dev.back();
    entry["d_tail_decreasing"] = conv.d_tail_decreasing;
    entry["bias_tail_decreasing"] = conv.bias_tail_decreasing;

    // Admissibility along the run for adaptive variants.
    if (tasks[i].variant == Variant::abp ||
        tasks[i].variant == Variant::abp_time_changed) {
      bool all_ok = true;
      double worst = 0.0;
      BiasFunction b(rec.m, rec.bins, cfg.beta);
      for (const Checkpoint& c : rec.checkpoints) {
        b.values = c.bias_values;
        const AdmissibilityReport ar = in_admissible_set(b, stencil_bounds);
        all_ok = all_ok && ar.admissible;
        worst = std::max(worst, ar.max_violation);
      }
      entry["admissible_at_all_checkpoints"] = all_ok;
      entry["worst_admissibility_violation"] = worst;
      const double theta_rate = rec.final_theta / rec.final_t;
      entry["theta_rate"] = theta_rate;
      entry["theta_rate_within_bounds"] =
          theta_rate >= stencil_bounds.min_k - 1e-12 &&
          theta_rate <= stencil_bounds.max_k0 + 1e-12;
    }

    if (tasks[i].variant == Variant::star) {
      std::vector<int> k(static_cast<std::size_t>(cfg.d), 0);
      k[0] = 1;
      const int phi = family.index_of(k, false);
      if (phi >= 0) {
        const double oracle_phi = oracle_moments[static_cast<std::size_t>(phi)];
        const ReweightResult rw = reweight_check(rec, phi, oracle_phi);
        entry["reweight_estimate"] = rw.estimate;
        entry["reweight_oracle"] = rw.oracle;
        entry["reweight_error"] = rw.error;
        entry["reweight_se"] = rw.se;
      }
    }

    if (tasks[i].variant == Variant::abp_time_changed) {
      json apt = json::array();
      for (double s : {2.0, 3.0, 4.0, 5.0}) {
        if (std::exp(s + 1.0) <= rec.final_t) {
          apt.push_back({{"s", s},
                         {"delta", apt_delta(rec, oracle_moments, s, 1.0)}});
        }
      }
      entry["apt_delta"] = apt;
    }

    // Configured pass thresholds.
    const bool adaptive = tasks[i].variant == Variant::abp ||
                          tasks[i].variant == Variant::abp_time_changed;
    if (!std::isnan(cfg.check_d_final) && adaptive) {
      result.checks.push_back({"final_d", variant_name(tasks[i].variant),
                               tasks[i].seed, conv.final_d, cfg.check_d_final,
                               conv.final_d <= cfg.check_d_final});
    }
    if (!std::isnan(cfg.check_bias_sup) && adaptive) {
      result.checks.push_back({"final_bias_sup", variant_name(tasks[i].variant),
                               tasks[i].seed, conv.final_bias_sup,
                               cfg.check_bias_sup,
                               conv.final_bias_sup <= cfg.check_bias_sup});
    }
    if (!std::isnan(cfg.check_flat_dev) && tasks[i].variant == Variant::star) {
      const double dev = conv.flat_histogram_dev.back();
      result.checks.push_back({"final_flat_dev", variant_name(tasks[i].variant),
                               tasks[i].seed, dev, cfg.check_flat_dev,
                               dev <= cfg.check_flat_dev});
    }
    report["runs"].push_back(entry);
  }

  result.checks_enabled = !result.checks.empty();
  json checks = json::array();
  for (const CheckOutcome& c : result.checks) {
    result.all_passed = result.all_passed && c.pass;
    checks.push_back({{"name", c.name},
                      {"variant", c.variant},
                      {"seed", c.seed},
                      {"value", c.value},
                      {"threshold", c.threshold},
                      {"pass", c.pass}});
  }
  report["checks"] = checks;
  report["all_checks_passed"] = result.all_passed;

  {
    std::ofstream out = open_out(outdir / "report.json");
    out << report.dump(2) << "\n";
  }
  {
    std::ofstream out = open_out(outdir / "effective_config.cfg");
    out << cfg.canonical_text();
  }
  {
    json manifest;
    manifest["config_text"] = cfg.canonical_text();
    manifest["preset"] = cfg.preset;
    manifest["seeds"] = cfg.seeds;
    json variant_names = json::array();
    for (Variant v : cfg.variants) variant_names.push_back(variant_name(v));
    manifest["variants"] = variant_names;
    json files = json::array();
    files.push_back("oracle_profile.csv");
    files.push_back("oracle_moments.csv");
    files.push_back("report.json");
    for (const Task& t : tasks) {
      const std::string stem = run_stem(t.variant, t.seed);
      files.push_back("runs/" + stem + "_checkpoints.csv");
      files.push_back("runs/" + stem + "_bias.csv");
      files.push_back("runs/" + stem + "_marginal.csv");
    }
    manifest["files"] = files;
    manifest["generated_at_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    std::ofstream out = open_out(outdir / "manifest.json");
    out << manifest.dump(2) << "\n";
  }
  return result;
}

}  // namespace abp
