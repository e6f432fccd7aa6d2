#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "abp/diagnostics.hpp"
#include "abp/dynamics.hpp"
#include "abp/stats.hpp"

using namespace abp;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Setup {
  Potential V;
  TestFunctionFamily family;
  PeriodicKernel kernel;

  explicit Setup(Potential v, double eps = 0.1, double delta = 0.01)
      : V(std::move(v)), family(2, 40), kernel(1, eps, delta) {}

  SimulationInputs inputs() const {
    SimulationInputs in;
    in.potential = &V;
    in.family = &family;
    in.kernel = &kernel;
    in.m = 1;
    in.bins = 128;
    return in;
  }
};

SimulationConfig base_config(Variant v, long long steps, std::uint64_t seed) {
  SimulationConfig cfg;
  cfg.beta = 4.0;
  cfg.dt = 1e-3;
  cfg.n_steps = steps;
  cfg.seed = seed;
  cfg.variant = v;
  return cfg;
}

bool same_trajectory(const RunRecord& a, const RunRecord& b) {
  if (a.checkpoints.size() != b.checkpoints.size()) return false;
  for (std::size_t i = 0; i < a.checkpoints.size(); ++i) {
    if (a.checkpoints[i].x != b.checkpoints[i].x) return false;
    if (a.checkpoints[i].moments != b.checkpoints[i].moments) return false;
    if (a.checkpoints[i].theta != b.checkpoints[i].theta) return false;
  }
  return a.final_x == b.final_x && a.final_theta == b.final_theta;
}

}  // namespace

TEST_CASE("zero potential with zero noise leaves the state fixed") {
  Setup s(uniform_potential(2));
  SimulationConfig cfg = base_config(Variant::unbiased, 100, 1);
  cfg.noise_scale = 0.0;
  SimulationInputs in = s.inputs();
  in.x0 = {0.3, 0.7};
  const RunRecord r = run_simulation(cfg, in, {});
  CHECK(r.final_x[0] == 0.3);
  CHECK(r.final_x[1] == 0.7);
}

TEST_CASE("noise-free gradient flow decreases the energy monotonically") {
  Setup s(separable_potential(1.0, 0.5));
  SimulationConfig cfg = base_config(Variant::unbiased, 2000, 1);
  cfg.noise_scale = 0.0;
  SimulationInputs in = s.inputs();
  in.x0 = {0.3, 0.8};
  SimulationState st = init_state(cfg, in);
  double prev = s.V.energy(st.x.data());
  for (int i = 0; i < 2000; ++i) {
    em_step_unbiased(st, s.V, cfg);
    const double e = s.V.energy(st.x.data());
    CHECK(e <= prev + 1e-15);
    prev = e;
  }
  // descends to the separable minimum at (1/2, 1/2)
  CHECK(st.x[0] == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("pure diffusion increments have variance 2 dt / beta") {
  Setup s(uniform_potential(2));
  SimulationConfig cfg = base_config(Variant::unbiased, 100000, 3);
  SimulationInputs in = s.inputs();
  SimulationState st = init_state(cfg, in);
  double prev0 = st.x[0];
  std::vector<double> sq;
  for (int i = 0; i < cfg.n_steps; ++i) {
    em_step_unbiased(st, s.V, cfg);
    const double inc = wrap_half(st.x[0] - prev0);
    sq.push_back(inc * inc);
    prev0 = st.x[0];
  }
  const double var = stats::mean(sq);
  const double expected = 2.0 * cfg.dt / cfg.beta;
  const double se = expected * std::sqrt(2.0 / static_cast<double>(sq.size()));
  CHECK(std::abs(var - expected) < 3.0 * se);
}

TEST_CASE("exact reduction: star with a zero profile reproduces unbiased") {
  Setup s(double_well_potential());
  SimulationInputs in = s.inputs();
  FreeEnergyProfile zero_profile;
  zero_profile.a_star = BiasFunction(1, in.bins, 4.0);
  in.star_profile = &zero_profile;
  const RunRecord star =
      run_simulation(base_config(Variant::star, 20000, 17), in, {5.0, 15.0});
  const RunRecord plain =
      run_simulation(base_config(Variant::unbiased, 20000, 17), in, {5.0, 15.0});
  CHECK(same_trajectory(star, plain));
}

TEST_CASE("exact reduction: frozen zero bias reproduces unbiased") {
  Setup s(double_well_potential());
  SimulationInputs in = s.inputs();
  const BiasFunction zero(1, in.bins, 4.0);
  in.frozen_bias = &zero;
  const RunRecord frozen =
      run_simulation(base_config(Variant::frozen, 20000, 23), in, {10.0});
  const RunRecord plain =
      run_simulation(base_config(Variant::unbiased, 20000, 23), in, {10.0});
  CHECK(same_trajectory(frozen, plain));
}

TEST_CASE("exact reduction: constant kernel makes abp and time-changed unbiased") {
  Setup s(double_well_potential(), 0.1, 1.0);  // floor_delta = 1: K constant
  SimulationInputs in = s.inputs();
  const RunRecord plain =
      run_simulation(base_config(Variant::unbiased, 20000, 29), in, {10.0});
  const RunRecord adaptive =
      run_simulation(base_config(Variant::abp, 20000, 29), in, {10.0});
  CHECK(same_trajectory(adaptive, plain));
  const RunRecord tc = run_simulation(
      base_config(Variant::abp_time_changed, 20000, 29), in, {10.0});
  CHECK(same_trajectory(tc, plain));
  // the adaptive bias stays identically zero
  for (double v : adaptive.final_checkpoint().bias_values) CHECK(v == 0.0);
}

TEST_CASE("single time-changed steps with zero bias match unbiased steps") {
  Setup s(double_well_potential());
  SimulationConfig tc_cfg = base_config(Variant::abp_time_changed, 50, 31);
  tc_cfg.refresh_every = 1000;  // never refreshed within the horizon
  SimulationConfig un_cfg = base_config(Variant::unbiased, 50, 31);
  SimulationInputs in = s.inputs();
  SimulationState a = init_state(tc_cfg, in);
  SimulationState b = init_state(un_cfg, in);
  for (int i = 0; i < 50; ++i) {
    em_step_time_changed(a, s.V, tc_cfg);
    em_step_unbiased(b, s.V, un_cfg);
  }
  CHECK(a.x == b.x);
}

TEST_CASE("same seed gives bit-identical records") {
  Setup s(double_well_potential());
  SimulationInputs in = s.inputs();
  const RunRecord r1 =
      run_simulation(base_config(Variant::abp, 30000, 101), in, {10.0, 20.0});
  const RunRecord r2 =
      run_simulation(base_config(Variant::abp, 30000, 101), in, {10.0, 20.0});
  CHECK(same_trajectory(r1, r2));
  CHECK(r1.final_checkpoint().bias_values == r2.final_checkpoint().bias_values);
}

TEST_CASE("checkpoint cadence does not change the trajectory") {
  Setup s(double_well_potential());
  SimulationInputs in = s.inputs();
  const RunRecord sparse =
      run_simulation(base_config(Variant::abp, 20000, 41), in, {});
  const RunRecord dense = run_simulation(base_config(Variant::abp, 20000, 41), in,
                                         {1.0, 5.0, 10.0, 15.0});
  CHECK(sparse.final_x == dense.final_x);
  CHECK(sparse.final_theta == dense.final_theta);
  CHECK(sparse.final_checkpoint().moments == dense.final_checkpoint().moments);
}

TEST_CASE("empty runs contain only the initial checkpoint") {
  Setup s(uniform_potential(2));
  const RunRecord r =
      run_simulation(base_config(Variant::unbiased, 0, 1), s.inputs(), {});
  CHECK(r.checkpoints.size() == 1);
  CHECK(r.checkpoints[0].t == 0.0);
  CHECK(r.final_t == 0.0);
}

TEST_CASE("theta is monotone and its rate sits within the stencil bounds") {
  Setup s(double_well_potential());
  SimulationInputs in = s.inputs();
  const RunRecord r = run_simulation(base_config(Variant::abp, 50000, 51), in,
                                     {10.0, 20.0, 30.0, 40.0});
  const KernelBounds b = KernelStencil(s.kernel, in.bins).bounds();
  double prev_theta = -1.0;
  for (const Checkpoint& c : r.checkpoints) {
    CHECK(c.theta >= prev_theta);
    prev_theta = c.theta;
    if (c.t > 0.0) {
      CHECK(c.theta / c.t >= b.min_k - 1e-12);
      CHECK(c.theta / c.t <= b.max_k0 + 1e-12);
    }
  }
}

TEST_CASE("the adaptive bias stays admissible at every checkpoint") {
  Setup s(double_well_potential());
  SimulationInputs in = s.inputs();
  for (Variant v : {Variant::abp, Variant::abp_time_changed}) {
    const RunRecord r = run_simulation(base_config(v, 50000, 61), in,
                                       {5.0, 10.0, 20.0, 30.0, 40.0});
    const KernelBounds b = KernelStencil(s.kernel, in.bins).bounds();
    BiasFunction bias(1, in.bins, 4.0);
    for (const Checkpoint& c : r.checkpoints) {
      bias.values = c.bias_values;
      const AdmissibilityReport rep = in_admissible_set(bias, b);
      CAPTURE(rep.worst_bound);
      CHECK(rep.admissible);
    }
  }
}

TEST_CASE("time-changed steps reject effective steps beyond the cap") {
  Setup s(double_well_potential());
  SimulationInputs in = s.inputs();
  BiasFunction big(1, in.bins, 4.0);
  for (double& v : big.values) v = std::log(200.0) / 4.0;  // lambda = 200
  in.frozen_bias = &big;
  SimulationConfig cfg = base_config(Variant::frozen, 10, 1);
  CHECK_THROWS_AS(run_simulation(cfg, in, {}), std::runtime_error);
}

TEST_CASE("config guards") {
  SimulationConfig cfg = base_config(Variant::unbiased, 10, 1);
  cfg.dt = 0.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.dt = 1e-3;
  cfg.refresh_every = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  Setup s(double_well_potential());
  SimulationInputs in = s.inputs();
  CHECK_THROWS_AS(run_simulation(base_config(Variant::star, 10, 1), in, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_simulation(base_config(Variant::frozen, 10, 1), in, {}),
                  std::invalid_argument);
  in.kernel = nullptr;
  CHECK_THROWS_AS(run_simulation(base_config(Variant::abp, 10, 1), in, {}),
                  std::invalid_argument);
  in = s.inputs();
  in.x0 = {0.5};
  CHECK_THROWS_AS(run_simulation(base_config(Variant::unbiased, 10, 1), in, {}),
                  std::invalid_argument);
  in = s.inputs();
  in.m = 2;
  CHECK_THROWS_AS(run_simulation(base_config(Variant::unbiased, 10, 1), in, {}),
                  std::invalid_argument);
}

TEST_CASE("star drift cancels the slow part of a separable potential") {
  const Potential V = separable_potential(1.0, 0.5);
  const FreeEnergyProfile p = free_energy(V, 4.0, ReactionCoordinate(1), {256, 2}, 256);
  for (int j = 0; j < 256; j += 7) {
    const double z = static_cast<double>(j) / 256;
    double g[1];
    p.a_star.gradient_at(&z, g);
    const double v_prime = -kTwoPi * std::sin(kTwoPi * z);
    CHECK(std::abs(v_prime - g[0]) < 1e-3);
  }
}

TEST_CASE("star run: reweight ratio of the constant function is exactly one") {
  Setup s(double_well_potential());
  const FreeEnergyProfile p =
      free_energy(s.V, 4.0, ReactionCoordinate(1), {256, 2}, 256);
  SimulationInputs in = s.inputs();
  in.star_profile = &p;
  const RunRecord r =
      run_simulation(base_config(Variant::star, 20000, 71), in, {5.0, 10.0, 15.0});
  const ReweightResult rw = reweight_check(r, -1, 1.0);
  CHECK(rw.estimate == 1.0);
  CHECK(rw.error == 0.0);
  CHECK(rw.se == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("frozen dynamics at constant bias is a pure time rescale in law") {
  // Averages over [0, S] of the sped-up process match averages over
  // [0, S exp(beta c)] of the unbiased one.
  const Potential V = separable_potential(1.0, 0.5);
  const TestFunctionFamily family(2, 40);
  const PeriodicKernel kernel(1, 0.1, 0.01);
  const double beta = 2.0, c = 0.2;
  const double lambda = std::exp(beta * c);
  const int bins = 128;
  const long long steps_tc = 20000;
  const long long steps_un = std::llround(steps_tc * lambda);
  const int n_seeds = 32;
  const int n_mom = 4;

  std::vector<std::vector<double>> tc_vals(n_mom), un_vals(n_mom);
  for (int seed = 0; seed < n_seeds; ++seed) {
    SimulationInputs in;
    in.potential = &V;
    in.family = &family;
    in.kernel = &kernel;
    in.m = 1;
    in.bins = bins;
    BiasFunction constant(1, bins, beta);
    for (double& v : constant.values) v = c;
    in.frozen_bias = &constant;

    SimulationConfig cfg = base_config(Variant::frozen, steps_tc, 9000 + seed);
    cfg.beta = beta;
    SimulationState st = init_state(cfg, in);
    for (long long i = 0; i < steps_tc; ++i) em_step_frozen(st, V, cfg);
    for (int n = 0; n < n_mom; ++n)
      tc_vals[static_cast<std::size_t>(n)].push_back(
          st.measure.moment_sums()[static_cast<std::size_t>(n)] /
          st.measure.total_weight());

    SimulationConfig ucfg = base_config(Variant::unbiased, steps_un, 5000 + seed);
    ucfg.beta = beta;
    SimulationState su = init_state(ucfg, in);
    for (long long i = 0; i < steps_un; ++i) em_step_unbiased(su, V, ucfg);
    for (int n = 0; n < n_mom; ++n)
      un_vals[static_cast<std::size_t>(n)].push_back(
          su.measure.moment_sums()[static_cast<std::size_t>(n)] /
          su.measure.total_weight());
  }
  for (int n = 0; n < n_mom; ++n) {
    const double gap = std::abs(stats::mean(tc_vals[static_cast<std::size_t>(n)]) -
                                stats::mean(un_vals[static_cast<std::size_t>(n)]));
    const double band =
        3.5 * std::hypot(stats::standard_error(tc_vals[static_cast<std::size_t>(n)]),
                         stats::standard_error(un_vals[static_cast<std::size_t>(n)]));
    CAPTURE(n);
    CHECK(gap < band);
  }
}

TEST_CASE("pure diffusion occupation moments agree with the uniform measure") {
  const Potential V = uniform_potential(2);
  const TestFunctionFamily family(2, 40);
  const PeriodicKernel kernel(1, 0.1, 0.01);
  const int n_seeds = 64;
  std::vector<std::vector<double>> vals(10);
  for (int seed = 0; seed < n_seeds; ++seed) {
    SimulationConfig cfg = base_config(Variant::unbiased, 20000, 400 + seed);
    SimulationInputs in;
    in.potential = &V;
    in.family = &family;
    in.kernel = &kernel;
    in.m = 1;
    in.bins = 128;
    const RunRecord r = run_simulation(cfg, in, {});
    for (int n = 0; n < 10; ++n)
      vals[static_cast<std::size_t>(n)].push_back(
          r.final_checkpoint().moments[static_cast<std::size_t>(n)]);
  }
  for (int n = 0; n < 10; ++n) {
    const double m = stats::mean(vals[static_cast<std::size_t>(n)]);
    const double se = stats::standard_error(vals[static_cast<std::size_t>(n)]);
    CAPTURE(n);
    CHECK(std::abs(m) < 3.5 * se);
  }
}
