#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "abp/measure.hpp"
#include "abp/oracle.hpp"
#include "abp/rng.hpp"

using namespace abp;

namespace {

TestFunctionFamily fam2() { return TestFunctionFamily(2, 12); }

OccupationMeasure uniform_measure(int bins = 128) {
  return OccupationMeasure(fam2(), 1, bins, InitialMeasure::uniform);
}

}  // namespace

TEST_CASE("uniform initial measure: zero moments, flat unit-mass histogram") {
  const OccupationMeasure mu = uniform_measure();
  for (double m : mu.prior_moments()) CHECK(m == 0.0);
  for (double m : mu.normalized_moments()) CHECK(m == 0.0);
  const auto marg = mu.normalized_marginal();
  for (double p : marg) CHECK(p == doctest::Approx(1.0 / 128).epsilon(1e-14));
  CHECK(mu.total_weight() == 0.0);
  CHECK(mu.bin_mass_total() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("point initial measure evaluates the family at the location") {
  const TorusPoint x0 = wrap({0.3, 0.8});
  const TestFunctionFamily fam = fam2();
  const OccupationMeasure mu(fam, 1, 128, InitialMeasure::point, &x0);
  for (int n = 0; n < fam.size(); ++n)
    CHECK(mu.prior_moments()[static_cast<std::size_t>(n)] ==
          doctest::Approx(fam.evaluate_one(n, x0.coords.data())).epsilon(1e-12));
  CHECK(mu.bins()[mu.bin_of(x0.coords.data())] == 1.0);
}

TEST_CASE("one accumulation from the uniform prior") {
  OccupationMeasure mu = uniform_measure();
  const TorusPoint x = wrap({0.37, 0.61});
  const double w = 0.8, dt = 0.01;
  mu.accumulate(x, w, dt);
  const TestFunctionFamily fam = fam2();
  const auto mom = mu.normalized_moments();
  for (int n = 0; n < fam.size(); ++n) {
    const double expected =
        w * dt * fam.evaluate_one(n, x.coords.data()) / (1.0 + w * dt);
    CHECK(mom[static_cast<std::size_t>(n)] == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("accumulate validates weight and dt") {
  OccupationMeasure mu = uniform_measure();
  const TorusPoint x = wrap({0.5, 0.5});
  CHECK_THROWS_AS(mu.accumulate(x, 0.0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(mu.accumulate(x, -1.0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(mu.accumulate(x, 1.0, 0.0), std::invalid_argument);
  mu.accumulate(x, 0.01 * 0.001, 0.001);  // a floor-sized weight is fine
}

TEST_CASE("repeated accumulation at a fixed point drives moments to f(x)") {
  OccupationMeasure mu = uniform_measure();
  const TorusPoint x = wrap({0.2, 0.9});
  const double dt = 0.05;
  const int steps = 20000;
  for (int i = 0; i < steps; ++i) mu.accumulate(x, 1.0, dt);
  const TestFunctionFamily fam = fam2();
  const auto mom = mu.normalized_moments();
  const double total = steps * dt;
  for (int n = 0; n < fam.size(); ++n) {
    const double fx = fam.evaluate_one(n, x.coords.data());
    // closed form of the geometric accumulation
    CHECK(mom[static_cast<std::size_t>(n)] ==
          doctest::Approx(fx * total / (1.0 + total)).epsilon(1e-10));
    CHECK(std::abs(mom[static_cast<std::size_t>(n)] - fx) < 2.0 / total + 1e-12);
  }
}

TEST_CASE("histogram mass equals prior plus accumulated weight after many updates") {
  OccupationMeasure mu = uniform_measure(256);
  GaussianRng rng(51);
  for (int i = 0; i < 1000000; ++i) {
    const TorusPoint x = wrap({rng.uniform01(), rng.uniform01()});
    mu.accumulate(x, 0.5 + rng.uniform01(), 1e-3);
  }
  const double lhs = mu.bin_mass_total();
  const double rhs = mu.prior_weight() + mu.total_weight();
  CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, rhs));
}

TEST_CASE("stencil rows sum to the bin count") {
  for (const int g : {64, 128, 256}) {
    const PeriodicKernel k(1, 0.1, 0.01);
    const KernelStencil st(k, g);
    double acc = 0.0;
    for (double w : st.weights()) acc += w;
    CHECK(acc / g == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(st.normalization() == doctest::Approx(1.0).epsilon(5e-3));
  }
}

TEST_CASE("bias of the uniform histogram vanishes independent of the grid") {
  for (const int g : {64, 128, 256}) {
    CAPTURE(g);
    const PeriodicKernel k(1, 0.1, 0.01);
    const KernelStencil st(k, g);
    const OccupationMeasure mu(fam2(), 1, g, InitialMeasure::uniform);
    const BiasFunction bias = bias_from_measure(mu, st, 4.0);
    for (double v : bias.values) CHECK(std::abs(v) < 1e-10);
  }
}

TEST_CASE("bias of a single-bin histogram is a stencil slice") {
  const int g = 256;
  const PeriodicKernel k(1, 0.1, 0.01);
  const KernelStencil st(k, g);
  const TorusPoint x0 = wrap({0.5, 0.1});
  const OccupationMeasure mu(fam2(), 1, g, InitialMeasure::point, &x0);
  const BiasFunction bias = bias_from_measure(mu, st, 4.0);
  const int bin = static_cast<int>(mu.bin_of(x0.coords.data()));
  for (int j = 0; j < g; j += 17) {
    const double e = std::exp(-4.0 * bias.values[static_cast<std::size_t>(j)]);
    const int node[1] = {j};
    const int b[1] = {bin};
    CHECK(e == doctest::Approx(st.value(st.offset_index(node, b))).epsilon(1e-13));
    // and the stencil itself tracks the continuum kernel up to the grid
    // normalization constant
    const double z = bias.node_coord(j);
    const double zeta = mu.bin_center(bin);
    CHECK(e == doctest::Approx(k(&z, &zeta)).epsilon(1e-4));
  }
}

TEST_CASE("bias_from_measure matches the oracle smoothing on an exact histogram") {
  const Potential V = double_well_potential();
  const double beta = 4.0;
  const int g = 256;
  const FreeEnergyProfile p = free_energy(V, beta, ReactionCoordinate(1), {512, 2}, 512);
  const PeriodicKernel k(1, 0.1, 0.01);

  // histogram holding the exact bin masses of exp(-beta A_star)
  OccupationMeasure mu(fam2(), 1, g, InitialMeasure::none);
  const std::vector<double> mass = star_marginal_bins(p, g);
  std::vector<double> zero_vals(static_cast<std::size_t>(fam2().size()), 0.0);
  for (int b = 0; b < g; ++b)
    mu.add_weighted(zero_vals.data(), static_cast<std::size_t>(b),
                    mass[static_cast<std::size_t>(b)]);

  const BiasFunction bias = bias_from_measure(mu, KernelStencil(k, g), beta);
  const BiasFunction ainf = a_infinity(p, k);
  CHECK(bias.sup_diff(ainf) < 2e-3);
}

TEST_CASE("estimator tracks the full convolution") {
  const int g = 128;
  const PeriodicKernel k(1, 0.15, 0.02);
  const KernelStencil st(k, g);
  OccupationMeasure mu(fam2(), 1, g, InitialMeasure::uniform);
  BiasEstimator est(st);
  est.reset_from(mu);

  GaussianRng rng(61);
  std::vector<double> zero_vals(static_cast<std::size_t>(fam2().size()), 0.0);
  for (int i = 0; i < 5000; ++i) {
    const double z[1] = {rng.uniform01() * rng.uniform01()};
    const std::size_t bin = mu.bin_of(z);
    const double mass = 1e-3 * (0.5 + rng.uniform01());
    mu.add_weighted(zero_vals.data(), bin, mass);
    est.deposit(bin, mass);
  }
  BiasFunction incremental(1, g, 4.0);
  est.write_bias(incremental);
  const BiasFunction reference = bias_from_measure(mu, st, 4.0);
  for (std::size_t j = 0; j < incremental.values.size(); ++j)
    CHECK(incremental.values[j] == doctest::Approx(reference.values[j]).epsilon(1e-11));
}

TEST_CASE("admissibility: convex combinations of stencil slices pass") {
  const int g = 128;
  const PeriodicKernel k(1, 0.1, 0.01);
  const KernelStencil st(k, g);
  const KernelBounds b = st.bounds();
  GaussianRng rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    OccupationMeasure mu(fam2(), 1, g, InitialMeasure::uniform);
    std::vector<double> zero_vals(static_cast<std::size_t>(fam2().size()), 0.0);
    for (int i = 0; i < 300; ++i) {
      const double z[1] = {rng.uniform01()};
      mu.add_weighted(zero_vals.data(), mu.bin_of(z), rng.uniform01() + 1e-3);
    }
    const BiasFunction bias = bias_from_measure(mu, st, 4.0);
    const AdmissibilityReport rep = in_admissible_set(bias, b);
    CAPTURE(rep.worst_bound);
    CAPTURE(rep.max_violation);
    CHECK(rep.admissible);
  }
}

TEST_CASE("admissibility: constructed violations are reported") {
  const PeriodicKernel k(1, 0.1, 0.01);
  const KernelStencil st(k, 128);
  const KernelBounds b = st.bounds();
  BiasFunction bias(1, 128, 4.0);
  for (double& v : bias.values) v = -std::log(2.0 * b.max_k0) / 4.0;
  const AdmissibilityReport rep = in_admissible_set(bias, b);
  CHECK_FALSE(rep.admissible);
  CHECK(rep.worst_bound == "M0");
  CHECK(rep.max_violation == doctest::Approx(b.max_k0).epsilon(1e-12));
}

TEST_CASE("admissibility: the oracle limit bias passes against its own stencil") {
  const Potential V = double_well_potential();
  const FreeEnergyProfile p = free_energy(V, 4.0, ReactionCoordinate(1), {256, 2}, 256);
  const PeriodicKernel k(1, 0.1, 0.01);
  const BiasFunction ainf = a_infinity(p, k);
  const KernelStencil st(k, 256, 0.0);  // the quadrature stencil
  CHECK(in_admissible_set(ainf, st.bounds()).admissible);
}

TEST_CASE("metric_d basics") {
  const std::vector<double> a = {0.5, -0.2, 0.1, 0.9};
  const std::vector<double> b = {0.1, 0.3, 0.1, -0.4};
  CHECK(metric_d(a, a, 4).value == 0.0);
  const MetricResult r = metric_d(a, b, 4);
  const double expected = 0.5 * 0.4 + 0.25 * 0.5 + 0.125 * 0.0 + 0.0625 * 1.0;
  CHECK(r.value == doctest::Approx(expected).epsilon(1e-14));
  CHECK(r.truncation_bound == 0.0625);
  CHECK(r.value <= 1.0);
  CHECK_THROWS_AS(metric_d(a, b, 5), std::invalid_argument);
}

TEST_CASE("metric_d between point masses by direct summation") {
  const TestFunctionFamily fam = fam2();
  const double x[2] = {0.15, 0.4};
  const double y[2] = {0.7, 0.05};
  std::vector<double> mx(static_cast<std::size_t>(fam.size()));
  std::vector<double> my(static_cast<std::size_t>(fam.size()));
  fam.evaluate_all(x, mx.data());
  fam.evaluate_all(y, my.data());
  double direct = 0.0, scale = 1.0;
  for (int n = 0; n < fam.size(); ++n) {
    scale *= 0.5;
    direct += scale * std::min(1.0, std::abs(fam.evaluate_one(n, x) -
                                             fam.evaluate_one(n, y)));
  }
  CHECK(metric_d(mx, my, fam.size()).value == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("metric_d is a pseudometric on random triples") {
  GaussianRng rng(81);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(20), b(20), c(20);
    for (int i = 0; i < 20; ++i) {
      a[static_cast<std::size_t>(i)] = 2.0 * rng.uniform01() - 1.0;
      b[static_cast<std::size_t>(i)] = 2.0 * rng.uniform01() - 1.0;
      c[static_cast<std::size_t>(i)] = 2.0 * rng.uniform01() - 1.0;
    }
    const double ab = metric_d(a, b, 20).value;
    const double ba = metric_d(b, a, 20).value;
    const double ac = metric_d(a, c, 20).value;
    const double cb = metric_d(c, b, 20).value;
    CHECK(ab == ba);
    CHECK(ab <= ac + cb + 1e-14);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("gamma_flow: identity, limit, semigroup, fixed point") {
  const std::vector<double> nu = {0.8, -0.3, 0.2};
  const std::vector<double> mu = {0.1, 0.05, -0.6};
  CHECK(gamma_flow(nu, mu, 0.0) == nu);

  const auto far = gamma_flow(nu, mu, 50.0);
  for (std::size_t i = 0; i < mu.size(); ++i)
    CHECK(far[i] == doctest::Approx(mu[i]).epsilon(1e-15));

  const auto once = gamma_flow(nu, mu, 0.7 + 1.1);
  const auto twice = gamma_flow(gamma_flow(nu, mu, 0.7), mu, 1.1);
  for (std::size_t i = 0; i < mu.size(); ++i)
    CHECK(once[i] == doctest::Approx(twice[i]).epsilon(1e-12));

  for (const double s : {0.0, 0.3, 2.0, 10.0}) {
    const auto fixed = gamma_flow(mu, mu, s);
    for (std::size_t i = 0; i < mu.size(); ++i)
      CHECK(fixed[i] == doctest::Approx(mu[i]).epsilon(1e-15));
  }

  CHECK_THROWS_AS(gamma_flow(nu, mu, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(gamma_flow(nu, {0.0}, 1.0), std::invalid_argument);
}

TEST_CASE("measure-level metric rejects mismatched families") {
  const OccupationMeasure a(TestFunctionFamily(2, 12), 1, 64, InitialMeasure::uniform);
  const OccupationMeasure b(TestFunctionFamily(2, 10), 1, 64, InitialMeasure::uniform);
  CHECK_THROWS_AS(metric_d(a, b, 8), std::invalid_argument);
  const OccupationMeasure c(TestFunctionFamily(2, 12), 1, 64, InitialMeasure::uniform);
  CHECK(metric_d(a, c, 12).value == 0.0);
}
