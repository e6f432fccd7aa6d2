// Timing comparison between the serial reference paths and the
// OpenMP/optimized kernels: quadrature reduction, family evaluation, and the
// bias convolution (full refresh vs incremental estimator).

#include <chrono>
#include <cstdio>
#include <vector>

#include "abp/family.hpp"
#include "abp/kernel.hpp"
#include "abp/measure.hpp"
#include "abp/oracle.hpp"
#include "abp/parallel.hpp"
#include "abp/potential.hpp"
#include "abp/rng.hpp"

using namespace abp;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

template <class F>
double time_ms(F&& f, int reps = 3) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now_ms();
    f();
    best = std::min(best, now_ms() - t0);
  }
  return best;
}

volatile double sink;

}  // namespace

int main() {
  std::printf("threads: %d\n\n", par::max_threads());

  {
    const Potential V = double_well_potential();
    const QuadratureGrid grid{1024, 2};
    const double beta = 4.0;
    const std::size_t total = grid.total();
    const auto integrand = [&](std::size_t idx) {
      double x[8];
      grid.coords(idx, x);
      return std::exp(-beta * V.energy(x));
    };
    const double t_serial = time_ms([&] { sink = par::serial_sum(total, integrand); });
    const double t_chunked = time_ms([&] { sink = par::chunked_sum(total, integrand); });
    std::printf("quadrature sum, 1024^2 points:\n");
    std::printf("  serial fold       %8.2f ms\n", t_serial);
    std::printf("  chunked (OpenMP)  %8.2f ms\n\n", t_chunked);
  }

  {
    const TestFunctionFamily family(2, 40);
    GaussianRng rng(7);
    std::vector<double> xs(2 * 10000);
    for (double& v : xs) v = rng.uniform01();
    std::vector<double> out(static_cast<std::size_t>(family.size()));
    const double t_direct = time_ms([&] {
      double acc = 0.0;
      for (std::size_t p = 0; p < 10000; ++p) {
        for (int n = 0; n < family.size(); ++n)
          acc += family.evaluate_one(n, &xs[2 * p]);
      }
      sink = acc;
    });
    const double t_table = time_ms([&] {
      double acc = 0.0;
      for (std::size_t p = 0; p < 10000; ++p) {
        family.evaluate_all(&xs[2 * p], out.data());
        for (double v : out) acc += v;
      }
      sink = acc;
    });
    std::printf("family evaluation, 40 members x 1e4 points:\n");
    std::printf("  direct trig       %8.2f ms\n", t_direct);
    std::printf("  recurrence tables %8.2f ms\n\n", t_table);
  }

  {
    const int bins = 512;
    const PeriodicKernel kernel(1, 0.1, 0.01);
    const TestFunctionFamily family(2, 40);
    OccupationMeasure mu(family, 1, bins, InitialMeasure::uniform);
    GaussianRng rng(11);
    std::vector<double> vals(static_cast<std::size_t>(family.size()), 0.0);
    for (int i = 0; i < 20000; ++i) {
      const double z = rng.uniform01();
      mu.add_weighted(vals.data(), mu.bin_of(&z), 1e-3);
    }
    const KernelStencil stencil(kernel, bins);
    BiasFunction bias(1, bins, 4.0);
    const double t_full = time_ms([&] {
      bias = bias_from_measure(mu, stencil, 4.0);
      sink = bias.values[0];
    });
    BiasEstimator est(stencil);
    est.reset_from(mu);
    const double t_incremental = time_ms([&] {
      for (int i = 0; i < 1000; ++i)
        est.deposit(static_cast<std::size_t>(i % bins), 1e-3);
      est.write_bias(bias);
      sink = bias.values[0];
    });
    std::printf("bias refresh, %d bins:\n", bins);
    std::printf("  full convolution          %8.2f ms\n", t_full);
    std::printf("  1000 deposits + refresh   %8.2f ms\n", t_incremental);
  }

  return 0;
}
