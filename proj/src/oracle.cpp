#include "abp/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "abp/parallel.hpp"

namespace abp {

namespace {

void check_grid(const Potential& V, double beta, const QuadratureGrid& grid) {
  if (grid.dimension != V.dim())
    throw std::invalid_argument("quadrature grid dimension does not match potential");
  if (grid.points_per_dim < 2)
    throw std::invalid_argument("quadrature grid needs >= 2 points per dim");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
}

}  // namespace

double partition_function(const Potential& V, double beta,
                          const QuadratureGrid& grid) {
  check_grid(V, beta, grid);
  const std::size_t total = grid.total();
  const double sum = par::chunked_sum(total, [&](std::size_t idx) {
    double x[8];
    grid.coords(idx, x);
    return std::exp(-beta * V.energy(x));
  });
  return sum / static_cast<double>(total);
}

double mu_beta_moment(const Potential& V, double beta, const TestFn& f,
                      const QuadratureGrid& grid) {
  check_grid(V, beta, grid);
  const std::size_t total = grid.total();
  std::vector<double> acc = par::chunked_sum_multi(total, 2, [&](std::size_t idx, double* a) {
    double x[8];
    grid.coords(idx, x);
    const double w = std::exp(-beta * V.energy(x));
    a[0] += w * f(x);
    a[1] += w;
  });
  return acc[0] / acc[1];
}

std::vector<double> mu_beta_moments(const Potential& V, double beta,
                                    const TestFunctionFamily& family,
                                    const QuadratureGrid& grid) {
  check_grid(V, beta, grid);
  if (family.dim() != V.dim())
    throw std::invalid_argument("mu_beta_moments: family dimension mismatch");
  const std::size_t total = grid.total();
  const std::size_t n = static_cast<std::size_t>(family.size());
  std::vector<double> acc =
      par::chunked_sum_multi(total, n + 1, [&](std::size_t idx, double* a) {
        static thread_local std::vector<double> vals;
        vals.resize(n);
        double x[8];
        grid.coords(idx, x);
        const double w = std::exp(-beta * V.energy(x));
        family.evaluate_all(x, vals.data());
        for (std::size_t i = 0; i < n; ++i) a[i] += w * vals[i];
        a[n] += w;
      });
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = acc[i] / acc[n];
  return out;
}

FreeEnergyProfile free_energy(const Potential& V, double beta,
                              const ReactionCoordinate& xi,
                              const QuadratureGrid& grid, int out_resolution) {
  check_grid(V, beta, grid);
  const int d = V.dim();
  const int m = xi.m;
  if (m < 1 || m > d - 1)
    throw std::invalid_argument("free_energy: need 1 <= m <= d-1");
  if (out_resolution < 64)
    throw std::invalid_argument("free_energy: out_resolution must be >= 64");

  const int n = grid.points_per_dim;
  const int dperp = d - m;
  std::size_t inner_total = 1;
  for (int i = 0; i < dperp; ++i) inner_total *= static_cast<std::size_t>(n);

  FreeEnergyProfile profile;
  profile.a_star = BiasFunction(m, out_resolution, beta);
  const std::size_t z_total = profile.a_star.size();
  std::vector<double> slice(z_total);

  par::parallel_for(z_total, [&](std::size_t zidx) {
    double x[8];
    std::size_t rem = zidx;
    for (int i = m - 1; i >= 0; --i) {
      x[i] = static_cast<double>(rem % static_cast<std::size_t>(out_resolution)) /
             out_resolution;
      rem /= static_cast<std::size_t>(out_resolution);
    }
    double acc = 0.0;
    for (std::size_t p = 0; p < inner_total; ++p) {
      std::size_t pr = p;
      for (int i = d - 1; i >= m; --i) {
        x[i] = static_cast<double>(pr % static_cast<std::size_t>(n)) / n;
        pr /= static_cast<std::size_t>(n);
      }
      acc += std::exp(-beta * V.energy(x));
    }
    slice[zidx] = acc / static_cast<double>(inner_total);
  });

  // Normalize against the same z-grid so the profile density integrates to
  // one exactly (up to rounding).
  double z_sum = 0.0;
  for (double s : slice) z_sum += s;
  profile.z_beta = z_sum / static_cast<double>(z_total);
  for (std::size_t i = 0; i < z_total; ++i)
    profile.a_star.values[i] = -std::log(slice[i] / profile.z_beta) / beta;
  return profile;
}

BiasFunction a_infinity(const FreeEnergyProfile& profile,
                        const PeriodicKernel& kernel) {
  const BiasFunction& a_star = profile.a_star;
  if (kernel.dim() != a_star.m)
    throw std::invalid_argument("a_infinity: kernel/profile dimension mismatch");
  const int m = a_star.m;
  const int g = a_star.grid_size;
  const double beta = a_star.beta;
  const KernelStencil stencil(kernel, g, 0.0);

  std::vector<double> density(a_star.size());
  for (std::size_t i = 0; i < density.size(); ++i)
    density[i] = std::exp(-beta * a_star.values[i]);

  BiasFunction out(m, g, beta);
  const std::vector<double>& w = stencil.weights();
  const double inv_total = 1.0 / static_cast<double>(density.size());
  par::parallel_for(out.size(), [&](std::size_t node_idx) {
    int node[4];
    std::size_t rem = node_idx;
    for (int i = m - 1; i >= 0; --i) {
      node[i] = static_cast<int>(rem % static_cast<std::size_t>(g));
      rem /= static_cast<std::size_t>(g);
    }
    double acc = 0.0;
    if (m == 1) {
      const int j = node[0];
      for (int b = 0; b < g; ++b) {
        const int o = b - j < 0 ? b - j + g : b - j;
        acc += w[static_cast<std::size_t>(o)] * density[static_cast<std::size_t>(b)];
      }
    } else {
      int bin[4];
      for (std::size_t b = 0; b < density.size(); ++b) {
        std::size_t br = b;
        for (int i = m - 1; i >= 0; --i) {
          bin[i] = static_cast<int>(br % static_cast<std::size_t>(g));
          br /= static_cast<std::size_t>(g);
        }
        acc += w[stencil.offset_index(node, bin)] * density[b];
      }
    }
    out.values[node_idx] = -std::log(acc * inv_total) / beta;
  });
  return out;
}

double star_moment(const Potential& V, const FreeEnergyProfile& profile,
                   double beta, const TestFn& f, const QuadratureGrid& grid) {
  check_grid(V, beta, grid);
  const std::size_t total = grid.total();
  std::vector<double> acc = par::chunked_sum_multi(total, 2, [&](std::size_t idx, double* a) {
    double x[8];
    grid.coords(idx, x);
    const double astar = profile.a_star.value_at(x);  // first m coords
    const double w = std::exp(-beta * (V.energy(x) - astar));
    a[0] += w * f(x);
    a[1] += w;
  });
  return acc[0] / acc[1];
}

std::vector<double> star_moments(const Potential& V,
                                 const FreeEnergyProfile& profile, double beta,
                                 const TestFunctionFamily& family,
                                 const QuadratureGrid& grid) {
  check_grid(V, beta, grid);
  const std::size_t total = grid.total();
  const std::size_t n = static_cast<std::size_t>(family.size());
  std::vector<double> acc =
      par::chunked_sum_multi(total, n + 1, [&](std::size_t idx, double* a) {
        static thread_local std::vector<double> vals;
        vals.resize(n);
        double x[8];
        grid.coords(idx, x);
        const double astar = profile.a_star.value_at(x);
        const double w = std::exp(-beta * (V.energy(x) - astar));
        family.evaluate_all(x, vals.data());
        for (std::size_t i = 0; i < n; ++i) a[i] += w * vals[i];
        a[n] += w;
      });
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = acc[i] / acc[n];
  return out;
}

std::vector<double> star_marginal_bins(const FreeEnergyProfile& profile,
                                       int bins_per_dim, int subsamples) {
  const int m = profile.a_star.m;
  const int g = bins_per_dim;
  const double beta = profile.a_star.beta;
  std::size_t bins_total = 1;
  for (int i = 0; i < m; ++i) bins_total *= static_cast<std::size_t>(g);
  std::size_t sub_total = 1;
  for (int i = 0; i < m; ++i) sub_total *= static_cast<std::size_t>(subsamples);

  std::vector<double> mass(bins_total, 0.0);
  double z[4];
  int bi[4];
  for (std::size_t bflat = 0; bflat < bins_total; ++bflat) {
    std::size_t rem = bflat;
    for (int i = m - 1; i >= 0; --i) {
      bi[i] = static_cast<int>(rem % static_cast<std::size_t>(g));
      rem /= static_cast<std::size_t>(g);
    }
    double acc = 0.0;
    for (std::size_t s = 0; s < sub_total; ++s) {
      std::size_t sr = s;
      for (int i = m - 1; i >= 0; --i) {
        const int si = static_cast<int>(sr % static_cast<std::size_t>(subsamples));
        sr /= static_cast<std::size_t>(subsamples);
        z[i] = (bi[i] + (si + 0.5) / subsamples) / g;
      }
      acc += std::exp(-beta * profile.a_star.value_at(z));
    }
    mass[bflat] = acc / static_cast<double>(sub_total);
  }
  double total = 0.0;
  for (double v : mass) total += v;
  for (double& v : mass) v /= total;
  return mass;
}

}  // namespace abp
