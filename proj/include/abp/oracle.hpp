#pragma once

#include <functional>
#include <vector>

#include "abp/bias.hpp"
#include "abp/family.hpp"
#include "abp/kernel.hpp"
#include "abp/measure.hpp"
#include "abp/potential.hpp"
#include "abp/torus.hpp"

namespace abp {

// Uniform tensor grid on the torus with nodes at i/n. The rectangle rule on
// a smooth periodic integrand is spectrally accurate.
struct QuadratureGrid {
  int points_per_dim = 512;
  int dimension = 2;

  std::size_t total() const {
    std::size_t t = 1;
    for (int i = 0; i < dimension; ++i) t *= static_cast<std::size_t>(points_per_dim);
    return t;
  }
  void coords(std::size_t idx, double* x) const {
    for (int i = dimension - 1; i >= 0; --i) {
      x[i] = static_cast<double>(idx % static_cast<std::size_t>(points_per_dim)) /
             points_per_dim;
      idx /= static_cast<std::size_t>(points_per_dim);
    }
  }
};

using TestFn = std::function<double(const double*)>;

// Z(beta) = integral of exp(-beta V) over T^d.
double partition_function(const Potential& V, double beta,
                          const QuadratureGrid& grid);

// Average of f against mu_beta = exp(-beta V)/Z.
double mu_beta_moment(const Potential& V, double beta, const TestFn& f,
                      const QuadratureGrid& grid);

// Averages of the whole family against mu_beta.
std::vector<double> mu_beta_moments(const Potential& V, double beta,
                                    const TestFunctionFamily& family,
                                    const QuadratureGrid& grid);

// Free energy along the first m coordinates on an out_resolution grid:
// exp(-beta A(z)) is the z-slice integral of exp(-beta V)/Z. The grid's
// density integrates to one by construction.
struct FreeEnergyProfile {
  BiasFunction a_star;
  double z_beta = 0.0;  // the normalizing constant of the composite grid
};

FreeEnergyProfile free_energy(const Potential& V, double beta,
                              const ReactionCoordinate& xi,
                              const QuadratureGrid& grid, int out_resolution);

// Smoothed limit bias: exp(-beta A_inf) = K convolved with exp(-beta A_star),
// evaluated by the grid-normalized stencil on the profile grid.
BiasFunction a_infinity(const FreeEnergyProfile& profile,
                        const PeriodicKernel& kernel);

// Average of f against the star-biased measure
// exp(-beta [V - A_star(xi(x))]) / (normalization), with A_star interpolated
// from the profile grid.
double star_moment(const Potential& V, const FreeEnergyProfile& profile,
                   double beta, const TestFn& f, const QuadratureGrid& grid);

std::vector<double> star_moments(const Potential& V,
                                 const FreeEnergyProfile& profile, double beta,
                                 const TestFunctionFamily& family,
                                 const QuadratureGrid& grid);

// Bin masses of the density exp(-beta A_star) on a bins_per_dim histogram
// over T^m, integrated with sub-bin rectangle sums from the profile grid.
std::vector<double> star_marginal_bins(const FreeEnergyProfile& profile,
                                       int bins_per_dim, int subsamples = 16);

}  // namespace abp
