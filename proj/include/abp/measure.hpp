#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "abp/bias.hpp"
#include "abp/family.hpp"
#include "abp/kernel.hpp"
#include "abp/torus.hpp"

namespace abp {

// The smoothing kernel sampled on the displacement set between bias-grid
// nodes (at i/G) and histogram bin centers (at (i+1/2)/G), rescaled by the
// scalar mean so each row of the implied circulant sums to exactly G^m. This
// is the discrete counterpart of the kernel's unit z-integral: convolving a
// normalized histogram with the stencil maps the uniform histogram to the
// constant 1. sample_offset = 0 instead samples node-to-node displacements
// (the quadrature variant used against grid densities).
class KernelStencil {
 public:
  KernelStencil(const PeriodicKernel& kernel, int bins_per_dim,
                double sample_offset = 0.5);

  int dim() const { return m_; }
  int bins_per_dim() const { return g_; }
  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  // Mean of the raw kernel samples; the constant divided out.
  double normalization() const { return normalization_; }

  // Stencil value for the flat offset index ((bin - node) mod G per dim).
  double value(std::size_t offset) const { return weights_[offset]; }

  // Flat offset between a node multi-index and a bin multi-index.
  std::size_t offset_index(const int* node, const int* bin) const {
    std::size_t idx = 0;
    for (int i = 0; i < m_; ++i) {
      int o = bin[i] - node[i];
      if (o < 0) o += g_;
      idx = idx * static_cast<std::size_t>(g_) + static_cast<std::size_t>(o);
    }
    return idx;
  }

  // Pointwise and first-derivative bounds of the sampled operator; convex
  // combinations of stencil slices satisfy these exactly.
  KernelBounds bounds() const;

 private:
  int m_;
  int g_;
  double normalization_;
  std::vector<double> weights_;
};

enum class InitialMeasure { uniform, point, none };

// Weighted empirical occupation measure, tracked through two projections:
// moments against a test-function family and a histogram of the first m
// coordinates. The prior carries the initial measure; total_weight
// accumulates the deposited weight*dt mass (the accumulated weight theta in
// weighted mode, elapsed time in unweighted mode).
class OccupationMeasure {
 public:
  OccupationMeasure(TestFunctionFamily family, int m, int bins_per_dim,
                    InitialMeasure init, const TorusPoint* x0 = nullptr,
                    double prior_weight = 1.0);

  void accumulate(const TorusPoint& x, double weight, double dt);

  // Hot path: family values precomputed by the caller, mass = weight * dt.
  void add_weighted(const double* family_values, std::size_t bin, double mass);

  std::size_t bin_of(const double* z) const {
    std::size_t idx = 0;
    for (int i = 0; i < m_; ++i) {
      int b = static_cast<int>(wrap_unit(z[i]) * g_);
      if (b >= g_) b = g_ - 1;
      idx = idx * static_cast<std::size_t>(g_) + static_cast<std::size_t>(b);
    }
    return idx;
  }
  double bin_center(int i) const { return (i + 0.5) / g_; }

  std::vector<double> normalized_moments() const;
  std::vector<double> normalized_marginal() const;

  const TestFunctionFamily& family() const { return family_; }
  const std::vector<double>& moment_sums() const { return moment_sums_; }
  const std::vector<double>& prior_moments() const { return prior_moments_; }
  const std::vector<double>& bins() const { return bins_; }
  double total_weight() const { return total_weight_; }
  double prior_weight() const { return prior_weight_; }
  int marginal_dim() const { return m_; }
  int bins_per_dim() const { return g_; }
  std::size_t bin_count() const { return bins_.size(); }

  // Sum of histogram bins in index order (equals prior + total up to
  // rounding; the denominator used by the bias convolution).
  double bin_mass_total() const;

 private:
  TestFunctionFamily family_;
  int m_;
  int g_;
  double prior_weight_;
  double total_weight_ = 0.0;
  std::vector<double> prior_moments_;
  std::vector<double> moment_sums_;
  std::vector<double> bins_;
  std::vector<double> scratch_;
};

// Bias read off a measure: exp(-beta A(z_j)) is the stencil convolution of
// the histogram divided by its total mass, a convex combination of stencil
// slices. Reference path; simulations use BiasEstimator.
BiasFunction bias_from_measure(const OccupationMeasure& mu,
                               const KernelStencil& stencil, double beta);

// Incrementally maintained stencil convolution: deposit() adds one histogram
// mass update in O(G^m); write_bias() produces the same grid as
// bias_from_measure up to accumulation rounding.
class BiasEstimator {
 public:
  explicit BiasEstimator(KernelStencil stencil);

  void reset_from(const OccupationMeasure& mu);
  void deposit(std::size_t bin, double mass);
  void write_bias(BiasFunction& out) const;

  const KernelStencil& stencil() const { return stencil_; }
  double denominator() const { return den_; }

 private:
  KernelStencil stencil_;
  std::vector<double> num_;
  double den_ = 0.0;
};

struct AdmissibilityReport {
  bool admissible = false;
  double min_exp = 0.0;
  double max_exp = 0.0;
  double max_deriv = 0.0;
  double max_violation = 0.0;
  std::string worst_bound;
};

// Checks min exp(-beta A) >= min_k, max exp(-beta A) <= max_k0 and the grid
// centered-difference |d/dz exp(-beta A)| <= max_k1, each with slack
// tol * max(1, bound).
AdmissibilityReport in_admissible_set(const BiasFunction& A,
                                      const KernelBounds& bounds,
                                      double tol = 1e-9);

struct MetricResult {
  double value = 0.0;
  double truncation_bound = 0.0;
};

// Truncated weak-convergence metric sum_{n<=N} 2^-n min(1, |m1_n - m2_n|)
// on moment vectors; the discarded tail is bounded by 2^-N.
MetricResult metric_d(const std::vector<double>& m1,
                      const std::vector<double>& m2, int n_used);
MetricResult metric_d(const OccupationMeasure& mu1, const OccupationMeasure& mu2,
                      int n_used);

// Affine semiflow e^-s nu + (1 - e^-s) mu acting on moment vectors.
std::vector<double> gamma_flow(const std::vector<double>& nu_moments,
                               const std::vector<double>& mu_beta_moments,
                               double s);

}  // namespace abp
