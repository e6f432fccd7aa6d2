#include "abp/measure.hpp"

#include <cmath>
#include <stdexcept>

#include "abp/parallel.hpp"

namespace abp {

KernelStencil::KernelStencil(const PeriodicKernel& kernel, int bins_per_dim,
                             double sample_offset)
    : m_(kernel.dim()), g_(bins_per_dim) {
  if (g_ < 2) throw std::invalid_argument("KernelStencil: need >= 2 bins");
  weights_.resize(BiasFunction::total_nodes(m_, g_));
  std::vector<double> disp(static_cast<std::size_t>(m_));
  for (std::size_t idx = 0; idx < weights_.size(); ++idx) {
    std::size_t rem = idx;
    for (int i = m_ - 1; i >= 0; --i) {
      const int o = static_cast<int>(rem % static_cast<std::size_t>(g_));
      rem /= static_cast<std::size_t>(g_);
      disp[static_cast<std::size_t>(i)] = wrap_half((o + sample_offset) / g_);
    }
    weights_[idx] = kernel.value_from_displacement(disp.data());
  }
  double sum = 0.0;
  for (double w : weights_) sum += w;
  normalization_ = sum / static_cast<double>(weights_.size());
  for (double& w : weights_) w /= normalization_;
}

KernelBounds KernelStencil::bounds() const {
  KernelBounds b;
  b.min_k = weights_[0];
  b.max_k0 = weights_[0];
  for (double w : weights_) {
    b.min_k = std::min(b.min_k, w);
    b.max_k0 = std::max(b.max_k0, w);
  }
  b.max_k1 = 0.0;
  std::vector<std::size_t> stride(static_cast<std::size_t>(m_), 1);
  for (int i = m_ - 2; i >= 0; --i)
    stride[static_cast<std::size_t>(i)] =
        stride[static_cast<std::size_t>(i + 1)] * static_cast<std::size_t>(g_);
  for (std::size_t idx = 0; idx < weights_.size(); ++idx) {
    std::size_t rem = idx;
    for (int i = m_ - 1; i >= 0; --i) {
      const std::size_t s = stride[static_cast<std::size_t>(i)];
      const int j = static_cast<int>(rem % static_cast<std::size_t>(g_));
      rem /= static_cast<std::size_t>(g_);
      const std::size_t up = (j + 1 < g_) ? idx + s : idx + s - s * static_cast<std::size_t>(g_);
      const std::size_t dn = (j > 0) ? idx - s : idx - s + s * static_cast<std::size_t>(g_);
      const double fd = (weights_[up] - weights_[dn]) * (0.5 * g_);
      b.max_k1 = std::max(b.max_k1, std::abs(fd));
    }
  }
  return b;
}

OccupationMeasure::OccupationMeasure(TestFunctionFamily family, int m,
                                     int bins_per_dim, InitialMeasure init,
                                     const TorusPoint* x0, double prior_weight)
    : family_(std::move(family)), m_(m), g_(bins_per_dim) {
  if (m_ < 1 || m_ > 4)
    throw std::invalid_argument("OccupationMeasure: m must be in [1, 4]");
  if (g_ < 64)
    throw std::invalid_argument("OccupationMeasure: need >= 64 bins per dim");
  const std::size_t n = static_cast<std::size_t>(family_.size());
  prior_moments_.assign(n, 0.0);
  moment_sums_.assign(n, 0.0);
  bins_.assign(BiasFunction::total_nodes(m_, g_), 0.0);
  scratch_.assign(n, 0.0);

  switch (init) {
    case InitialMeasure::uniform: {
      if (!(prior_weight > 0.0))
        throw std::invalid_argument("OccupationMeasure: prior_weight must be > 0");
      prior_weight_ = prior_weight;
      // Uniform measure: trigonometric moments vanish exactly.
      const double per_bin = prior_weight_ / static_cast<double>(bins_.size());
      for (double& b : bins_) b = per_bin;
      break;
    }
    case InitialMeasure::point: {
      if (!(prior_weight > 0.0))
        throw std::invalid_argument("OccupationMeasure: prior_weight must be > 0");
      if (x0 == nullptr || x0->dim() < m_)
        throw std::invalid_argument(
            "OccupationMeasure: point initial measure needs a location");
      prior_weight_ = prior_weight;
      family_.evaluate_all(x0->coords.data(), prior_moments_.data());
      bins_[bin_of(x0->coords.data())] += prior_weight_;
      break;
    }
    case InitialMeasure::none:
      prior_weight_ = 0.0;
      break;
  }
}

void OccupationMeasure::accumulate(const TorusPoint& x, double weight, double dt) {
  if (!(weight > 0.0))
    throw std::invalid_argument("OccupationMeasure::accumulate: weight must be > 0");
  if (!(dt > 0.0))
    throw std::invalid_argument("OccupationMeasure::accumulate: dt must be > 0");
  if (x.dim() < m_)
    throw std::invalid_argument("OccupationMeasure::accumulate: bad dimension");
  family_.evaluate_all(x.coords.data(), scratch_.data());
  add_weighted(scratch_.data(), bin_of(x.coords.data()), weight * dt);
}

void OccupationMeasure::add_weighted(const double* family_values,
                                     std::size_t bin, double mass) {
  const std::size_t n = moment_sums_.size();
  for (std::size_t i = 0; i < n; ++i) moment_sums_[i] += mass * family_values[i];
  bins_[bin] += mass;
  total_weight_ += mass;
}

std::vector<double> OccupationMeasure::normalized_moments() const {
  const double denom = prior_weight_ + total_weight_;
  std::vector<double> out(moment_sums_.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (prior_moments_[i] * prior_weight_ + moment_sums_[i]) / denom;
  return out;
}

std::vector<double> OccupationMeasure::normalized_marginal() const {
  const double denom = prior_weight_ + total_weight_;
  std::vector<double> out(bins_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = bins_[i] / denom;
  return out;
}

double OccupationMeasure::bin_mass_total() const {
  double sum = 0.0;
  for (double b : bins_) sum += b;
  return sum;
}

BiasFunction bias_from_measure(const OccupationMeasure& mu,
                               const KernelStencil& stencil, double beta) {
  if (stencil.dim() != mu.marginal_dim() ||
      stencil.bins_per_dim() != mu.bins_per_dim())
    throw std::invalid_argument("bias_from_measure: stencil/histogram mismatch");
  const int m = mu.marginal_dim();
  const int g = mu.bins_per_dim();
  BiasFunction out(m, g, beta);
  const double den = mu.bin_mass_total();
  const std::vector<double>& bins = mu.bins();
  const std::vector<double>& w = stencil.weights();

  par::parallel_for(out.size(), [&](std::size_t node_idx) {
    int node[4];
    std::size_t rem = node_idx;
    for (int i = m - 1; i >= 0; --i) {
      node[i] = static_cast<int>(rem % static_cast<std::size_t>(g));
      rem /= static_cast<std::size_t>(g);
    }
    // Iterate bins in natural order so the sum matches the denominator's
    // accumulation order when the stencil is constant.
    double num = 0.0;
    if (m == 1) {
      const int j = node[0];
      for (int b = 0; b < g; ++b) {
        const int o = b - j < 0 ? b - j + g : b - j;
        num += w[static_cast<std::size_t>(o)] * bins[static_cast<std::size_t>(b)];
      }
    } else {
      int bin[4];
      for (std::size_t b = 0; b < bins.size(); ++b) {
        std::size_t br = b;
        for (int i = m - 1; i >= 0; --i) {
          bin[i] = static_cast<int>(br % static_cast<std::size_t>(g));
          br /= static_cast<std::size_t>(g);
        }
        num += w[stencil.offset_index(node, bin)] * bins[b];
      }
    }
    out.values[node_idx] = -std::log(num / den) / beta;
  });
  return out;
}

BiasEstimator::BiasEstimator(KernelStencil stencil) : stencil_(std::move(stencil)) {
  num_.assign(stencil_.size(), 0.0);
}

void BiasEstimator::reset_from(const OccupationMeasure& mu) {
  if (stencil_.dim() != mu.marginal_dim() ||
      stencil_.bins_per_dim() != mu.bins_per_dim())
    throw std::invalid_argument("BiasEstimator: stencil/histogram mismatch");
  const int m = stencil_.dim();
  const int g = stencil_.bins_per_dim();
  const std::vector<double>& bins = mu.bins();
  const std::vector<double>& w = stencil_.weights();
  for (std::size_t node_idx = 0; node_idx < num_.size(); ++node_idx) {
    int node[4];
    std::size_t rem = node_idx;
    for (int i = m - 1; i >= 0; --i) {
      node[i] = static_cast<int>(rem % static_cast<std::size_t>(g));
      rem /= static_cast<std::size_t>(g);
    }
    double num = 0.0;
    if (m == 1) {
      const int j = node[0];
      for (int b = 0; b < g; ++b) {
        const int o = b - j < 0 ? b - j + g : b - j;
        num += w[static_cast<std::size_t>(o)] * bins[static_cast<std::size_t>(b)];
      }
    } else {
      int bin[4];
      for (std::size_t b = 0; b < bins.size(); ++b) {
        std::size_t br = b;
        for (int i = m - 1; i >= 0; --i) {
          bin[i] = static_cast<int>(br % static_cast<std::size_t>(g));
          br /= static_cast<std::size_t>(g);
        }
        num += w[stencil_.offset_index(node, bin)] * bins[b];
      }
    }
    num_[node_idx] = num;
  }
  den_ = mu.bin_mass_total();
}

void BiasEstimator::deposit(std::size_t bin, double mass) {
  const int g = stencil_.bins_per_dim();
  const std::vector<double>& w = stencil_.weights();
  if (stencil_.dim() == 1) {
    const int b = static_cast<int>(bin);
    // offset = (b - j) mod g, split at the wrap to avoid a modulo per node
    for (int j = 0; j <= b; ++j)
      num_[static_cast<std::size_t>(j)] += w[static_cast<std::size_t>(b - j)] * mass;
    for (int j = b + 1; j < g; ++j)
      num_[static_cast<std::size_t>(j)] += w[static_cast<std::size_t>(b - j + g)] * mass;
  } else {
    const int m = stencil_.dim();
    int bi[4];
    std::size_t br = bin;
    for (int i = m - 1; i >= 0; --i) {
      bi[i] = static_cast<int>(br % static_cast<std::size_t>(g));
      br /= static_cast<std::size_t>(g);
    }
    int node[4];
    for (std::size_t node_idx = 0; node_idx < num_.size(); ++node_idx) {
      std::size_t rem = node_idx;
      for (int i = m - 1; i >= 0; --i) {
        node[i] = static_cast<int>(rem % static_cast<std::size_t>(g));
        rem /= static_cast<std::size_t>(g);
      }
      num_[node_idx] += w[stencil_.offset_index(node, bi)] * mass;
    }
  }
  den_ += mass;
}

void BiasEstimator::write_bias(BiasFunction& out) const {
  if (out.values.size() != num_.size())
    throw std::invalid_argument("BiasEstimator::write_bias: grid mismatch");
  const double inv_beta = 1.0 / out.beta;
  for (std::size_t i = 0; i < num_.size(); ++i)
    out.values[i] = -std::log(num_[i] / den_) * inv_beta;
}

AdmissibilityReport in_admissible_set(const BiasFunction& A,
                                      const KernelBounds& bounds, double tol) {
  AdmissibilityReport r;
  const std::size_t n = A.values.size();
  std::vector<double> expgrid(n);
  for (std::size_t i = 0; i < n; ++i)
    expgrid[i] = std::exp(-A.beta * A.values[i]);

  r.min_exp = expgrid[0];
  r.max_exp = expgrid[0];
  for (double e : expgrid) {
    r.min_exp = std::min(r.min_exp, e);
    r.max_exp = std::max(r.max_exp, e);
  }

  const int m = A.m;
  const int g = A.grid_size;
  std::vector<std::size_t> stride(static_cast<std::size_t>(m), 1);
  for (int i = m - 2; i >= 0; --i)
    stride[static_cast<std::size_t>(i)] =
        stride[static_cast<std::size_t>(i + 1)] * static_cast<std::size_t>(g);
  r.max_deriv = 0.0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rem = idx;
    for (int i = m - 1; i >= 0; --i) {
      const std::size_t s = stride[static_cast<std::size_t>(i)];
      const int j = static_cast<int>(rem % static_cast<std::size_t>(g));
      rem /= static_cast<std::size_t>(g);
      const std::size_t up = (j + 1 < g) ? idx + s : idx + s - s * static_cast<std::size_t>(g);
      const std::size_t dn = (j > 0) ? idx - s : idx - s + s * static_cast<std::size_t>(g);
      const double fd = (expgrid[up] - expgrid[dn]) * (0.5 * g);
      r.max_deriv = std::max(r.max_deriv, std::abs(fd));
    }
  }

  const double tol_lo = tol * std::max(1.0, bounds.min_k);
  const double tol_v = tol * std::max(1.0, bounds.max_k0);
  const double tol_d = tol * std::max(1.0, bounds.max_k1);
  r.admissible = true;
  r.max_violation = 0.0;
  r.worst_bound = "none";
  const double low_gap = bounds.min_k - r.min_exp;
  if (low_gap > tol_lo) {
    r.admissible = false;
    if (low_gap > r.max_violation) {
      r.max_violation = low_gap;
      r.worst_bound = "min";
    }
  }
  const double high_gap = r.max_exp - bounds.max_k0;
  if (high_gap > tol_v) {
    r.admissible = false;
    if (high_gap > r.max_violation) {
      r.max_violation = high_gap;
      r.worst_bound = "M0";
    }
  }
  const double deriv_gap = r.max_deriv - bounds.max_k1;
  if (deriv_gap > tol_d) {
    r.admissible = false;
    if (deriv_gap > r.max_violation) {
      r.max_violation = deriv_gap;
      r.worst_bound = "M1";
    }
  }
  return r;
}

MetricResult metric_d(const std::vector<double>& m1,
                      const std::vector<double>& m2, int n_used) {
  if (n_used < 1) throw std::invalid_argument("metric_d: n_used must be >= 1");
  if (static_cast<int>(m1.size()) < n_used || static_cast<int>(m2.size()) < n_used)
    throw std::invalid_argument("metric_d: moment vectors shorter than n_used");
  MetricResult r;
  double scale = 1.0;
  for (int n = 0; n < n_used; ++n) {
    scale *= 0.5;
    r.value += scale * std::min(1.0, std::abs(m1[static_cast<std::size_t>(n)] -
                                              m2[static_cast<std::size_t>(n)]));
  }
  r.truncation_bound = scale;
  return r;
}

MetricResult metric_d(const OccupationMeasure& mu1, const OccupationMeasure& mu2,
                      int n_used) {
  if (!mu1.family().same_family(mu2.family()))
    throw std::invalid_argument("metric_d: measures use different families");
  return metric_d(mu1.normalized_moments(), mu2.normalized_moments(), n_used);
}

std::vector<double> gamma_flow(const std::vector<double>& nu_moments,
                               const std::vector<double>& mu_beta_moments,
                               double s) {
  if (s < 0.0) throw std::invalid_argument("gamma_flow: s must be >= 0");
  if (nu_moments.size() != mu_beta_moments.size())
    throw std::invalid_argument("gamma_flow: moment size mismatch");
  const double decay = std::exp(-s);
  std::vector<double> out(nu_moments.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = decay * nu_moments[i] + (1.0 - decay) * mu_beta_moments[i];
  return out;
}

}  // namespace abp
