#include "abp/kernel.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace abp {

namespace {

// Smooth bump, compactly supported in [-1/2, 1/2], C-infinity.
double bump(double u) {
  const double q = 1.0 - 4.0 * u * u;
  if (q <= 0.0) return 0.0;
  return std::exp(-1.0 / q);
}

// Integral of bump over [-1/2, 1/2], computed once by midpoint quadrature.
double bump_integral() {
  static const double value = [] {
    const std::size_t n = 1u << 16;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n) - 0.5;
      acc += bump(u);
    }
    return acc / static_cast<double>(n);
  }();
  return value;
}

}  // namespace

PeriodicKernel::PeriodicKernel(int m, double epsilon, double floor_delta)
    : m_(m), epsilon_(epsilon), floor_delta_(floor_delta) {
  if (m_ < 1 || m_ > 8)
    throw std::invalid_argument("PeriodicKernel: m must be in [1, 8]");
  if (!(epsilon_ > 0.0) || !(epsilon_ < 1.0))
    throw std::invalid_argument(
        "PeriodicKernel: epsilon must lie in (0, 1) so the support fits in one period");
  if (!(floor_delta_ > 0.0) || floor_delta_ > 1.0)
    throw std::invalid_argument("PeriodicKernel: floor_delta must lie in (0, 1]");
  scale_ = 1.0 / (bump_integral() * epsilon_);
}

double PeriodicKernel::profile1d(double u) const {
  return scale_ * bump(u / epsilon_);
}

double PeriodicKernel::value_from_displacement(const double* disp) const {
  double prod = 1.0;
  for (int i = 0; i < m_; ++i) prod *= profile1d(disp[i]);
  return (1.0 - floor_delta_) * prod + floor_delta_;
}

KernelBounds kernel_bounds(const PeriodicKernel& k, int grid_size) {
  if (grid_size < 64)
    throw std::invalid_argument("kernel_bounds: grid_size must be >= 64");
  const int m = k.dim();
  const int g = grid_size;

  std::size_t total = 1;
  for (int i = 0; i < m; ++i) total *= static_cast<std::size_t>(g);

  std::vector<double> values(total);
  std::vector<double> disp(static_cast<std::size_t>(m));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (int i = m - 1; i >= 0; --i) {
      const int j = static_cast<int>(rem % static_cast<std::size_t>(g));
      rem /= static_cast<std::size_t>(g);
      disp[static_cast<std::size_t>(i)] = wrap_half(static_cast<double>(j) / g);
    }
    values[idx] = k.value_from_displacement(disp.data());
  }

  KernelBounds b;
  b.min_k = values[0];
  b.max_k0 = values[0];
  for (double v : values) {
    b.min_k = std::min(b.min_k, v);
    b.max_k0 = std::max(b.max_k0, v);
  }

  // Max centered difference along each displacement axis; by translation
  // invariance a z-derivative is minus a displacement derivative.
  std::vector<std::size_t> stride(static_cast<std::size_t>(m), 1);
  for (int i = m - 2; i >= 0; --i)
    stride[static_cast<std::size_t>(i)] =
        stride[static_cast<std::size_t>(i + 1)] * static_cast<std::size_t>(g);

  b.max_k1 = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (int i = m - 1; i >= 0; --i) {
      const std::size_t s = stride[static_cast<std::size_t>(i)];
      const int j = static_cast<int>(rem % static_cast<std::size_t>(g));
      rem /= static_cast<std::size_t>(g);
      const std::size_t up = (j + 1 < g) ? idx + s : idx + s - s * static_cast<std::size_t>(g);
      const std::size_t dn = (j > 0) ? idx - s : idx - s + s * static_cast<std::size_t>(g);
      const double fd = (values[up] - values[dn]) * (0.5 * g);
      b.max_k1 = std::max(b.max_k1, std::abs(fd));
    }
  }
  return b;
}

}  // namespace abp
