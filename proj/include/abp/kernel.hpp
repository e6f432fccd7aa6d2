#pragma once

#include <vector>

#include "abp/torus.hpp"

namespace abp {

// Pointwise kernel bounds. min_k is the strict lower bound (the floor),
// max_k0 the sup, max_k1 the sup of the first derivative in z.
struct KernelBounds {
  double min_k = 0.0;
  double max_k0 = 0.0;
  double max_k1 = 0.0;
};

// Translation-invariant smoothing kernel on T^m x T^m,
//   K(z, zeta) = (1 - delta) * eps^-m * Kb((zeta - z)/eps) + delta,
// where Kb is the tensorized smooth bump supported in [-1/2,1/2]^m and
// normalized to unit integral per dimension. Both terms integrate to 1 in z,
// and the floor keeps K >= delta > 0 everywhere. Requiring eps < 1 makes the
// nearest-image displacement the only image that can touch the support.
class PeriodicKernel {
 public:
  PeriodicKernel(int m, double epsilon, double floor_delta);

  int dim() const { return m_; }
  double epsilon() const { return epsilon_; }
  double floor_delta() const { return floor_delta_; }

  // Kernel value from the componentwise displacement zeta - z reduced to
  // [-1/2, 1/2). Symmetric under negation of the displacement.
  double value_from_displacement(const double* disp) const;

  double operator()(const double* z, const double* zeta) const {
    double disp[8];
    for (int i = 0; i < m_; ++i) disp[i] = wrap_half(zeta[i] - z[i]);
    return value_from_displacement(disp);
  }
  double operator()(const TorusPoint& z, const TorusPoint& zeta) const {
    return (*this)(z.coords.data(), zeta.coords.data());
  }

  // 1D normalized bump profile (1/eps) * c * bump(u/eps), before the floor
  // mix. Zero outside |u| <= eps/2.
  double profile1d(double u) const;

 private:
  int m_;
  double epsilon_;
  double floor_delta_;
  double scale_;  // (1 - delta) * (c / eps)^m combined per-dim in profile1d
};

// Grid min/max of K over displacement space plus the max finite-difference
// derivative in z, on grid_size points per dimension.
KernelBounds kernel_bounds(const PeriodicKernel& k, int grid_size);

}  // namespace abp
