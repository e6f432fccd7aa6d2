#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "abp/torus.hpp"

namespace abp {

// Grid-sampled smooth function on T^m: nodes at i/G per dimension, row-major
// storage with the last dimension fastest. Queries use multilinear
// interpolation; gradients interpolate the centered-difference grid, the
// convention shared by every consumer of grid biases.
struct BiasFunction {
  int m = 1;
  int grid_size = 0;
  std::vector<double> values;
  double beta = 1.0;

  BiasFunction() = default;
  BiasFunction(int m_, int grid_size_, double beta_)
      : m(m_), grid_size(grid_size_),
        values(total_nodes(m_, grid_size_), 0.0), beta(beta_) {}

  static std::size_t total_nodes(int m, int g) {
    std::size_t t = 1;
    for (int i = 0; i < m; ++i) t *= static_cast<std::size_t>(g);
    return t;
  }

  std::size_t size() const { return values.size(); }
  double node_coord(int i) const { return static_cast<double>(i) / grid_size; }

  std::size_t flat_index(const int* j) const {
    std::size_t idx = 0;
    for (int i = 0; i < m; ++i)
      idx = idx * static_cast<std::size_t>(grid_size) + static_cast<std::size_t>(j[i]);
    return idx;
  }

  double value_at(const double* z) const {
    int j[4];
    double f[4];
    locate(z, j, f);
    const int g = grid_size;
    double acc = 0.0;
    for (int corner = 0; corner < (1 << m); ++corner) {
      double w = 1.0;
      std::size_t idx = 0;
      for (int i = 0; i < m; ++i) {
        const bool hi = (corner >> i) & 1;
        w *= hi ? f[i] : 1.0 - f[i];
        int ji = j[i] + (hi ? 1 : 0);
        if (ji == g) ji = 0;
        idx = idx * static_cast<std::size_t>(g) + static_cast<std::size_t>(ji);
      }
      acc += w * values[idx];
    }
    return acc;
  }

  // d/dz_a of the interpolated centered-difference grid, all m components.
  void gradient_at(const double* z, double* out) const {
    int j[4];
    double f[4];
    locate(z, j, f);
    const int g = grid_size;
    for (int a = 0; a < m; ++a) out[a] = 0.0;
    for (int corner = 0; corner < (1 << m); ++corner) {
      double w = 1.0;
      int jc[4];
      for (int i = 0; i < m; ++i) {
        const bool hi = (corner >> i) & 1;
        w *= hi ? f[i] : 1.0 - f[i];
        jc[i] = j[i] + (hi ? 1 : 0);
        if (jc[i] == g) jc[i] = 0;
      }
      for (int a = 0; a < m; ++a)
        out[a] += w * node_derivative(jc, a);
    }
  }

  double max_abs() const {
    double v = 0.0;
    for (double x : values) v = std::max(v, std::abs(x));
    return v;
  }

  // Sup over this grid's nodes of |this - other| with other interpolated.
  double sup_diff(const BiasFunction& other) const {
    if (other.m != m)
      throw std::invalid_argument("BiasFunction::sup_diff: dimension mismatch");
    double worst = 0.0;
    std::vector<double> z(static_cast<std::size_t>(m));
    int j[4] = {0, 0, 0, 0};
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
      std::size_t rem = idx;
      for (int i = m - 1; i >= 0; --i) {
        j[i] = static_cast<int>(rem % static_cast<std::size_t>(grid_size));
        rem /= static_cast<std::size_t>(grid_size);
      }
      for (int i = 0; i < m; ++i) z[static_cast<std::size_t>(i)] = node_coord(j[i]);
      worst = std::max(worst, std::abs(values[idx] - other.value_at(z.data())));
    }
    return worst;
  }

  // Interpolate onto a grid_size_out grid (same m and beta).
  BiasFunction resampled(int grid_size_out) const {
    BiasFunction out(m, grid_size_out, beta);
    std::vector<double> z(static_cast<std::size_t>(m));
    for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
      std::size_t rem = idx;
      for (int i = m - 1; i >= 0; --i) {
        z[static_cast<std::size_t>(i)] =
            static_cast<double>(rem % static_cast<std::size_t>(grid_size_out)) /
            grid_size_out;
        rem /= static_cast<std::size_t>(grid_size_out);
      }
      out.values[idx] = value_at(z.data());
    }
    return out;
  }

 private:
  void locate(const double* z, int* j, double* f) const {
    const int g = grid_size;
    for (int i = 0; i < m; ++i) {
      const double u = wrap_unit(z[i]) * g;
      int ji = static_cast<int>(u);
      if (ji >= g) ji = g - 1;
      j[i] = ji;
      f[i] = u - ji;
    }
  }

  // Centered difference of values along axis a at node jc.
  double node_derivative(const int* jc, int a) const {
    const int g = grid_size;
    int up[4], dn[4];
    for (int i = 0; i < m; ++i) up[i] = dn[i] = jc[i];
    up[a] = jc[a] + 1 == g ? 0 : jc[a] + 1;
    dn[a] = jc[a] == 0 ? g - 1 : jc[a] - 1;
    return (values[flat_index(up)] - values[flat_index(dn)]) * (0.5 * g);
  }
};

}  // namespace abp
