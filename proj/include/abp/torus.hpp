#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace abp {

// Reduce a real coordinate to [0,1).
inline double wrap_unit(double u) {
  double w = u - std::floor(u);
  if (w >= 1.0) w -= 1.0;  // guards against rounding at the seam
  return w;
}

// Representative of a displacement in [-1/2, 1/2).
inline double wrap_half(double u) {
  return u - std::floor(u + 0.5);
}

// A configuration on the flat torus: every coordinate lives in [0,1).
struct TorusPoint {
  std::vector<double> coords;

  TorusPoint() = default;
  explicit TorusPoint(std::vector<double> c) : coords(std::move(c)) {}

  int dim() const { return static_cast<int>(coords.size()); }
  double operator[](int i) const { return coords[static_cast<std::size_t>(i)]; }
};

inline TorusPoint wrap(const std::vector<double>& v) {
  TorusPoint p;
  p.coords.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]))
      throw std::invalid_argument("wrap: non-finite coordinate at index " +
                                  std::to_string(i));
    p.coords[i] = wrap_unit(v[i]);
  }
  return p;
}

// Shortest periodic displacement b - a, componentwise in [-1/2, 1/2).
inline std::vector<double> torus_displacement(const TorusPoint& a,
                                              const TorusPoint& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("torus_displacement: dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()) + ")");
  std::vector<double> d(a.coords.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = wrap_half(b.coords[i] - a.coords[i]);
  return d;
}

// Projection onto the first m coordinates (the slow variables).
struct ReactionCoordinate {
  int m;

  explicit ReactionCoordinate(int m_) : m(m_) {
    if (m < 1) throw std::invalid_argument("ReactionCoordinate: m must be >= 1");
  }

  void project(const double* x, double* z) const {
    for (int i = 0; i < m; ++i) z[i] = x[i];
  }

  std::vector<double> operator()(const TorusPoint& x) const {
    if (x.dim() <= m)
      throw std::invalid_argument("ReactionCoordinate: need m <= d-1");
    return std::vector<double>(x.coords.begin(), x.coords.begin() + m);
  }
};

}  // namespace abp
