#include "abp/potential.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace abp {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Potential::Potential(int dim, std::string description, EvalFn eval, GradFn grad)
    : dim_(dim),
      description_(std::move(description)),
      eval_(std::move(eval)),
      grad_(std::move(grad)) {
  if (dim_ < 1) throw std::invalid_argument("Potential: dim must be >= 1");
  if (!eval_ || !grad_)
    throw std::invalid_argument("Potential: eval and grad are required");
}

Potential uniform_potential(int dim) {
  return Potential(
      dim, "uniform",
      [](const double*) { return 0.0; },
      [dim](const double*, double* g) {
        for (int i = 0; i < dim; ++i) g[i] = 0.0;
      });
}

// V(x) = a1 cos(2 pi x1) + a2 cos(2 pi x2); the free energy along x1 is
// a1 cos(2 pi z) up to an additive constant.
Potential separable_potential(double a1, double a2) {
  return Potential(
      2, "separable",
      [a1, a2](const double* x) {
        return a1 * std::cos(kTwoPi * x[0]) + a2 * std::cos(kTwoPi * x[1]);
      },
      [a1, a2](const double* x, double* g) {
        g[0] = -a1 * kTwoPi * std::sin(kTwoPi * x[0]);
        g[1] = -a2 * kTwoPi * std::sin(kTwoPi * x[1]);
      });
}

// V(x) = h cos(4 pi x1) + c cos(2 pi x2) + gamma cos(2 pi (x1 - x2)).
// Two wells along x1 (at 1/4 and 3/4) and a nontrivial x2 marginal.
Potential double_well_potential(double h, double c, double gamma) {
  return Potential(
      2, "double-well",
      [h, c, gamma](const double* x) {
        return h * std::cos(2.0 * kTwoPi * x[0]) + c * std::cos(kTwoPi * x[1]) +
               gamma * std::cos(kTwoPi * (x[0] - x[1]));
      },
      [h, c, gamma](const double* x, double* g) {
        const double cross = gamma * kTwoPi * std::sin(kTwoPi * (x[0] - x[1]));
        g[0] = -2.0 * h * kTwoPi * std::sin(2.0 * kTwoPi * x[0]) - cross;
        g[1] = -c * kTwoPi * std::sin(kTwoPi * x[1]) + cross;
      });
}

double potential_grad_check(const Potential& V,
                            const std::vector<TorusPoint>& samples, double h) {
  if (samples.empty())
    throw std::invalid_argument("potential_grad_check: empty sample list");
  if (!(h > 0.0) || h > 1e-2)
    throw std::invalid_argument("potential_grad_check: h must be in (0, 1e-2]");

  const int d = V.dim();
  std::vector<double> xp(static_cast<std::size_t>(d));
  std::vector<double> xm(static_cast<std::size_t>(d));
  std::vector<double> g(static_cast<std::size_t>(d));
  double worst = 0.0;
  for (const TorusPoint& s : samples) {
    V.gradient(s.coords.data(), g.data());
    for (int i = 0; i < d; ++i) {
      xp = s.coords;
      xm = s.coords;
      xp[static_cast<std::size_t>(i)] = wrap_unit(xp[static_cast<std::size_t>(i)] + h);
      xm[static_cast<std::size_t>(i)] = wrap_unit(xm[static_cast<std::size_t>(i)] - h);
      const double fd = (V.energy(xp.data()) - V.energy(xm.data())) / (2.0 * h);
      worst = std::max(worst, std::abs(g[static_cast<std::size_t>(i)] - fd));
    }
  }
  return worst;
}

}  // namespace abp
