#pragma once

#include <functional>
#include <string>
#include <vector>

#include "abp/torus.hpp"

namespace abp {

// Smooth 1-periodic potential with an analytic gradient. Finite differences
// are used only as a test oracle, never in the integrators.
class Potential {
 public:
  using EvalFn = std::function<double(const double*)>;
  using GradFn = std::function<void(const double*, double*)>;

  Potential(int dim, std::string description, EvalFn eval, GradFn grad);

  int dim() const { return dim_; }
  const std::string& description() const { return description_; }

  double energy(const double* x) const { return eval_(x); }
  double energy(const TorusPoint& x) const { return eval_(x.coords.data()); }
  double energy(const std::vector<double>& x) const { return eval_(x.data()); }

  void gradient(const double* x, double* out) const { grad_(x, out); }
  std::vector<double> gradient(const TorusPoint& x) const {
    std::vector<double> g(static_cast<std::size_t>(dim_));
    grad_(x.coords.data(), g.data());
    return g;
  }

 private:
  int dim_;
  std::string description_;
  EvalFn eval_;
  GradFn grad_;
};

// Preset zoo. All live on T^2 with the first coordinate as the slow variable.
Potential uniform_potential(int dim = 2);
Potential separable_potential(double a1 = 1.0, double a2 = 0.5);
Potential double_well_potential(double h = 1.0, double c = 0.5,
                                double gamma = 0.25);

// Max over samples and coordinates of |analytic gradient - centered
// difference of the energy with step h|.
double potential_grad_check(const Potential& V,
                            const std::vector<TorusPoint>& samples, double h);

}  // namespace abp
