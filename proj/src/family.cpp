#include "abp/family.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace abp {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxDim = 4;
constexpr int kMaxFreq = 24;

// All frequency vectors with given total frequency, first nonzero component
// positive, in lexicographic order.
std::vector<std::vector<int>> canonical_modes(int dim, int total_freq) {
  std::vector<std::vector<int>> result;
  std::vector<int> k(static_cast<std::size_t>(dim), -total_freq);
  while (true) {
    int sum = 0;
    for (int c : k) sum += std::abs(c);
    if (sum == total_freq) {
      int first = 0;
      for (int c : k)
        if (c != 0) {
          first = c;
          break;
        }
      if (first > 0) result.push_back(k);
    }
    int i = dim - 1;
    while (i >= 0 && k[static_cast<std::size_t>(i)] == total_freq) {
      k[static_cast<std::size_t>(i)] = -total_freq;
      --i;
    }
    if (i < 0) break;
    ++k[static_cast<std::size_t>(i)];
  }
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace

TestFunctionFamily::TestFunctionFamily(int dim, int count) : dim_(dim), max_freq_(0) {
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("TestFunctionFamily: dim must be in [1, 4]");
  if (count < 1)
    throw std::invalid_argument("TestFunctionFamily: count must be >= 1");
  for (int f = 1; static_cast<int>(modes_.size()) < count; ++f) {
    if (f > kMaxFreq)
      throw std::invalid_argument("TestFunctionFamily: count too large");
    for (const auto& k : canonical_modes(dim, f)) {
      modes_.push_back(k);
      sin_flag_.push_back(0);
      if (static_cast<int>(modes_.size()) == count) break;
      modes_.push_back(k);
      sin_flag_.push_back(1);
      if (static_cast<int>(modes_.size()) == count) break;
    }
  }
  for (const auto& k : modes_)
    for (int c : k) max_freq_ = std::max(max_freq_, std::abs(c));
}

void TestFunctionFamily::evaluate_all(const double* x, double* out) const {
  double ct[kMaxDim][kMaxFreq + 2];
  double st[kMaxDim][kMaxFreq + 2];
  for (int i = 0; i < dim_; ++i) {
    const double c1 = std::cos(kTwoPi * x[i]);
    const double s1 = std::sin(kTwoPi * x[i]);
    ct[i][0] = 1.0;
    st[i][0] = 0.0;
    ct[i][1] = c1;
    st[i][1] = s1;
    for (int q = 1; q < max_freq_; ++q) {
      ct[i][q + 1] = 2.0 * c1 * ct[i][q] - ct[i][q - 1];
      st[i][q + 1] = 2.0 * c1 * st[i][q] - st[i][q - 1];
    }
  }
  const int n = size();
  for (int idx = 0; idx < n; ++idx) {
    const std::vector<int>& k = modes_[static_cast<std::size_t>(idx)];
    double c = 1.0, s = 0.0;
    for (int i = 0; i < dim_; ++i) {
      const int q = k[static_cast<std::size_t>(i)];
      if (q == 0) continue;
      const int aq = q > 0 ? q : -q;
      const double ci = ct[i][aq];
      const double si = q > 0 ? st[i][aq] : -st[i][aq];
      const double cn = c * ci - s * si;
      s = c * si + s * ci;
      c = cn;
    }
    out[idx] = sin_flag_[static_cast<std::size_t>(idx)] ? s : c;
  }
}

double TestFunctionFamily::evaluate_one(int n, const double* x) const {
  const std::vector<int>& k = modes_[static_cast<std::size_t>(n)];
  double angle = 0.0;
  for (int i = 0; i < dim_; ++i) angle += k[static_cast<std::size_t>(i)] * x[i];
  angle *= kTwoPi;
  return sin_flag_[static_cast<std::size_t>(n)] ? std::sin(angle) : std::cos(angle);
}

}  // namespace abp
