#pragma once

#include <vector>

namespace abp {

// Real trigonometric test functions on T^d: for each integer frequency
// vector k (ordered by total frequency, then lexicographically, constants
// excluded, one representative per {k,-k} pair) the family holds
// cos(2 pi k.x) and sin(2 pi k.x). All members have sup norm 1, and their
// averages against the uniform measure vanish.
class TestFunctionFamily {
 public:
  TestFunctionFamily(int dim, int count);

  int size() const { return static_cast<int>(modes_.size()); }
  int dim() const { return dim_; }
  int max_frequency() const { return max_freq_; }

  const std::vector<int>& mode(int n) const {
    return modes_[static_cast<std::size_t>(n)];
  }
  bool is_sin(int n) const { return sin_flag_[static_cast<std::size_t>(n)] != 0; }

  // Evaluate every member at x using per-dimension Chebyshev recurrences and
  // angle addition. The hot path of the occupation-measure update.
  void evaluate_all(const double* x, double* out) const;

  // Direct single-function evaluation through std::cos/std::sin; reference
  // path for tests.
  double evaluate_one(int n, const double* x) const;

  bool same_family(const TestFunctionFamily& other) const {
    return dim_ == other.dim_ && modes_ == other.modes_ &&
           sin_flag_ == other.sin_flag_;
  }

  // Index of the member with frequency vector k, or -1.
  int index_of(const std::vector<int>& k, bool sin_flag) const {
    for (std::size_t i = 0; i < modes_.size(); ++i)
      if (modes_[i] == k && (sin_flag_[i] != 0) == sin_flag)
        return static_cast<int>(i);
    return -1;
  }

 private:
  int dim_;
  int max_freq_;
  std::vector<std::vector<int>> modes_;
  std::vector<char> sin_flag_;
};

}  // namespace abp
