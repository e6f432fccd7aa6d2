#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace abp::stats {

inline double mean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean: empty input");
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) throw std::invalid_argument("sample_sd: need >= 2 values");
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

inline double standard_error(const std::vector<double>& v) {
  return sample_sd(v) / std::sqrt(static_cast<double>(v.size()));
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty input");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("ls_slope: need matching inputs of size >= 2");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("ls_slope: degenerate abscissae");
  return sxy / sxx;
}

// Decreasing-trend test over the last `window` entries: the median of the
// last three must not exceed the median of the first three by more than
// `band`.
inline bool tail_decreasing(const std::vector<double>& v, int window, double band) {
  const int n = static_cast<int>(v.size());
  if (n < 2) return true;
  const int w = std::min(window, n);
  const int start = n - w;
  const int head = std::min(3, w);
  std::vector<double> first(v.begin() + start, v.begin() + start + head);
  std::vector<double> last(v.end() - head, v.end());
  return median(last) <= median(first) + band;
}

// Batch-means standard error of a ratio estimate sum(n_i)/sum(d_i) from
// per-batch increments, by the delta method.
inline double ratio_batch_se(const std::vector<double>& num_batches,
                             const std::vector<double>& den_batches) {
  const std::size_t b = num_batches.size();
  if (b != den_batches.size() || b < 2)
    throw std::invalid_argument("ratio_batch_se: need >= 2 matching batches");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    num += num_batches[i];
    den += den_batches[i];
  }
  if (den == 0.0) throw std::invalid_argument("ratio_batch_se: zero denominator");
  const double r = num / den;
  double acc = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    const double resid = num_batches[i] - r * den_batches[i];
    acc += resid * resid;
  }
  return std::sqrt(acc * static_cast<double>(b) / static_cast<double>(b - 1)) /
         std::abs(den);
}

}  // namespace abp::stats
