#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace abp::par {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

// Chunk size for deterministic reductions. Fixed, so the summation tree does
// not depend on the thread count.
inline constexpr std::size_t kChunk = 4096;

// Plain left-to-right fold. Reference path for tests and benchmarks.
template <class F>
double serial_sum(std::size_t n, F&& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += f(i);
  return acc;
}

// Sum of f(0..n-1). Chunks are accumulated independently (in parallel when
// OpenMP is enabled) and folded in chunk order; the result is identical for
// any thread count.
template <class F>
double chunked_sum(std::size_t n, F&& f) {
  if (n == 0) return 0.0;
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(nchunks, 0.0);
#pragma omp parallel for schedule(static)
  for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(n, lo + kChunk);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += f(i);
    partial[static_cast<std::size_t>(c)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

// Same scheme for k simultaneous accumulators. f(i, acc) must add the
// contribution of index i into acc[0..k-1].
template <class F>
std::vector<double> chunked_sum_multi(std::size_t n, std::size_t k, F&& f) {
  std::vector<double> total(k, 0.0);
  if (n == 0) return total;
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(nchunks * k, 0.0);
#pragma omp parallel for schedule(static)
  for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(n, lo + kChunk);
    double* acc = partial.data() + static_cast<std::size_t>(c) * k;
    for (std::size_t i = lo; i < hi; ++i) f(i, acc);
  }
  for (std::size_t c = 0; c < nchunks; ++c)
    for (std::size_t j = 0; j < k; ++j) total[j] += partial[c * k + j];
  return total;
}

template <class F>
void parallel_for(std::size_t n, F&& f) {
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    f(static_cast<std::size_t>(i));
}

}  // namespace abp::par
