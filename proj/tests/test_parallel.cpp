#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "abp/parallel.hpp"
#include "abp/rng.hpp"

using namespace abp;

TEST_CASE("chunked_sum matches the serial fold") {
  GaussianRng rng(42);
  const std::size_t n = 100000;
  std::vector<double> data(n);
  for (double& v : data) v = rng.normal();
  const auto f = [&](std::size_t i) { return data[i]; };
  const double serial = par::serial_sum(n, f);
  const double chunked = par::chunked_sum(n, f);
  CHECK(std::abs(serial - chunked) < 1e-10 * (1.0 + std::abs(serial)));
}

TEST_CASE("chunked_sum is independent of the thread count") {
  const std::size_t n = 300001;
  const auto f = [](std::size_t i) {
    return std::sin(0.001 * static_cast<double>(i));
  };
  par::set_threads(1);
  const double one = par::chunked_sum(n, f);
  par::set_threads(4);
  const double four = par::chunked_sum(n, f);
  CHECK(one == four);  // bitwise: fixed chunking, ordered fold
}

TEST_CASE("chunked_sum_multi matches per-component sums") {
  const std::size_t n = 50000;
  const auto f = [](std::size_t i, double* acc) {
    acc[0] += std::cos(0.01 * static_cast<double>(i));
    acc[1] += 1.0;
  };
  const std::vector<double> acc = par::chunked_sum_multi(n, 2, f);
  CHECK(acc[1] == static_cast<double>(n));
  const double ref = par::serial_sum(
      n, [](std::size_t i) { return std::cos(0.01 * static_cast<double>(i)); });
  CHECK(std::abs(acc[0] - ref) < 1e-10 * (1.0 + std::abs(ref)));
}

TEST_CASE("parallel_for visits every index once") {
  const std::size_t n = 10000;
  std::vector<int> hits(n, 0);
  par::parallel_for(n, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("empty reductions") {
  CHECK(par::chunked_sum(0, [](std::size_t) { return 1.0; }) == 0.0);
  CHECK(par::serial_sum(0, [](std::size_t) { return 1.0; }) == 0.0);
}
