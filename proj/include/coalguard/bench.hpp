#pragma once

#include <cstdint>
#include <vector>

#include "coalguard/engine.hpp"

namespace coalguard {

/// Synthetic worst case for the greedy method at size n: agent i owns x_i,
/// formula i is x_i & (x_1 | ... | x_n), every agent asks to raise its
/// variable. Every formula mentions every variable and the greedy loop has to
/// block all n agents one at a time.
struct BenchInstance {
  Model model;
  SystemState state;
  Batch batch;
};

/// `seed` permutes the arrival order of the requests.
BenchInstance make_bench_instance(std::size_t n, std::uint64_t seed);

struct BenchPoint {
  std::size_t n = 0;
  double seconds = 0.0;
  std::size_t iterations = 0;
  std::size_t blocked = 0;
};

struct BenchResult {
  std::vector<BenchPoint> points;
  /// Least-squares slope of log(seconds) against log(n).
  double slope = 0.0;
};

/// Times greedy_block on each size, best of `repeats` runs.
BenchResult run_bench(const std::vector<std::size_t>& sizes, std::uint64_t seed, std::size_t repeats = 3);

double loglog_slope(const std::vector<BenchPoint>& points);

}  // namespace coalguard
