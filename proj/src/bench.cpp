#include "coalguard/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "coalguard/blocking.hpp"

namespace coalguard {

BenchInstance make_bench_instance(std::size_t n, std::uint64_t seed) {
  Model::Partition partition;
  std::vector<std::string> variables;
  for (std::size_t i = 1; i <= n; ++i) {
    variables.push_back("x" + std::to_string(i));
    partition.emplace_back("a" + std::to_string(i), std::vector<std::string>{variables.back()});
  }
  Formula any = Formula::variable(variables.front());
  for (std::size_t i = 1; i < n; ++i) any = Formula::disjunction(any, Formula::variable(variables[i]));
  std::vector<Formula> formulas;
  for (std::size_t i = 0; i < n; ++i) formulas.push_back(Formula::conjunction(Formula::variable(variables[i]), any));

  Model model(std::move(partition), std::move(variables), std::move(formulas));
  SystemState state{0, std::vector<bool>(n, false)};

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  ActionQueue queue;
  for (std::size_t i : order) {
    auto id = static_cast<std::uint32_t>(i);
    queue = enqueue(model, std::move(queue), AgentId(id), VarId(id), true);
  }
  Batch batch = take_batch(std::move(queue), n).first;
  return BenchInstance{std::move(model), std::move(state), std::move(batch)};
}

double loglog_slope(const std::vector<BenchPoint>& points) {
  if (points.size() < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : points) {
    double x = std::log(static_cast<double>(p.n));
    double y = std::log(std::max(p.seconds, 1e-9));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(points.size());
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

BenchResult run_bench(const std::vector<std::size_t>& sizes, std::uint64_t seed, std::size_t repeats) {
  BenchResult result;
  for (std::size_t n : sizes) {
    BenchInstance instance = make_bench_instance(n, seed);
    BenchPoint point{n, 0.0, 0, 0};
    double best = INFINITY;
    for (std::size_t r = 0; r < std::max<std::size_t>(repeats, 1); ++r) {
      auto start = std::chrono::steady_clock::now();
      BlockReport report = greedy_block(instance.model, instance.state, instance.batch);
      std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      best = std::min(best, elapsed.count());
      point.iterations = report.greedy_steps.size();
      point.blocked = report.blocked.size();
    }
    point.seconds = best;
    result.points.push_back(point);
  }
  result.slope = loglog_slope(result.points);
  return result;
}

}  // namespace coalguard
