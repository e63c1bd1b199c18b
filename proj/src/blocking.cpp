#include "coalguard/blocking.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

namespace coalguard {

bool BlockingMatrix::marked(std::size_t formula, AgentId agent) const {
  auto r = std::find(rows.begin(), rows.end(), formula);
  auto c = std::find(columns.begin(), columns.end(), agent);
  if (r == rows.end() || c == columns.end()) return false;
  return marks[static_cast<std::size_t>(r - rows.begin())][static_cast<std::size_t>(c - columns.begin())];
}

BlockingMatrix build_matrix(const Model& m, const SimulationReport& report) {
  BlockingMatrix mx;
  mx.rows = report.became_true;
  mx.columns = report.implicated_agents;
  mx.counters.assign(mx.columns.size(), 0);
  mx.marks.assign(mx.rows.size(), std::vector<bool>(mx.columns.size(), false));
  std::vector<bool> owns(m.agent_count());
  for (std::size_t r = 0; r < mx.rows.size(); ++r) {
    std::fill(owns.begin(), owns.end(), false);
    for (VarId v : m.formula_variables()[mx.rows[r]]) {
      if (auto owner = m.owner(v)) owns[index_of(*owner)] = true;
    }
    for (std::size_t c = 0; c < mx.columns.size(); ++c) {
      bool mark = owns[index_of(mx.columns[c])];
      mx.marks[r][c] = mark;
      if (mark) ++mx.counters[c];
    }
  }
  return mx;
}

std::vector<AgentId> rank_agents(const Model& m, const BlockingMatrix& mx, const Batch& batch, TieBreak tie_break) {
  if (mx.columns.empty() || mx.rows.empty()) {
    throw Error(ErrorKind::precondition, "rank_agents: empty matrix");
  }
  std::vector<std::size_t> first_seen(m.agent_count(), std::numeric_limits<std::size_t>::max());
  for (std::size_t i = batch.size(); i-- > 0;) first_seen[index_of(batch[i].agent)] = i;
  auto fifo_position = [&](AgentId a) { return first_seen[index_of(a)]; };
  std::vector<std::size_t> order(mx.columns.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (mx.counters[x] != mx.counters[y]) return mx.counters[x] > mx.counters[y];
    AgentId a = mx.columns[x];
    AgentId b = mx.columns[y];
    if (tie_break == TieBreak::fifo) {
      auto pa = fifo_position(a);
      auto pb = fifo_position(b);
      if (pa != pb) return pa < pb;
    }
    return m.name(a) < m.name(b);
  });
  std::vector<AgentId> ranking;
  ranking.reserve(order.size());
  for (std::size_t i : order) ranking.push_back(mx.columns[i]);
  return ranking;
}

BlockReport greedy_block(const Model& m, const SystemState& s, const Batch& batch, TieBreak tie_break) {
  BlockReport report;
  Batch current = batch;
  SimulationReport sim = simulate(m, s, current);
  report.initial_became_true = sim.became_true;
  report.initial_implicated = sim.implicated_agents;

  while (!sim.became_true.empty()) {
    GreedyStep step;
    step.became_true = sim.became_true;
    step.implicated = sim.implicated_agents;
    step.matrix = build_matrix(m, sim);
    if (step.matrix.columns.empty()) {
      // Nothing to pin the change on; fall back to blocking every remaining requester.
      for (AgentId a : requesting_agents(current)) report.blocked.push_back(a);
      current.clear();
      break;
    }
    step.ranking = rank_agents(m, step.matrix, batch, tie_break);
    step.chosen = step.ranking.front();
    report.blocked.push_back(step.chosen);
    current = without_agents(current, {step.chosen});
    report.greedy_steps.push_back(std::move(step));
    sim = simulate(m, s, current);
  }
  report.allowed = std::move(current);
  return report;
}

// ---------------------------------------------------------------------------
// Oracle

namespace {

std::vector<AgentId> sorted_unique(std::vector<AgentId> agents) {
  std::sort(agents.begin(), agents.end());
  agents.erase(std::unique(agents.begin(), agents.end()), agents.end());
  return agents;
}

std::vector<std::size_t> dispatch_order(std::size_t n, const ScanOptions& options) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (options.shuffle_seed) {
    std::mt19937_64 rng(*options.shuffle_seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  return order;
}

}  // namespace

OracleFrontier scan_oracle(const Model& m, const SystemState& s, const Batch& batch,
                           const std::vector<std::vector<AgentId>>& frontier, const ScanOptions& options) {
  std::vector<std::vector<AgentId>> children;
  for (const auto& member : frontier) {
    auto parent = sorted_unique(member);
    for (std::size_t drop = 0; drop < parent.size(); ++drop) {
      std::vector<AgentId> child;
      child.reserve(parent.size() - 1);
      for (std::size_t i = 0; i < parent.size(); ++i) {
        if (i != drop) child.push_back(parent[i]);
      }
      children.push_back(std::move(child));
    }
  }
  std::sort(children.begin(), children.end());
  children.erase(std::unique(children.begin(), children.end()), children.end());

  std::vector<std::size_t> counts(children.size(), 0);
  auto evaluate = [&](std::size_t i) {
    counts[i] = simulate(m, s, restricted_to(batch, children[i])).false_count;
  };
  const auto order = dispatch_order(children.size(), options);
  if (options.parallel && children.size() > 1) {
    const std::size_t workers =
        std::min<std::size_t>(children.size(), std::max(2U, std::thread::hardware_concurrency()));
    std::vector<std::future<void>> jobs;
    jobs.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t k = w; k < order.size(); k += workers) evaluate(order[k]);
      }));
    }
    for (auto& job : jobs) job.get();
  } else {
    for (std::size_t i : order) evaluate(i);
  }

  OracleFrontier out;
  if (children.empty()) return out;
  const std::size_t best = *std::max_element(counts.begin(), counts.end());
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (counts[i] == best) out.members.push_back(FrontierMember{children[i], counts[i]});
  }
  return out;
}

OracleFrontier scan_oracle(const Model& m, const SystemState& s, const Batch& batch, const std::vector<AgentId>& agents,
                           const ScanOptions& options) {
  return scan_oracle(m, s, batch, std::vector<std::vector<AgentId>>{agents}, options);
}

BlockReport nondet_block(const Model& m, const SystemState& s, const Batch& batch, std::uint64_t seed,
                         const ScanOptions& options) {
  BlockReport report;
  SimulationReport sim = simulate(m, s, batch);
  report.initial_became_true = sim.became_true;
  report.initial_implicated = sim.implicated_agents;
  if (sim.became_true.empty()) {
    report.allowed = batch;
    return report;
  }

  // Every requesting agent is a candidate, not only the implicated ones: an
  // uninvolved request can turn dangerous once others are withheld.
  const std::vector<AgentId> universe = sorted_unique(requesting_agents(batch));
  std::mt19937_64 rng(seed);
  std::vector<std::vector<AgentId>> frontier{universe};
  std::optional<std::vector<AgentId>> chosen;

  for (std::size_t level = 0; level < universe.size() && !chosen; ++level) {
    OracleStep step;
    step.frontier = scan_oracle(m, s, batch, frontier, options);
    if (step.frontier.members.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, step.frontier.members.size() - 1);
    step.representative = pick(rng);
    const auto& candidate = step.frontier.members[step.representative].agents;
    step.all_false = simulate(m, s, restricted_to(batch, candidate)).became_true.empty();
    if (step.all_false) chosen = candidate;
    frontier.clear();
    for (const auto& member : step.frontier.members) frontier.push_back(member.agents);
    report.oracle_steps.push_back(std::move(step));
  }

  const std::vector<AgentId> kept = chosen.value_or(std::vector<AgentId>{});
  for (AgentId a : universe) {
    if (!std::binary_search(kept.begin(), kept.end(), a)) report.blocked.push_back(a);
  }
  report.allowed = restricted_to(batch, kept);
  return report;
}

BlockReport brute_force_min_block(const Model& m, const SystemState& s, const Batch& batch) {
  const std::vector<AgentId> universe = sorted_unique(requesting_agents(batch));
  if (universe.size() > kBruteForceAgentBudget) {
    throw Error(ErrorKind::budget_exceeded, "brute force: " + std::to_string(universe.size()) +
                                                " requesting agents exceed budget of " +
                                                std::to_string(kBruteForceAgentBudget));
  }
  BlockReport report;
  SimulationReport sim = simulate(m, s, batch);
  report.initial_became_true = sim.became_true;
  report.initial_implicated = sim.implicated_agents;

  const std::size_t k = universe.size();
  std::optional<std::vector<AgentId>> best_blocked;
  std::vector<AgentId> best_kept;
  for (std::uint32_t mask = 0; mask < (1U << k); ++mask) {
    std::vector<AgentId> kept;
    std::vector<AgentId> blocked;
    for (std::size_t i = 0; i < k; ++i) ((mask >> i) & 1U ? kept : blocked).push_back(universe[i]);
    if (best_blocked && blocked.size() > best_blocked->size()) continue;
    if (!simulate(m, s, restricted_to(batch, kept)).became_true.empty()) continue;
    if (!best_blocked || blocked.size() < best_blocked->size() || blocked < *best_blocked) {
      best_blocked = std::move(blocked);
      best_kept = std::move(kept);
    }
  }
  report.blocked = best_blocked.value_or(universe);
  report.allowed = restricted_to(batch, best_kept);
  return report;
}

}  // namespace coalguard
