#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "coalguard/engine.hpp"

namespace coalguard {

/// Rows are the formulas that became true, columns the implicated agents.
/// A cell is marked when the agent controls any variable of the formula, not
/// only the ones the batch changed.
struct BlockingMatrix {
  std::vector<std::size_t> rows;
  std::vector<AgentId> columns;
  std::vector<std::vector<bool>> marks;  // [row][column]
  std::vector<std::size_t> counters;     // per column

  bool marked(std::size_t formula, AgentId agent) const;
};

BlockingMatrix build_matrix(const Model& m, const SimulationReport& report);

/// Columns sorted by counter, descending; ties resolved by `tie_break`.
/// `batch` supplies FIFO positions. Throws Error(precondition) on an empty
/// matrix.
std::vector<AgentId> rank_agents(const Model& m, const BlockingMatrix& mx, const Batch& batch, TieBreak tie_break);

/// One pass of the greedy loop.
struct GreedyStep {
  std::vector<std::size_t> became_true;
  std::vector<AgentId> implicated;
  BlockingMatrix matrix;
  std::vector<AgentId> ranking;
  AgentId chosen{};
};

/// Agent subset (sorted by id) with the number of critical formulas that stay
/// false when only that subset acts.
struct FrontierMember {
  std::vector<AgentId> agents;
  std::size_t false_count = 0;

  friend bool operator==(const FrontierMember&, const FrontierMember&) = default;
};

/// Equal-cardinality subsets that tie on the best false count, sorted and
/// duplicate-free.
struct OracleFrontier {
  std::vector<FrontierMember> members;
};

/// One pass of the oracle loop.
struct OracleStep {
  OracleFrontier frontier;
  std::size_t representative = 0;  // index into frontier.members
  bool all_false = false;
};

struct BlockReport {
  /// In blocking order for the greedy method, sorted for the others.
  std::vector<AgentId> blocked;
  Batch allowed;
  /// Simulation of the full batch before anything was blocked.
  std::vector<std::size_t> initial_became_true;
  std::vector<AgentId> initial_implicated;
  std::vector<GreedyStep> greedy_steps;
  std::vector<OracleStep> oracle_steps;
};

/// Repeatedly simulates, builds the matrix and blocks the top-ranked agent
/// until no critical formula becomes true.
BlockReport greedy_block(const Model& m, const SystemState& s, const Batch& batch, TieBreak tie_break = TieBreak::fifo);

struct ScanOptions {
  /// Run subset simulations on worker threads.
  bool parallel = false;
  /// When set, subset simulations are dispatched in a shuffled order.
  std::optional<std::uint64_t> shuffle_seed;
};

/// Expands every frontier member into its subsets with one agent fewer,
/// simulates each (only agents of the subset act), and keeps those with the
/// largest false count. The reduction is independent of completion order.
OracleFrontier scan_oracle(const Model& m, const SystemState& s, const Batch& batch,
                           const std::vector<std::vector<AgentId>>& frontier, const ScanOptions& options = {});

/// Convenience overload for a single starting subset.
OracleFrontier scan_oracle(const Model& m, const SystemState& s, const Batch& batch, const std::vector<AgentId>& agents,
                           const ScanOptions& options = {});

/// Oracle-driven blocking: descend through frontiers of shrinking agent subsets
/// until one keeps every critical formula false, then block the rest. Choices
/// among tied frontier members come from a generator seeded with `seed`.
BlockReport nondet_block(const Model& m, const SystemState& s, const Batch& batch, std::uint64_t seed,
                         const ScanOptions& options = {});

inline constexpr std::size_t kBruteForceAgentBudget = 16;

/// Exhaustive search for a largest subset of requesting agents whose requests
/// keep every critical formula false. Among minimum blocked sets, returns the
/// lexicographically least by agent id. Throws Error(budget_exceeded).
BlockReport brute_force_min_block(const Model& m, const SystemState& s, const Batch& batch);

}  // namespace coalguard
