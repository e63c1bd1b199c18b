#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "coalguard/model.hpp"

namespace coalguard {

/// A request by `agent` to set `variable` to `value`.
struct ActionRequest {
  AgentId agent{};
  VarId variable{};
  bool value = false;
  std::uint64_t arrival_index = 0;

  friend bool operator==(const ActionRequest&, const ActionRequest&) = default;
};

using Batch = std::vector<ActionRequest>;

/// FIFO of pending requests, ordered by arrival index.
class ActionQueue {
public:
  const std::deque<ActionRequest>& pending() const noexcept { return pending_; }
  std::size_t size() const noexcept { return pending_.size(); }
  bool empty() const noexcept { return pending_.empty(); }
  std::uint64_t next_arrival_index() const noexcept { return next_index_; }

  friend ActionQueue enqueue(const Model& m, ActionQueue q, AgentId agent, VarId variable, bool value);
  friend std::pair<Batch, ActionQueue> take_batch(ActionQueue q, std::size_t n);

private:
  std::deque<ActionRequest> pending_;
  std::uint64_t next_index_ = 0;
};

/// Appends a request at the tail with the next arrival index.
/// Throws Error(ownership_violation) unless `agent` controls `variable`.
ActionQueue enqueue(const Model& m, ActionQueue q, AgentId agent, VarId variable, bool value);

/// First min(n, |q|) requests in FIFO order, and the queue that remains.
std::pair<Batch, ActionQueue> take_batch(ActionQueue q, std::size_t n);

/// Executes `batch` on `s`: tick advances by one, each requested variable takes
/// its value (a later request on the same variable wins), nothing else changes.
SystemState apply_actions(const SystemState& s, const Batch& batch);

/// Distinct requesting agents in order of first appearance in `batch`.
std::vector<AgentId> requesting_agents(const Batch& batch);

/// Requests of `batch` whose agent is not in `excluded`.
Batch without_agents(const Batch& batch, const std::vector<AgentId>& excluded);

/// Requests of `batch` whose agent is in `kept`.
Batch restricted_to(const Batch& batch, const std::vector<AgentId>& kept);

struct SimulationReport {
  /// Indices into the model's critical formulas that are false at the input
  /// state and true after the batch.
  std::vector<std::size_t> became_true;
  /// Requesting agents controlling a variable of some formula in
  /// `became_true`, in model agent order.
  std::vector<AgentId> implicated_agents;
  /// Number of critical formulas false after the batch.
  std::size_t false_count = 0;
  SystemState simulated_state;
};

/// Hypothetical execution of `batch` at `s`; `s` is not modified.
SimulationReport simulate(const Model& m, const SystemState& s, const Batch& batch);

enum class Policy { none, greedy, nondeterministic };

enum class TieBreak {
  /// Earliest appearance in the tick's batch, then agent name.
  fifo,
  /// Agent name only.
  lexicographic,
};

/// What happens to an agent after a blocking method blocks it.
struct BlockingStrategy {
  enum class Kind {
    /// Drop the agent's requests for this tick only.
    drop_tick,
    /// Drop the agent's requests until the given tick (exclusive).
    block_until_tick,
    /// Drop the agent's requests for a random number of ticks in [lo, hi].
    block_for_random_interval,
    /// Drop silently; the agent is blocked indefinitely if it later asks to
    /// change the same variables again.
    silent_freeze,
  };

  Kind kind = Kind::drop_tick;
  std::uint64_t until_tick = 0;
  std::uint64_t interval_lo = 1;
  std::uint64_t interval_hi = 1;
  std::uint64_t seed = 0;
};

struct EngineConfig {
  /// nullopt means `auto`: |Phi|, or the whole queue when Phi is empty.
  std::optional<std::size_t> max_actions_per_tick;
  Policy policy = Policy::greedy;
  BlockingStrategy blocking_strategy;
  TieBreak tie_break = TieBreak::fifo;
  std::uint64_t random_seed = 0;
  /// Oracle subset simulations on worker threads, optionally dispatched in a
  /// shuffled order. Results do not depend on either setting.
  bool parallel_oracle = false;
  std::optional<std::uint64_t> oracle_shuffle_seed;
};

std::size_t resolve_batch_size(const Model& m, const EngineConfig& cfg);

/// Agents currently barred from acting, carried across ticks.
class BlockedRegistry {
public:
  explicit BlockedRegistry(std::uint64_t seed = 0) : rng_(seed) {}

  bool is_blocked(AgentId a, std::uint64_t tick) const;
  bool is_frozen(AgentId a, VarId v) const { return frozen_.contains({a, v}); }

  /// Registers agents blocked by a policy at `tick`, with the requests they had
  /// in that tick's batch.
  void register_blocked(const BlockingStrategy& strategy, std::uint64_t tick, const std::vector<AgentId>& agents,
                        const Batch& their_requests);
  void block_indefinitely(AgentId a);

private:
  std::map<AgentId, std::uint64_t> blocked_until_;
  std::set<std::pair<AgentId, VarId>> frozen_;
  std::mt19937_64 rng_;
};

struct BlockReport;

/// One entry of the run trace.
struct TickRecord {
  std::uint64_t tick = 0;
  Batch batch;
  /// Requests dropped before blocking because their agent was already barred.
  Batch suppressed;
  /// Blocking method output; absent with Policy::none.
  std::shared_ptr<const BlockReport> blocking;
  std::vector<AgentId> blocked;
  Batch executed;
  std::vector<bool> valuation;
  bool secure = true;
};

using RunTrace = std::vector<TickRecord>;

struct TickResult {
  SystemState state;
  ActionQueue queue;
  TickRecord record;
};

/// One clock tick: take a batch of n requests, drop those of barred agents,
/// run the configured blocking policy, execute what is allowed.
TickResult tick(const Model& m, const SystemState& s, ActionQueue q, const EngineConfig& cfg,
                BlockedRegistry& registry);

}  // namespace coalguard
