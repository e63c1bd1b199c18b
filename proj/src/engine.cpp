#include "coalguard/engine.hpp"

#include <algorithm>
#include <limits>

#include "coalguard/blocking.hpp"

namespace coalguard {

ActionQueue enqueue(const Model& m, ActionQueue q, AgentId agent, VarId variable, bool value) {
  if (index_of(variable) >= m.variable_count()) {
    throw Error(ErrorKind::unknown_variable, "enqueue: variable index out of range");
  }
  if (index_of(agent) >= m.agent_count()) {
    throw Error(ErrorKind::unknown_agent, "enqueue: agent index out of range");
  }
  if (m.owner(variable) != agent) {
    throw Error(ErrorKind::ownership_violation,
                "agent '" + m.name(agent) + "' does not control variable '" + m.name(variable) + "'");
  }
  q.pending_.push_back(ActionRequest{agent, variable, value, q.next_index_++});
  return q;
}

std::pair<Batch, ActionQueue> take_batch(ActionQueue q, std::size_t n) {
  const std::size_t count = std::min(n, q.pending_.size());
  Batch batch(q.pending_.begin(), q.pending_.begin() + static_cast<std::ptrdiff_t>(count));
  q.pending_.erase(q.pending_.begin(), q.pending_.begin() + static_cast<std::ptrdiff_t>(count));
  return {std::move(batch), std::move(q)};
}

SystemState apply_actions(const SystemState& s, const Batch& batch) {
  SystemState out = s;
  ++out.tick;
  // Batches come out of a FIFO, so iterating in order gives last-writer-wins.
  for (const auto& r : batch) out.valuation[index_of(r.variable)] = r.value;
  return out;
}

std::vector<AgentId> requesting_agents(const Batch& batch) {
  std::vector<AgentId> out;
  for (const auto& r : batch) {
    if (std::find(out.begin(), out.end(), r.agent) == out.end()) out.push_back(r.agent);
  }
  return out;
}

Batch without_agents(const Batch& batch, const std::vector<AgentId>& excluded) {
  Batch out;
  std::copy_if(batch.begin(), batch.end(), std::back_inserter(out), [&](const ActionRequest& r) {
    return std::find(excluded.begin(), excluded.end(), r.agent) == excluded.end();
  });
  return out;
}

Batch restricted_to(const Batch& batch, const std::vector<AgentId>& kept) {
  Batch out;
  std::copy_if(batch.begin(), batch.end(), std::back_inserter(out), [&](const ActionRequest& r) {
    return std::find(kept.begin(), kept.end(), r.agent) != kept.end();
  });
  return out;
}

SimulationReport simulate(const Model& m, const SystemState& s, const Batch& batch) {
  const auto& formulas = m.compiled();
  SimulationReport report;
  report.simulated_state = apply_actions(s, batch);
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    bool after = formulas[i].eval(report.simulated_state.valuation);
    if (!after) {
      ++report.false_count;
    } else if (!formulas[i].eval(s.valuation)) {
      report.became_true.push_back(i);
    }
  }
  if (report.became_true.empty()) return report;

  std::vector<bool> touches(m.variable_count(), false);
  for (std::size_t i : report.became_true) {
    for (VarId v : m.formula_variables()[i]) touches[index_of(v)] = true;
  }
  std::vector<bool> implicated(m.agent_count(), false);
  for (const auto& r : batch) {
    if (implicated[index_of(r.agent)]) continue;
    const auto& owned = m.controlled_by(r.agent);
    implicated[index_of(r.agent)] =
        std::any_of(owned.begin(), owned.end(), [&](VarId v) { return touches[index_of(v)]; });
  }
  for (std::size_t a = 0; a < implicated.size(); ++a) {
    if (implicated[a]) report.implicated_agents.push_back(AgentId(static_cast<std::uint32_t>(a)));
  }
  return report;
}

std::size_t resolve_batch_size(const Model& m, const EngineConfig& cfg) {
  if (cfg.max_actions_per_tick) return std::max<std::size_t>(*cfg.max_actions_per_tick, 1);
  if (m.critical_formulas().empty()) return std::numeric_limits<std::size_t>::max();
  return m.critical_formulas().size();
}

// ---------------------------------------------------------------------------
// BlockedRegistry

bool BlockedRegistry::is_blocked(AgentId a, std::uint64_t tick) const {
  auto it = blocked_until_.find(a);
  return it != blocked_until_.end() && tick < it->second;
}

void BlockedRegistry::block_indefinitely(AgentId a) {
  blocked_until_[a] = std::numeric_limits<std::uint64_t>::max();
}

void BlockedRegistry::register_blocked(const BlockingStrategy& strategy, std::uint64_t tick,
                                       const std::vector<AgentId>& agents, const Batch& their_requests) {
  for (AgentId a : agents) {
    switch (strategy.kind) {
      case BlockingStrategy::Kind::drop_tick: break;
      case BlockingStrategy::Kind::block_until_tick:
        blocked_until_[a] = std::max(blocked_until_[a], strategy.until_tick);
        break;
      case BlockingStrategy::Kind::block_for_random_interval: {
        std::uniform_int_distribution<std::uint64_t> dist(strategy.interval_lo,
                                                          std::max(strategy.interval_lo, strategy.interval_hi));
        // Blocked for the drawn number of ticks after this one.
        blocked_until_[a] = std::max(blocked_until_[a], tick + 1 + dist(rng_));
        break;
      }
      case BlockingStrategy::Kind::silent_freeze:
        for (const auto& r : their_requests) {
          if (r.agent == a) frozen_.insert({a, r.variable});
        }
        break;
    }
  }
}

// ---------------------------------------------------------------------------
// tick

TickResult tick(const Model& m, const SystemState& s, ActionQueue q, const EngineConfig& cfg,
                BlockedRegistry& registry) {
  TickRecord record;
  record.tick = s.tick;
  auto [taken, rest] = take_batch(std::move(q), resolve_batch_size(m, cfg));
  record.batch = taken;

  Batch live;
  for (const auto& r : taken) {
    if (cfg.blocking_strategy.kind == BlockingStrategy::Kind::silent_freeze && registry.is_frozen(r.agent, r.variable)) {
      registry.block_indefinitely(r.agent);
    }
  }
  for (const auto& r : taken) {
    (registry.is_blocked(r.agent, s.tick) ? record.suppressed : live).push_back(r);
  }

  switch (cfg.policy) {
    case Policy::none: record.executed = live; break;
    case Policy::greedy:
    case Policy::nondeterministic: {
      auto report = std::make_shared<BlockReport>(
          cfg.policy == Policy::greedy
              ? greedy_block(m, s, live, cfg.tie_break)
              : nondet_block(m, s, live, cfg.random_seed + s.tick,
                             ScanOptions{cfg.parallel_oracle, cfg.oracle_shuffle_seed}));
      record.blocked = report->blocked;
      record.executed = report->allowed;
      registry.register_blocked(cfg.blocking_strategy, s.tick, report->blocked, live);
      record.blocking = std::move(report);
      break;
    }
  }

  SystemState next = apply_actions(s, record.executed);
  record.valuation = next.valuation;
  record.secure = is_secure(m, next);
  return TickResult{std::move(next), std::move(rest), std::move(record)};
}

}  // namespace coalguard
