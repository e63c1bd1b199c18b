#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coalguard/analysis.hpp"
#include "coalguard/blocking.hpp"
#include "coalguard/engine.hpp"

namespace coalguard {

/// A model, its starting state, the pending requests and the engine setup.
struct Scenario {
  Model model;
  SystemState initial;
  ActionQueue queue;
  EngineConfig config;
};

struct LoadOptions {
  bool allow_insecure_start = false;
  /// Downgrade "formula controlled by a single agent" to a warning.
  bool allow_single_agent_formulas = false;
};

/// Parses a scenario document (JSON):
///
///   {
///     "agents":   {"a1": ["v1", "v7"], ...},
///     "formulas": ["v1 & v2", ...],
///     "initial":  {"v1": false, ...},          // key order = variable order
///     "queue":    [{"agent": "a1", "var": "v1", "value": true}, ...],
///     "config":   {"max_actions_per_tick": "auto" | n,
///                  "policy": "none" | "greedy" | "nondeterministic",
///                  "blocking_strategy": "drop_tick" | {"kind": ..., ...},
///                  "tie_break": "fifo" | "lexicographic",
///                  "seed": n}
///   }
///
/// Throws Error: syntax (with location), invalid_model (all violations
/// listed), insecure_start, ownership_violation.
Scenario parse_scenario(const std::string& text, const LoadOptions& options = {});
Scenario load_scenario(const std::filesystem::path& path, const LoadOptions& options = {});

std::string formula_label(std::size_t index);

struct RunOptions {
  std::size_t ticks = 1;
  std::optional<Policy> policy;
  std::optional<std::uint64_t> seed;
};

struct RunResult {
  RunTrace trace;
  SystemState final_state;
  bool all_secure = true;
};

RunResult run_scenario(const Scenario& scenario, const RunOptions& options);

/// One JSON object per line, keys: tick, batch, suppressed, iterations,
/// blocked, executed, valuation, secure.
void write_trace(std::ostream& out, const Model& m, const RunTrace& trace);
std::string trace_record_json(const Model& m, const TickRecord& record);

/// Replays the executed actions of a trace from the scenario's initial state.
/// Returns an empty string when every recorded valuation is reproduced,
/// otherwise a description of the first mismatch.
std::string check_trace_replay(const Scenario& scenario, std::istream& trace);

struct AnalyzeOptions {
  bool state_graph = true;
  bool horn = true;
  bool audit = true;
  std::optional<std::filesystem::path> edge_list;
  LemmaReading reading = LemmaReading::falsifying;
};

/// Human-readable analysis report.
std::string analyze_scenario(const Scenario& scenario, const AnalyzeOptions& options);

Policy parse_policy(const std::string& text);
const char* to_string(Policy policy) noexcept;

}  // namespace coalguard
