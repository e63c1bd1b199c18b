#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "coalguard/model.hpp"

namespace coalguard {

/// Hypercube over all valuations of a model. Vertex i has variable k set iff
/// bit k of i is set. Edges join vertices that differ in one variable and are
/// labeled with that variable's controller.
struct StateGraph {
  struct Edge {
    std::uint32_t u = 0;
    std::uint32_t v = 0;
    VarId variable{};
    std::optional<AgentId> controller;
  };

  std::size_t variable_count = 0;
  std::vector<bool> secure;
  std::vector<Edge> edges;

  std::size_t vertex_count() const noexcept { return secure.size(); }
};

inline constexpr std::size_t kStateGraphBudget = 16;

std::uint32_t vertex_of(const SystemState& s);
SystemState state_of(const StateGraph& g, std::uint32_t vertex);

/// Throws Error(budget_exceeded) beyond kStateGraphBudget variables.
StateGraph build_state_graph(const Model& m);

/// Connectivity of the whole graph or of its secure vertices only. Empty and
/// single-vertex sets count as connected.
bool is_connected(const StateGraph& g, bool restrict_to_secure);

/// Connectivity of an arbitrary vertex subset of the `variable_count`-cube.
bool is_connected_subset(std::size_t variable_count, const std::vector<bool>& members);

/// Shortest path of single-variable flips through secure vertices only.
/// Throws Error(precondition) when either endpoint is insecure.
std::optional<std::vector<SystemState>> secure_path(const StateGraph& g, const SystemState& from,
                                                     const SystemState& to);

/// Agents controlling a variable of some disjunct of `rewriting` whose single
/// flip at `s` makes `phi` true. Throws Error(precondition) unless `phi` is
/// false at `s`.
std::vector<AgentId> hidden_agents_H(const Model& m, const SystemState& s, const Formula& phi,
                                     const HornDisjunction& rewriting);

/// Same, with the canonical minterm rewriting of `phi`.
std::vector<AgentId> hidden_agents_H(const Model& m, const SystemState& s, const Formula& phi);

struct Vulnerability {
  std::size_t formula = 0;
  std::vector<AgentId> coalition;
  PartialValuation witness;
};

inline constexpr std::size_t kAuditAgentBudget = 12;

/// For every critical formula, all inclusion-minimal coalitions able to make
/// it true from `s`, by ascending size. Throws Error(budget_exceeded) beyond
/// kAuditAgentBudget agents.
std::vector<Vulnerability> audit_vulnerabilities(const Model& m, const SystemState& s);

/// Which vertex set the connected-implies-Horn check looks at.
enum class LemmaReading { falsifying, satisfying };

const char* to_string(LemmaReading reading) noexcept;

struct LemmaCheck {
  bool set_connected = false;
  bool horn_labeling_found = false;

  /// False only for a connected set without a Horn labeling.
  bool holds() const noexcept { return !set_connected || horn_labeling_found; }
};

/// Checks "connected state set implies renamable Horn" for one diamond-free
/// formula over `variables` (at most kStateGraphBudget).
LemmaCheck check_connected_horn(const Formula& f, const std::vector<std::string>& variables, LemmaReading reading);

/// One edge per line: "<bits> <bits> <agent>", bit k being variable k.
void write_edge_list(std::ostream& out, const StateGraph& g, const Model& m);

std::string vertex_bits(const StateGraph& g, std::uint32_t vertex);

}  // namespace coalguard
