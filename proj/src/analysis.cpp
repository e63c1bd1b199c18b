#include "coalguard/analysis.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <queue>

namespace coalguard {

std::uint32_t vertex_of(const SystemState& s) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < s.valuation.size(); ++i) {
    if (s.valuation[i]) v |= 1U << i;
  }
  return v;
}

SystemState state_of(const StateGraph& g, std::uint32_t vertex) {
  SystemState s{0, std::vector<bool>(g.variable_count)};
  for (std::size_t i = 0; i < g.variable_count; ++i) s.valuation[i] = ((vertex >> i) & 1U) != 0;
  return s;
}

StateGraph build_state_graph(const Model& m) {
  const std::size_t n = m.variable_count();
  if (n > kStateGraphBudget) {
    throw Error(ErrorKind::budget_exceeded, "state graph: " + std::to_string(n) + " variables exceed budget of " +
                                                std::to_string(kStateGraphBudget));
  }
  StateGraph g;
  g.variable_count = n;
  const std::uint32_t count = 1U << n;
  g.secure.resize(count);
  for (std::uint32_t v = 0; v < count; ++v) g.secure[v] = is_secure(m, state_of(g, v));
  g.edges.reserve(n * (count / 2));
  for (std::uint32_t u = 0; u < count; ++u) {
    for (std::size_t k = 0; k < n; ++k) {
      std::uint32_t w = u ^ (1U << k);
      if (u < w) {
        VarId var{static_cast<std::uint32_t>(k)};
        g.edges.push_back(StateGraph::Edge{u, w, var, m.owner(var)});
      }
    }
  }
  return g;
}

bool is_connected_subset(std::size_t variable_count, const std::vector<bool>& members) {
  auto first = std::find(members.begin(), members.end(), true);
  if (first == members.end()) return true;
  std::vector<bool> seen(members.size(), false);
  std::queue<std::uint32_t> frontier;
  auto start = static_cast<std::uint32_t>(first - members.begin());
  seen[start] = true;
  frontier.push(start);
  std::size_t reached = 1;
  while (!frontier.empty()) {
    std::uint32_t u = frontier.front();
    frontier.pop();
    for (std::size_t k = 0; k < variable_count; ++k) {
      std::uint32_t w = u ^ (1U << k);
      if (members[w] && !seen[w]) {
        seen[w] = true;
        ++reached;
        frontier.push(w);
      }
    }
  }
  return reached == static_cast<std::size_t>(std::count(members.begin(), members.end(), true));
}

bool is_connected(const StateGraph& g, bool restrict_to_secure) {
  if (restrict_to_secure) return is_connected_subset(g.variable_count, g.secure);
  return is_connected_subset(g.variable_count, std::vector<bool>(g.vertex_count(), true));
}

std::optional<std::vector<SystemState>> secure_path(const StateGraph& g, const SystemState& from,
                                                     const SystemState& to) {
  const std::uint32_t source = vertex_of(from);
  const std::uint32_t target = vertex_of(to);
  if (source >= g.vertex_count() || target >= g.vertex_count() || !g.secure[source] || !g.secure[target]) {
    throw Error(ErrorKind::precondition, "secure_path: endpoints must be secure vertices");
  }
  constexpr std::uint32_t unvisited = 0xffffffffU;
  std::vector<std::uint32_t> parent(g.vertex_count(), unvisited);
  parent[source] = source;
  std::queue<std::uint32_t> frontier;
  frontier.push(source);
  while (!frontier.empty() && parent[target] == unvisited) {
    std::uint32_t u = frontier.front();
    frontier.pop();
    for (std::size_t k = 0; k < g.variable_count; ++k) {
      std::uint32_t w = u ^ (1U << k);
      if (g.secure[w] && parent[w] == unvisited) {
        parent[w] = u;
        frontier.push(w);
      }
    }
  }
  if (parent[target] == unvisited) return std::nullopt;
  std::vector<SystemState> path;
  for (std::uint32_t v = target;; v = parent[v]) {
    path.push_back(state_of(g, v));
    if (v == source) break;
  }
  std::reverse(path.begin(), path.end());
  for (std::size_t i = 0; i < path.size(); ++i) path[i].tick = from.tick + i;
  return path;
}

std::vector<AgentId> hidden_agents_H(const Model& m, const SystemState& s, const Formula& phi,
                                     const HornDisjunction& rewriting) {
  const CompiledFormula compiled(phi, m);
  if (compiled.eval(s.valuation)) {
    throw Error(ErrorKind::precondition, "hidden_agents_H: formula must be false at the state");
  }
  std::vector<bool> candidate(m.variable_count(), false);
  for (const auto& disjunct : rewriting.disjuncts) {
    for (const auto& name : vars_of(disjunct)) candidate[index_of(m.variable(name))] = true;
  }
  std::vector<bool> agent_hit(m.agent_count(), false);
  std::vector<bool> valuation = s.valuation;
  for (std::size_t v = 0; v < candidate.size(); ++v) {
    if (!candidate[v]) continue;
    valuation[v] = !valuation[v];
    if (compiled.eval(valuation)) {
      if (auto owner = m.owner(VarId(static_cast<std::uint32_t>(v)))) agent_hit[index_of(*owner)] = true;
    }
    valuation[v] = !valuation[v];
  }
  std::vector<AgentId> out;
  for (std::size_t a = 0; a < agent_hit.size(); ++a) {
    if (agent_hit[a]) out.push_back(AgentId(static_cast<std::uint32_t>(a)));
  }
  return out;
}

std::vector<AgentId> hidden_agents_H(const Model& m, const SystemState& s, const Formula& phi) {
  if (eval(phi, m, s)) {
    throw Error(ErrorKind::precondition, "hidden_agents_H: formula must be false at the state");
  }
  return hidden_agents_H(m, s, phi, to_horn_disjunction(phi, m));
}

std::vector<Vulnerability> audit_vulnerabilities(const Model& m, const SystemState& s) {
  const std::size_t n = m.agent_count();
  if (n > kAuditAgentBudget) {
    throw Error(ErrorKind::budget_exceeded, "audit: " + std::to_string(n) + " agents exceed budget of " +
                                                std::to_string(kAuditAgentBudget));
  }
  // Coalition masks ordered by size, then lexicographically by member list.
  std::vector<std::uint32_t> masks;
  for (std::uint32_t mask = 1; mask < (1U << n); ++mask) masks.push_back(mask);
  auto members_of = [&](std::uint32_t mask) {
    std::vector<AgentId> out;
    for (std::size_t a = 0; a < n; ++a) {
      if ((mask >> a) & 1U) out.push_back(AgentId(static_cast<std::uint32_t>(a)));
    }
    return out;
  };
  std::stable_sort(masks.begin(), masks.end(), [&](std::uint32_t a, std::uint32_t b) {
    int pa = std::popcount(a);
    int pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    return members_of(a) < members_of(b);
  });

  std::vector<Vulnerability> out;
  for (std::size_t i = 0; i < m.critical_formulas().size(); ++i) {
    const Formula& phi = m.critical_formulas()[i];
    std::vector<std::uint32_t> found;
    for (std::uint32_t mask : masks) {
      if (std::any_of(found.begin(), found.end(), [&](std::uint32_t f) { return (f & mask) == f; })) continue;
      auto coalition = members_of(mask);
      DiamondResult r = diamond_holds(m, s, coalition, phi);
      if (!r.holds) continue;
      found.push_back(mask);
      out.push_back(Vulnerability{i, std::move(coalition), std::move(*r.witness)});
    }
  }
  return out;
}

const char* to_string(LemmaReading reading) noexcept {
  return reading == LemmaReading::falsifying ? "falsifying" : "satisfying";
}

LemmaCheck check_connected_horn(const Formula& f, const std::vector<std::string>& variables, LemmaReading reading) {
  const std::size_t n = variables.size();
  if (n > kStateGraphBudget) throw Error(ErrorKind::budget_exceeded, "lemma check: too many variables");
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < n; ++i) position.emplace(variables[i], i);
  std::vector<bool> members(std::size_t{1} << n);
  for (std::uint32_t v = 0; v < members.size(); ++v) {
    bool value = eval_with(f, [&](const std::string& name) { return ((v >> position.at(name)) & 1U) != 0; });
    members[v] = reading == LemmaReading::satisfying ? value : !value;
  }
  LemmaCheck check;
  check.set_connected = is_connected_subset(n, members);
  check.horn_labeling_found = find_horn_labeling(f).has_value();
  return check;
}

std::string vertex_bits(const StateGraph& g, std::uint32_t vertex) {
  std::string bits(g.variable_count, '0');
  for (std::size_t k = 0; k < g.variable_count; ++k) {
    if ((vertex >> k) & 1U) bits[k] = '1';
  }
  return bits;
}

void write_edge_list(std::ostream& out, const StateGraph& g, const Model& m) {
  for (const auto& e : g.edges) {
    out << vertex_bits(g, e.u) << ' ' << vertex_bits(g, e.v) << ' '
        << (e.controller ? m.name(*e.controller) : std::string("-")) << '\n';
  }
}

}  // namespace coalguard
