#include "coalguard/model.hpp"

#include <algorithm>
#include <bit>
#include <set>

namespace coalguard {

// ---------------------------------------------------------------------------
// CompiledFormula

CompiledFormula::CompiledFormula(const Formula& f, const Model& m) {
  root_ = build(f, m);
  for (const auto& name : vars_of(f)) vars_.push_back(m.variable(name));
}

std::uint32_t CompiledFormula::build(const Formula& f, const Model& m) {
  Node node{f.kind()};
  switch (f.kind()) {
    case Formula::Kind::top: break;
    case Formula::Kind::variable: node.a = static_cast<std::uint32_t>(index_of(m.variable(f.name()))); break;
    case Formula::Kind::negation: node.a = build(f.child(), m); break;
    case Formula::Kind::disjunction:
      node.a = build(f.left(), m);
      node.b = build(f.right(), m);
      break;
    case Formula::Kind::diamond: {
      node.a = build(f.child(), m);
      std::vector<bool> in_coalition(m.agent_count(), false);
      for (const auto& agent : f.coalition()) in_coalition[index_of(m.agent(agent))] = true;
      for (std::size_t v = 0; v < m.variable_count(); ++v) {
        auto owner = m.owner(VarId(v));
        if (owner && in_coalition[index_of(*owner)]) node.controlled.push_back(VarId(v));
      }
      if (node.controlled.size() > kDiamondBudget) {
        throw Error(ErrorKind::budget_exceeded, "diamond coalition controls more than " +
                                                    std::to_string(kDiamondBudget) + " variables");
      }
      break;
    }
  }
  nodes_.push_back(std::move(node));
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

bool CompiledFormula::eval(const std::vector<bool>& valuation) const {
  bool has_diamond = std::any_of(nodes_.begin(), nodes_.end(),
                                 [](const Node& n) { return n.kind == Formula::Kind::diamond; });
  if (!has_diamond) return eval_node(root_, const_cast<std::vector<bool>&>(valuation));
  std::vector<bool> scratch = valuation;
  return eval_node(root_, scratch);
}

// Only diamond nodes write to `valuation`, and they restore it before returning.
bool CompiledFormula::eval_node(std::uint32_t i, std::vector<bool>& valuation) const {
  const Node& n = nodes_[i];
  switch (n.kind) {
    case Formula::Kind::top: return true;
    case Formula::Kind::variable: return valuation[n.a];
    case Formula::Kind::negation: return !eval_node(n.a, valuation);
    case Formula::Kind::disjunction: return eval_node(n.a, valuation) || eval_node(n.b, valuation);
    case Formula::Kind::diamond: {
      std::vector<bool> saved;
      saved.reserve(n.controlled.size());
      for (VarId v : n.controlled) saved.push_back(valuation[index_of(v)]);
      bool found = false;
      const std::uint64_t count = std::uint64_t{1} << n.controlled.size();
      for (std::uint64_t mask = 0; mask < count && !found; ++mask) {
        for (std::size_t k = 0; k < n.controlled.size(); ++k) {
          valuation[index_of(n.controlled[k])] = ((mask >> k) & 1U) != 0;
        }
        found = eval_node(n.a, valuation);
      }
      for (std::size_t k = 0; k < n.controlled.size(); ++k) valuation[index_of(n.controlled[k])] = saved[k];
      return found;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Model

Model::Model(Partition partition, std::vector<std::string> variables, std::vector<Formula> critical)
    : partition_(std::move(partition)), variables_(std::move(variables)), critical_(std::move(critical)) {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    variable_index_.emplace(variables_[i], VarId(static_cast<std::uint32_t>(i)));
  }
  owner_.assign(variables_.size(), std::nullopt);
  for (const auto& [agent, vars] : partition_) {
    AgentId id{static_cast<std::uint32_t>(agents_.size())};
    if (!agent_index_.emplace(agent, id).second) continue;
    agents_.push_back(agent);
    controlled_.emplace_back();
    for (const auto& v : vars) {
      auto it = variable_index_.find(v);
      if (it == variable_index_.end()) continue;
      if (!owner_[index_of(it->second)]) owner_[index_of(it->second)] = id;
    }
  }
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    if (owner_[v]) controlled_[index_of(*owner_[v])].push_back(VarId(static_cast<std::uint32_t>(v)));
  }
  for (const auto& f : critical_) {
    std::vector<VarId> ids;
    for (const auto& name : vars_of(f)) {
      if (auto id = find_variable(name)) ids.push_back(*id);
    }
    formula_vars_.push_back(std::move(ids));
  }
  try {
    for (const auto& f : critical_) compiled_.emplace_back(f, *this);
  } catch (const Error& e) {
    compiled_.clear();
    compile_error_ = e.what();
  }
}

std::optional<AgentId> Model::find_agent(const std::string& name) const {
  auto it = agent_index_.find(name);
  if (it == agent_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<VarId> Model::find_variable(const std::string& name) const {
  auto it = variable_index_.find(name);
  if (it == variable_index_.end()) return std::nullopt;
  return it->second;
}

AgentId Model::agent(const std::string& name) const {
  if (auto a = find_agent(name)) return *a;
  throw Error(ErrorKind::unknown_agent, "unknown agent '" + name + "'");
}

VarId Model::variable(const std::string& name) const {
  if (auto v = find_variable(name)) return *v;
  throw Error(ErrorKind::unknown_variable, "unknown variable '" + name + "'");
}

const std::vector<CompiledFormula>& Model::compiled() const {
  if (!compile_error_.empty()) throw Error(ErrorKind::invalid_model, compile_error_);
  return compiled_;
}

SystemState make_state(const Model& m, const std::map<std::string, bool>& values, std::uint64_t tick) {
  SystemState s{tick, std::vector<bool>(m.variable_count(), false)};
  for (const auto& [name, value] : values) s.valuation[index_of(m.variable(name))] = value;
  for (const auto& name : m.variables()) {
    if (!values.contains(name)) {
      throw Error(ErrorKind::unknown_variable, "state leaves variable '" + name + "' unassigned");
    }
  }
  return s;
}

SystemState apply_witness(const SystemState& s, const PartialValuation& w) {
  SystemState out = s;
  for (const auto& [v, value] : w.assignment) out.valuation[index_of(v)] = value;
  return out;
}

bool eval(const Formula& f, const Model& m, const SystemState& s) {
  return CompiledFormula(f, m).eval(s.valuation);
}

std::vector<AgentId> agents_of(const Formula& f, const Model& m) {
  std::set<std::size_t> owners;
  for (const auto& name : vars_of(f)) {
    if (auto owner = m.owner(m.variable(name))) owners.insert(index_of(*owner));
  }
  std::vector<AgentId> out;
  for (std::size_t a : owners) out.push_back(AgentId(static_cast<std::uint32_t>(a)));
  return out;
}

AgentId controller_of(const Model& m, const std::string& variable) {
  auto owner = m.owner(m.variable(variable));
  if (!owner) throw Error(ErrorKind::invalid_model, "variable '" + variable + "' has no controlling agent");
  return *owner;
}

bool is_secure(const Model& m, const SystemState& s) {
  const auto& compiled = m.compiled();
  return std::none_of(compiled.begin(), compiled.end(),
                      [&](const CompiledFormula& f) { return f.eval(s.valuation); });
}

DiamondResult diamond_holds(const Model& m, const SystemState& s, const std::vector<AgentId>& coalition,
                            const Formula& f) {
  if (f.has_diamond()) {
    throw Error(ErrorKind::diamond_not_allowed, "diamond_holds: operand must be diamond-free");
  }
  CompiledFormula compiled(f, m);
  std::vector<AgentId> members = coalition;
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());

  std::vector<VarId> controlled;
  for (AgentId a : members) {
    if (index_of(a) >= m.agent_count()) throw Error(ErrorKind::unknown_agent, "coalition member out of range");
    const auto& vars = m.controlled_by(a);
    controlled.insert(controlled.end(), vars.begin(), vars.end());
  }
  std::sort(controlled.begin(), controlled.end());
  if (controlled.size() > kDiamondBudget) {
    throw Error(ErrorKind::budget_exceeded, "coalition controls " + std::to_string(controlled.size()) +
                                                " variables, budget is " + std::to_string(kDiamondBudget));
  }

  // Flip masks relative to `s`, grouped by popcount so the first witness found
  // changes as few variables as possible.
  const std::size_t k = controlled.size();
  std::vector<bool> valuation = s.valuation;
  for (std::size_t flips = 0; flips <= k; ++flips) {
    std::uint64_t mask = (std::uint64_t{1} << flips) - 1;
    const std::uint64_t limit = std::uint64_t{1} << k;
    while (mask < limit) {
      for (std::size_t i = 0; i < k; ++i) {
        bool flip = ((mask >> i) & 1U) != 0;
        valuation[index_of(controlled[i])] = s.valuation[index_of(controlled[i])] != flip;
      }
      if (compiled.eval(valuation)) {
        PartialValuation w{members, {}};
        for (VarId v : controlled) w.assignment.emplace_back(v, valuation[index_of(v)]);
        return DiamondResult{true, std::move(w)};
      }
      if (mask == 0) break;
      // Gosper's hack: next mask with the same popcount.
      std::uint64_t c = mask & (~mask + 1);
      std::uint64_t r = mask + c;
      mask = (((r ^ mask) >> 2) / c) | r;
    }
  }
  return DiamondResult{false, std::nullopt};
}

HornDisjunction to_horn_disjunction(const Formula& f, const Model& m) {
  for (const auto& name : vars_of(f)) (void)m.variable(name);
  return minterm_expansion(f);
}

// ---------------------------------------------------------------------------
// Validation

const char* to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::empty_agents: return "EmptyAgents";
    case ViolationKind::empty_variables: return "EmptyVariables";
    case ViolationKind::uncovered_variable: return "UncoveredVariable";
    case ViolationKind::doubly_owned: return "DoublyOwned";
    case ViolationKind::single_agent_formula: return "SingleAgentFormula";
    case ViolationKind::unknown_identifier: return "UnknownIdentifier";
  }
  return "Unknown";
}

std::string Violation::describe() const { return std::string(to_string(kind)) + "(" + subject + ")"; }

namespace {

void check_identifiers(const Formula& f, const Model& m, std::vector<Violation>& out) {
  switch (f.kind()) {
    case Formula::Kind::top: return;
    case Formula::Kind::variable:
      if (!m.find_variable(f.name())) out.push_back({ViolationKind::unknown_identifier, f.name()});
      return;
    case Formula::Kind::negation: check_identifiers(f.child(), m, out); return;
    case Formula::Kind::disjunction:
      check_identifiers(f.left(), m, out);
      check_identifiers(f.right(), m, out);
      return;
    case Formula::Kind::diamond:
      for (const auto& a : f.coalition()) {
        if (!m.find_agent(a)) out.push_back({ViolationKind::unknown_identifier, a});
      }
      check_identifiers(f.child(), m, out);
      return;
  }
}

}  // namespace

ValidationResult validate_model(const Model& m, const ValidationOptions& options) {
  ValidationResult result;
  auto& out = result.violations;
  if (m.partition().empty()) out.push_back({ViolationKind::empty_agents, "agents"});
  if (m.variables().empty()) out.push_back({ViolationKind::empty_variables, "variables"});

  std::set<std::string> seen_agents;
  std::map<std::string, int> ownership;
  for (const auto& [agent, vars] : m.partition()) {
    if (!seen_agents.insert(agent).second) out.push_back({ViolationKind::unknown_identifier, agent});
    for (const auto& v : vars) {
      if (!m.find_variable(v)) {
        out.push_back({ViolationKind::unknown_identifier, v});
        continue;
      }
      ++ownership[v];
    }
  }
  for (const auto& v : m.variables()) {
    auto it = ownership.find(v);
    if (it == ownership.end()) {
      out.push_back({ViolationKind::uncovered_variable, v});
    } else if (it->second > 1) {
      out.push_back({ViolationKind::doubly_owned, v});
    }
  }

  for (std::size_t i = 0; i < m.critical_formulas().size(); ++i) {
    const Formula& f = m.critical_formulas()[i];
    std::size_t before = out.size();
    check_identifiers(f, m, out);
    if (out.size() != before) continue;
    std::set<std::size_t> owners;
    for (VarId v : m.formula_variables()[i]) {
      if (auto a = m.owner(v)) owners.insert(index_of(*a));
    }
    if (owners.size() < 2) {
      Violation v{ViolationKind::single_agent_formula, "phi" + std::to_string(i + 1) + ": " + format(f)};
      (options.single_agent_formulas_are_warnings ? result.warnings : out).push_back(std::move(v));
    }
  }
  return result;
}

}  // namespace coalguard
