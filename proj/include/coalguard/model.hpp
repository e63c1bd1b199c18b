#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coalguard/formula.hpp"

namespace coalguard {

enum class AgentId : std::uint32_t {};
enum class VarId : std::uint32_t {};

constexpr std::size_t index_of(AgentId a) noexcept { return static_cast<std::size_t>(a); }
constexpr std::size_t index_of(VarId v) noexcept { return static_cast<std::size_t>(v); }

class Model;

/// Formula bound to a model: variable names resolved to indices and diamond
/// coalitions resolved to their controlled variables.
class CompiledFormula {
public:
  CompiledFormula(const Formula& f, const Model& m);

  bool eval(const std::vector<bool>& valuation) const;
  const std::vector<VarId>& variables() const noexcept { return vars_; }

private:
  struct Node {
    Formula::Kind kind;
    std::uint32_t a = 0;  // variable index, or first child
    std::uint32_t b = 0;  // second child
    std::vector<VarId> controlled;  // diamond: Vars|_C
  };
  std::uint32_t build(const Formula& f, const Model& m);
  bool eval_node(std::uint32_t i, std::vector<bool>& valuation) const;

  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;
  std::vector<VarId> vars_;
};

/// A system of propositional control: agents, variables, the ownership
/// partition and the ordered critical formulas.
///
/// Construction never rejects a malformed partition; call validate_model to
/// get the list of violations. Lookups on a doubly-owned variable resolve to
/// the first listed owner.
class Model {
public:
  using Partition = std::vector<std::pair<std::string, std::vector<std::string>>>;

  /// `variables` fixes the variable order (valuation and state-graph bit
  /// order). Agents keep the order of `partition`.
  Model(Partition partition, std::vector<std::string> variables, std::vector<Formula> critical);

  const std::vector<std::string>& agents() const noexcept { return agents_; }
  const std::vector<std::string>& variables() const noexcept { return variables_; }
  const Partition& partition() const noexcept { return partition_; }
  const std::vector<Formula>& critical_formulas() const noexcept { return critical_; }

  std::size_t agent_count() const noexcept { return agents_.size(); }
  std::size_t variable_count() const noexcept { return variables_.size(); }

  std::optional<AgentId> find_agent(const std::string& name) const;
  std::optional<VarId> find_variable(const std::string& name) const;
  /// Throw Error(unknown_agent / unknown_variable).
  AgentId agent(const std::string& name) const;
  VarId variable(const std::string& name) const;

  const std::string& name(AgentId a) const { return agents_.at(index_of(a)); }
  const std::string& name(VarId v) const { return variables_.at(index_of(v)); }

  /// Owner of `v`, or nullopt when no agent lists it.
  std::optional<AgentId> owner(VarId v) const { return owner_.at(index_of(v)); }
  /// Vars|_a, in model variable order.
  const std::vector<VarId>& controlled_by(AgentId a) const { return controlled_.at(index_of(a)); }

  /// Compiled critical formulas, index-aligned with critical_formulas().
  /// Throws Error(invalid_model) when a critical formula names an unknown
  /// identifier.
  const std::vector<CompiledFormula>& compiled() const;

  /// Per-formula variable sets, index-aligned with critical_formulas().
  const std::vector<std::vector<VarId>>& formula_variables() const { return formula_vars_; }

private:
  Partition partition_;
  std::vector<std::string> agents_;
  std::vector<std::string> variables_;
  std::vector<Formula> critical_;
  std::unordered_map<std::string, AgentId> agent_index_;
  std::unordered_map<std::string, VarId> variable_index_;
  std::vector<std::optional<AgentId>> owner_;
  std::vector<std::vector<VarId>> controlled_;
  std::vector<std::vector<VarId>> formula_vars_;
  std::vector<CompiledFormula> compiled_;
  std::string compile_error_;
};

/// Total valuation at a tick. `valuation[i]` is the value of variable i.
struct SystemState {
  std::uint64_t tick = 0;
  std::vector<bool> valuation;

  friend bool operator==(const SystemState&, const SystemState&) = default;
};

/// Builds a state from named values. Every model variable must be present.
SystemState make_state(const Model& m, const std::map<std::string, bool>& values, std::uint64_t tick = 0);

/// An assignment to the variables of a coalition (a C-valuation).
struct PartialValuation {
  std::vector<AgentId> coalition;
  std::vector<std::pair<VarId, bool>> assignment;

  friend bool operator==(const PartialValuation&, const PartialValuation&) = default;
};

/// Returns `s` with the witness values written over it.
SystemState apply_witness(const SystemState& s, const PartialValuation& w);

/// Truth value of `f` at `s`. A diamond holds iff some assignment to its
/// coalition's variables makes the operand true with everything else fixed.
/// Throws Error(unknown_variable / unknown_agent).
bool eval(const Formula& f, const Model& m, const SystemState& s);

/// Agents controlling at least one variable of `f`, in model agent order.
std::vector<AgentId> agents_of(const Formula& f, const Model& m);

AgentId controller_of(const Model& m, const std::string& variable);

bool is_secure(const Model& m, const SystemState& s);

inline constexpr std::size_t kDiamondBudget = 20;

struct DiamondResult {
  bool holds = false;
  std::optional<PartialValuation> witness;
};

/// Exhaustive search over all assignments to Vars|_C, in order of increasing
/// number of changed variables. Throws Error(budget_exceeded) beyond
/// kDiamondBudget controlled variables, Error(diamond_not_allowed) for a
/// nested diamond.
DiamondResult diamond_holds(const Model& m, const SystemState& s, const std::vector<AgentId>& coalition,
                            const Formula& f);

/// Satisfying-minterm rewriting of `f`; every variable must be known to `m`.
HornDisjunction to_horn_disjunction(const Formula& f, const Model& m);

enum class ViolationKind {
  empty_agents,
  empty_variables,
  uncovered_variable,
  doubly_owned,
  single_agent_formula,
  unknown_identifier,
};

const char* to_string(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  std::string subject;

  std::string describe() const;
};

struct ValidationOptions {
  /// Report formulas with fewer than two controlling agents as warnings.
  bool single_agent_formulas_are_warnings = false;
};

struct ValidationResult {
  std::vector<Violation> violations;
  std::vector<Violation> warnings;

  bool ok() const noexcept { return violations.empty(); }
};

ValidationResult validate_model(const Model& m, const ValidationOptions& options = {});

}  // namespace coalguard
