#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coalguard/error.hpp"

namespace coalguard {

/// Immutable propositional formula with the coalition modality.
///
/// The core tree has exactly five node kinds: top, variable, negation,
/// disjunction and diamond. Conjunction is sugar for ~(~a | ~b).
/// Nodes are shared, so copying a Formula is cheap.
class Formula {
public:
  enum class Kind { top, variable, negation, disjunction, diamond };

  static Formula top();
  static Formula variable(std::string name);
  static Formula negation(Formula child);
  static Formula disjunction(Formula left, Formula right);
  /// Coalition is stored sorted and duplicate-free; must be nonempty.
  static Formula diamond(std::vector<std::string> coalition, Formula child);
  static Formula conjunction(Formula left, Formula right);

  Kind kind() const noexcept;
  /// Variable name; only valid for Kind::variable.
  const std::string& name() const;
  /// Operand of negation or diamond.
  const Formula& child() const;
  const Formula& left() const;
  const Formula& right() const;
  /// Sorted coalition of a diamond node.
  const std::vector<std::string>& coalition() const;

  bool has_diamond() const;

  friend bool operator==(const Formula& a, const Formula& b);

private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Parses the surface syntax:
///   f ::= true | ident | ~f | f & f | f "|" f | <>{a, b, ...} f | ( f )
/// `~` and `<>{..}` bind tightest, then `&`, then `|`; binary operators are
/// left-associative. Throws SyntaxError.
Formula parse_formula(std::string_view text);

/// Renders the core tree in the syntax accepted by parse_formula.
std::string format(const Formula& f);

/// Variables of `f` in order of first appearance. Coalition members are agents,
/// not variables, and are not included.
std::vector<std::string> vars_of(const Formula& f);

/// Classical evaluation of a diamond-free formula under `lookup`.
/// Throws Error(diamond_not_allowed) on a diamond node.
bool eval_with(const Formula& f, const std::function<bool(const std::string&)>& lookup);

struct Literal {
  std::string variable;
  bool positive = true;

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// Sorted, duplicate-free, never contains both polarities of a variable.
using Clause = std::vector<Literal>;

/// Conjunction of clauses. An empty set is true; a set holding the empty
/// clause is false.
struct ClauseSet {
  std::vector<Clause> clauses;

  friend bool operator==(const ClauseSet&, const ClauseSet&) = default;
};

/// Equivalent CNF of a diamond-free formula. Tautological clauses are dropped
/// and subsumed clauses removed. Throws Error(diamond_not_allowed).
ClauseSet to_cnf(const Formula& f);

bool eval_clauses(const ClauseSet& cnf, const std::function<bool(const std::string&)>& lookup);

/// True iff every clause has at most one positive literal.
bool is_horn(const ClauseSet& cnf);

/// Variable -> flipped. Variables not present are treated as identity.
using HornLabeling = std::map<std::string, bool>;

/// Applies the labeling: every literal over a flipped variable changes polarity.
ClauseSet relabel(const ClauseSet& cnf, const HornLabeling& labeling);

/// Finds a labeling that makes `cnf` Horn via a 2-SAT reduction over pairwise
/// literal constraints inside each clause. Returns the identity labeling when
/// `cnf` is already Horn. Otherwise variables are decided in `variables` order,
/// each trying `flipped` first.
std::optional<HornLabeling> find_horn_labeling(const ClauseSet& cnf,
                                               const std::vector<std::string>& variables);

/// Same, on to_cnf(f), with labeling total over vars_of(f).
std::optional<HornLabeling> find_horn_labeling(const Formula& f);

/// Disjunction of Horn formulas equivalent to some source formula.
struct HornDisjunction {
  std::vector<Formula> disjuncts;
};

/// Maximum number of variables accepted by truth-table based routines.
inline constexpr std::size_t kTruthTableBudget = 16;

/// Expands `f` into its satisfying minterms over vars_of(f). Rows are
/// enumerated with the first variable as the most significant bit.
/// Throws Error(budget_exceeded) beyond kTruthTableBudget variables.
HornDisjunction minterm_expansion(const Formula& f);

/// Conjunction of `literals` (desugared); Top for an empty list.
Formula conjunction_of(const std::vector<Literal>& literals);

}  // namespace coalguard
