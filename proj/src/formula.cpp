#include "coalguard/formula.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>
#include <utility>

namespace coalguard {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::syntax: return "SyntaxError";
    case ErrorKind::empty_coalition: return "EmptyCoalition";
    case ErrorKind::unknown_variable: return "UnknownVariable";
    case ErrorKind::unknown_agent: return "UnknownAgent";
    case ErrorKind::diamond_not_allowed: return "DiamondNotAllowed";
    case ErrorKind::budget_exceeded: return "BudgetExceeded";
    case ErrorKind::ownership_violation: return "OwnershipViolation";
    case ErrorKind::invalid_model: return "InvalidModel";
    case ErrorKind::insecure_start: return "InsecureStart";
    case ErrorKind::precondition: return "PreconditionViolated";
    case ErrorKind::io: return "IoError";
  }
  return "Unknown";
}

struct Formula::Node {
  Kind kind;
  std::string name;
  std::vector<std::string> coalition;
  std::optional<Formula> first;
  std::optional<Formula> second;
};

Formula Formula::top() {
  static const Formula t{std::make_shared<const Node>(Node{Kind::top, {}, {}, {}, {}})};
  return t;
}

Formula Formula::variable(std::string name) {
  if (name.empty()) {
    throw Error(ErrorKind::syntax, "variable name must be nonempty");
  }
  return Formula{std::make_shared<const Node>(Node{Kind::variable, std::move(name), {}, {}, {}})};
}

Formula Formula::negation(Formula child) {
  return Formula{std::make_shared<const Node>(Node{Kind::negation, {}, {}, std::move(child), {}})};
}

Formula Formula::disjunction(Formula left, Formula right) {
  return Formula{
      std::make_shared<const Node>(Node{Kind::disjunction, {}, {}, std::move(left), std::move(right)})};
}

Formula Formula::diamond(std::vector<std::string> coalition, Formula child) {
  std::sort(coalition.begin(), coalition.end());
  coalition.erase(std::unique(coalition.begin(), coalition.end()), coalition.end());
  if (coalition.empty()) {
    throw Error(ErrorKind::empty_coalition, "diamond coalition must be nonempty");
  }
  return Formula{
      std::make_shared<const Node>(Node{Kind::diamond, {}, std::move(coalition), std::move(child), {}})};
}

Formula Formula::conjunction(Formula left, Formula right) {
  return negation(disjunction(negation(std::move(left)), negation(std::move(right))));
}

Formula::Kind Formula::kind() const noexcept { return node_->kind; }
const std::string& Formula::name() const { return node_->name; }
const Formula& Formula::child() const { return *node_->first; }
const Formula& Formula::left() const { return *node_->first; }
const Formula& Formula::right() const { return *node_->second; }
const std::vector<std::string>& Formula::coalition() const { return node_->coalition; }

bool Formula::has_diamond() const {
  switch (kind()) {
    case Kind::top:
    case Kind::variable: return false;
    case Kind::negation: return child().has_diamond();
    case Kind::disjunction: return left().has_diamond() || right().has_diamond();
    case Kind::diamond: return true;
  }
  return false;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Formula::Kind::top: return true;
    case Formula::Kind::variable: return a.name() == b.name();
    case Formula::Kind::negation: return a.child() == b.child();
    case Formula::Kind::disjunction: return a.left() == b.left() && a.right() == b.right();
    case Formula::Kind::diamond: return a.coalition() == b.coalition() && a.child() == b.child();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  Formula parse() {
    Formula f = disjunction();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

private:
  Formula disjunction() {
    Formula f = conjunction();
    while (accept('|')) f = Formula::disjunction(std::move(f), conjunction());
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (accept('&')) f = Formula::conjunction(std::move(f), unary());
    return f;
  }

  Formula unary() {
    skip_ws();
    if (accept('~')) return Formula::negation(unary());
    if (text_.substr(pos_, 2) == "<>") {
      pos_ += 2;
      auto agents = coalition();
      return Formula::diamond(std::move(agents), unary());
    }
    if (accept('(')) {
      Formula f = disjunction();
      expect(')');
      return f;
    }
    if (pos_ < text_.size() && is_ident_start(text_[pos_])) {
      std::string id = identifier();
      if (id == "true") return Formula::top();
      return Formula::variable(std::move(id));
    }
    if (pos_ == text_.size()) fail("unexpected end of input");
    fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
  }

  std::vector<std::string> coalition() {
    expect('{');
    std::size_t open = pos_ - 1;
    std::vector<std::string> agents;
    skip_ws();
    if (accept('}')) {
      throw SyntaxError(ErrorKind::empty_coalition, open, "empty coalition braces");
    }
    do {
      skip_ws();
      if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) fail("expected agent identifier");
      agents.push_back(identifier());
    } while (accept(','));
    expect('}');
    return agents;
  }

  std::string identifier() {
    std::size_t begin = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(begin, pos_ - begin));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw SyntaxError(ErrorKind::syntax, pos_, message);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void format_into(const Formula& f, std::string& out);

void format_operand(const Formula& f, std::string& out, bool parenthesize_disjunction) {
  if (parenthesize_disjunction && f.kind() == Formula::Kind::disjunction) {
    out += '(';
    format_into(f, out);
    out += ')';
  } else {
    format_into(f, out);
  }
}

void format_into(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case Formula::Kind::top: out += "true"; break;
    case Formula::Kind::variable: out += f.name(); break;
    case Formula::Kind::negation:
      out += '~';
      format_operand(f.child(), out, true);
      break;
    case Formula::Kind::disjunction:
      format_operand(f.left(), out, false);
      out += " | ";
      format_operand(f.right(), out, true);
      break;
    case Formula::Kind::diamond: {
      out += "<>{";
      for (std::size_t i = 0; i < f.coalition().size(); ++i) {
        if (i) out += ',';
        out += f.coalition()[i];
      }
      out += '}';
      format_operand(f.child(), out, true);
      break;
    }
  }
}

void collect_vars(const Formula& f, std::vector<std::string>& out, std::unordered_set<std::string>& seen) {
  switch (f.kind()) {
    case Formula::Kind::top: return;
    case Formula::Kind::variable:
      if (seen.insert(f.name()).second) out.push_back(f.name());
      return;
    case Formula::Kind::negation:
    case Formula::Kind::diamond: collect_vars(f.child(), out, seen); return;
    case Formula::Kind::disjunction:
      collect_vars(f.left(), out, seen);
      collect_vars(f.right(), out, seen);
      return;
  }
}

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(text).parse(); }

std::string format(const Formula& f) {
  std::string out;
  format_into(f, out);
  return out;
}

std::vector<std::string> vars_of(const Formula& f) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  collect_vars(f, out, seen);
  return out;
}

bool eval_with(const Formula& f, const std::function<bool(const std::string&)>& lookup) {
  switch (f.kind()) {
    case Formula::Kind::top: return true;
    case Formula::Kind::variable: return lookup(f.name());
    case Formula::Kind::negation: return !eval_with(f.child(), lookup);
    case Formula::Kind::disjunction: return eval_with(f.left(), lookup) || eval_with(f.right(), lookup);
    case Formula::Kind::diamond:
      throw Error(ErrorKind::diamond_not_allowed, "diamond requires a model to evaluate");
  }
  return false;
}

// ---------------------------------------------------------------------------
// CNF

namespace {

using Clauses = std::vector<Clause>;

// Merges two sorted clauses; nullopt when the result is tautological.
std::optional<Clause> merge(const Clause& a, const Clause& b) {
  Clause out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].variable == out[i - 1].variable) return std::nullopt;
  }
  return out;
}

void simplify(Clauses& clauses) {
  std::sort(clauses.begin(), clauses.end(), [](const Clause& a, const Clause& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  clauses.erase(std::unique(clauses.begin(), clauses.end()), clauses.end());
  Clauses kept;
  for (auto& c : clauses) {
    bool subsumed = std::any_of(kept.begin(), kept.end(), [&](const Clause& k) {
      return std::includes(c.begin(), c.end(), k.begin(), k.end());
    });
    if (!subsumed) kept.push_back(std::move(c));
  }
  std::sort(kept.begin(), kept.end());
  clauses = std::move(kept);
}

Clauses product(const Clauses& a, const Clauses& b) {
  Clauses out;
  for (const auto& x : a) {
    for (const auto& y : b) {
      if (auto m = merge(x, y)) out.push_back(std::move(*m));
    }
  }
  simplify(out);
  return out;
}

Clauses cnf_of(const Formula& f, bool negated) {
  switch (f.kind()) {
    case Formula::Kind::top:
      return negated ? Clauses{Clause{}} : Clauses{};
    case Formula::Kind::variable:
      return Clauses{Clause{Literal{f.name(), !negated}}};
    case Formula::Kind::negation:
      return cnf_of(f.child(), !negated);
    case Formula::Kind::disjunction: {
      Clauses l = cnf_of(f.left(), negated);
      Clauses r = cnf_of(f.right(), negated);
      if (!negated) return product(l, r);
      l.insert(l.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
      simplify(l);
      return l;
    }
    case Formula::Kind::diamond:
      throw Error(ErrorKind::diamond_not_allowed, "to_cnf: diamond node present");
  }
  return {};
}

}  // namespace

ClauseSet to_cnf(const Formula& f) { return ClauseSet{cnf_of(f, false)}; }

bool eval_clauses(const ClauseSet& cnf, const std::function<bool(const std::string&)>& lookup) {
  return std::all_of(cnf.clauses.begin(), cnf.clauses.end(), [&](const Clause& c) {
    return std::any_of(c.begin(), c.end(),
                       [&](const Literal& l) { return lookup(l.variable) == l.positive; });
  });
}

bool is_horn(const ClauseSet& cnf) {
  return std::all_of(cnf.clauses.begin(), cnf.clauses.end(), [](const Clause& c) {
    return std::count_if(c.begin(), c.end(), [](const Literal& l) { return l.positive; }) <= 1;
  });
}

ClauseSet relabel(const ClauseSet& cnf, const HornLabeling& labeling) {
  ClauseSet out;
  out.clauses.reserve(cnf.clauses.size());
  for (const auto& c : cnf.clauses) {
    Clause r = c;
    for (auto& l : r) {
      auto it = labeling.find(l.variable);
      if (it != labeling.end() && it->second) l.positive = !l.positive;
    }
    std::sort(r.begin(), r.end());
    out.clauses.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Renamable Horn via 2-SAT
//
// Boolean unknown f_x = "x is flipped". A literal over x is positive after
// relabeling iff (positive XOR f_x). Within each clause no two literals may be
// positive at once, which is a binary clause over the unknowns.

namespace {

class TwoSat {
public:
  explicit TwoSat(std::size_t n) : implications_(2 * n), value_(n, -1) {}

  // Literal encoding: 2*v means "v true", 2*v+1 means "v false".
  static std::size_t lit(std::size_t v, bool value) { return 2 * v + (value ? 0 : 1); }

  void add_clause(std::size_t a, std::size_t b) {
    implications_[a ^ 1].push_back(b);
    implications_[b ^ 1].push_back(a);
  }

  // Decides variables in index order preferring `true`; propagation after each
  // decision keeps the residual problem satisfiable iff the original is.
  std::optional<std::vector<bool>> solve() {
    for (std::size_t v = 0; v < value_.size(); ++v) {
      if (value_[v] != -1) continue;
      if (!assume(lit(v, true)) && !assume(lit(v, false))) return std::nullopt;
    }
    std::vector<bool> out(value_.size());
    for (std::size_t v = 0; v < value_.size(); ++v) out[v] = value_[v] == 1;
    return out;
  }

private:
  bool is_true(std::size_t l) const {
    int v = value_[l / 2];
    return v != -1 && (v == 1) == (l % 2 == 0);
  }
  bool is_false(std::size_t l) const { return is_true(l ^ 1); }

  bool assume(std::size_t l) {
    std::vector<std::size_t> trail;
    std::vector<std::size_t> stack{l};
    bool ok = true;
    while (!stack.empty() && ok) {
      std::size_t x = stack.back();
      stack.pop_back();
      if (is_true(x)) continue;
      if (is_false(x)) {
        ok = false;
        break;
      }
      value_[x / 2] = (x % 2 == 0) ? 1 : 0;
      trail.push_back(x / 2);
      for (std::size_t y : implications_[x]) stack.push_back(y);
    }
    if (!ok) {
      for (std::size_t v : trail) value_[v] = -1;
    }
    return ok;
  }

  std::vector<std::vector<std::size_t>> implications_;
  std::vector<int> value_;
};

}  // namespace

std::optional<HornLabeling> find_horn_labeling(const ClauseSet& cnf,
                                               const std::vector<std::string>& variables) {
  std::vector<std::string> order = variables;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < order.size(); ++i) index.emplace(order[i], i);
  for (const auto& c : cnf.clauses) {
    for (const auto& l : c) {
      if (index.emplace(l.variable, order.size()).second) order.push_back(l.variable);
    }
  }

  HornLabeling labeling;
  if (is_horn(cnf)) {
    for (const auto& v : order) labeling[v] = false;
    return labeling;
  }

  TwoSat solver(order.size());
  for (const auto& c : cnf.clauses) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        // positive-after-relabel(l) == (f_x != l.positive); forbid both.
        auto not_positive = [&](const Literal& l) {
          return TwoSat::lit(index.at(l.variable), l.positive);
        };
        solver.add_clause(not_positive(c[i]), not_positive(c[j]));
      }
    }
  }
  auto solution = solver.solve();
  if (!solution) return std::nullopt;
  for (std::size_t i = 0; i < order.size(); ++i) labeling[order[i]] = (*solution)[i];
  return labeling;
}

std::optional<HornLabeling> find_horn_labeling(const Formula& f) {
  return find_horn_labeling(to_cnf(f), vars_of(f));
}

// ---------------------------------------------------------------------------
// Horn rewriting

Formula conjunction_of(const std::vector<Literal>& literals) {
  if (literals.empty()) return Formula::top();
  auto as_formula = [](const Literal& l) {
    Formula v = Formula::variable(l.variable);
    return l.positive ? v : Formula::negation(v);
  };
  Formula out = as_formula(literals.front());
  for (std::size_t i = 1; i < literals.size(); ++i) {
    out = Formula::conjunction(std::move(out), as_formula(literals[i]));
  }
  return out;
}

HornDisjunction minterm_expansion(const Formula& f) {
  if (f.has_diamond()) {
    throw Error(ErrorKind::diamond_not_allowed, "minterm expansion: diamond node present");
  }
  const auto vars = vars_of(f);
  if (vars.size() > kTruthTableBudget) {
    throw Error(ErrorKind::budget_exceeded,
                "minterm expansion: " + std::to_string(vars.size()) + " variables exceed budget of " +
                    std::to_string(kTruthTableBudget));
  }
  const std::size_t n = vars.size();
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < n; ++i) position.emplace(vars[i], i);

  HornDisjunction out;
  for (std::uint64_t row = 0; row < (std::uint64_t{1} << n); ++row) {
    auto bit = [&](std::size_t i) { return ((row >> (n - 1 - i)) & 1U) != 0; };
    if (!eval_with(f, [&](const std::string& v) { return bit(position.at(v)); })) continue;
    std::vector<Literal> literals;
    literals.reserve(n);
    for (std::size_t i = 0; i < n; ++i) literals.push_back(Literal{vars[i], bit(i)});
    out.disjuncts.push_back(conjunction_of(literals));
  }
  return out;
}

}  // namespace coalguard
