#include <gtest/gtest.h>

#include "coalguard/formula.hpp"
#include "support/reference.hpp"

using namespace coalguard;
using namespace coalguard::testing;

namespace {

const char* kPhi1 = "v1 & v2 & (~v3 | v5 | ~v4)";
const char* kPhi2 = "(~v5 | ~v3) & ~v6";
const char* kXor = "(~A & B) | (A & ~B)";

Formula and_(Formula a, Formula b) { return Formula::conjunction(std::move(a), std::move(b)); }
Formula or_(Formula a, Formula b) { return Formula::disjunction(std::move(a), std::move(b)); }
Formula not_(Formula a) { return Formula::negation(std::move(a)); }
Formula var(const char* n) { return Formula::variable(n); }

std::set<Clause> as_set(const ClauseSet& c) { return {c.clauses.begin(), c.clauses.end()}; }

}  // namespace

TEST(ParseFormula, Phi1DesugarsConjunctionLeftAssociatively) {
  Formula expected = and_(and_(var("v1"), var("v2")), or_(or_(not_(var("v3")), var("v5")), not_(var("v4"))));
  EXPECT_EQ(parse_formula(kPhi1), expected);
}

TEST(ParseFormula, TopAndDiamond) {
  EXPECT_EQ(parse_formula("true"), Formula::top());
  EXPECT_EQ(parse_formula("<>{a1,a2}(p | ~q)"),
            Formula::diamond({"a1", "a2"}, or_(var("p"), not_(var("q")))));
  EXPECT_EQ(parse_formula("<>{a2, a1, a2} p").coalition(), (std::vector<std::string>{"a1", "a2"}));
}

TEST(ParseFormula, PrecedenceNegationThenAndThenOr) {
  EXPECT_EQ(parse_formula("~a & b | c"), or_(and_(not_(var("a")), var("b")), var("c")));
  EXPECT_EQ(parse_formula("a | b & c"), or_(var("a"), and_(var("b"), var("c"))));
  EXPECT_EQ(parse_formula("a | b | c"), or_(or_(var("a"), var("b")), var("c")));
}

TEST(ParseFormula, OnlyCoreNodesAfterDesugaring) {
  std::function<void(const Formula&)> walk = [&](const Formula& f) {
    switch (f.kind()) {
      case Formula::Kind::negation:
      case Formula::Kind::diamond: walk(f.child()); break;
      case Formula::Kind::disjunction:
        walk(f.left());
        walk(f.right());
        break;
      default: break;
    }
  };
  EXPECT_NO_THROW(walk(parse_formula("a & <>{x}(b & ~c) | true")));
}

TEST(ParseFormula, SyntaxErrorsCarryPosition) {
  try {
    parse_formula("a & (b | ");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::syntax);
    EXPECT_EQ(e.position(), 9U);
  }
  try {
    parse_formula("p ? q");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.position(), 2U);
  }
  EXPECT_THROW(parse_formula(""), SyntaxError);
  EXPECT_THROW(parse_formula("a b"), SyntaxError);
}

TEST(ParseFormula, EmptyCoalitionRejected) {
  try {
    parse_formula("<>{} p");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::empty_coalition);
  }
}

TEST(ParseFormula, VarsMatchIdentifiers) {
  auto vars = vars_of(parse_formula(kPhi1));
  EXPECT_EQ(vars, (std::vector<std::string>{"v1", "v2", "v3", "v5", "v4"}));
}

TEST(VarsOf, Examples) {
  EXPECT_EQ(vars_of(parse_formula(kPhi2)), (std::vector<std::string>{"v5", "v3", "v6"}));
  EXPECT_TRUE(vars_of(Formula::top()).empty());
  EXPECT_EQ(vars_of(Formula::diamond({"a1"}, var("p"))), std::vector<std::string>{"p"});
}

TEST(Format, RoundTripProperty) {
  Generator g(11);
  std::vector<std::string> vars{"p", "q", "r", "s"};
  std::vector<std::string> agents{"a1", "a2", "a3"};
  for (int i = 0; i < 500; ++i) {
    Formula f = g.formula_with_diamonds(vars, agents, 5);
    std::string text = format(f);
    EXPECT_EQ(parse_formula(text), f) << text;
  }
}

TEST(ToCnf, XorGivesTwoClauses) {
  ClauseSet cnf = to_cnf(parse_formula(kXor));
  std::set<Clause> expected{Clause{{"A", true}, {"B", true}}, Clause{{"A", false}, {"B", false}}};
  EXPECT_EQ(as_set(cnf), expected);
}

TEST(ToCnf, TrivialCases) {
  EXPECT_TRUE(to_cnf(Formula::top()).clauses.empty());
  EXPECT_EQ(to_cnf(var("p")).clauses, (std::vector<Clause>{Clause{{"p", true}}}));
  EXPECT_EQ(to_cnf(not_(Formula::top())).clauses, (std::vector<Clause>{Clause{}}));
  EXPECT_TRUE(to_cnf(parse_formula("p | ~p")).clauses.empty());
}

TEST(ToCnf, RejectsDiamond) {
  try {
    to_cnf(parse_formula("<>{a} p"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::diamond_not_allowed);
  }
}

TEST(ToCnf, NoTautologiesNoDuplicates) {
  Generator g(5);
  std::vector<std::string> vars{"a", "b", "c", "d"};
  for (int i = 0; i < 200; ++i) {
    ClauseSet cnf = to_cnf(g.formula(vars, 4));
    EXPECT_EQ(as_set(cnf).size(), cnf.clauses.size());
    for (const auto& c : cnf.clauses) {
      for (std::size_t k = 1; k < c.size(); ++k) EXPECT_NE(c[k].variable, c[k - 1].variable);
    }
  }
}

TEST(ToCnf, EquivalenceProperty) {
  Generator g(7);
  for (int i = 0; i < 400; ++i) {
    std::vector<std::string> vars;
    std::size_t n = g.uniform(1, 6);
    for (std::size_t k = 0; k < n; ++k) vars.push_back("x" + std::to_string(k));
    Formula f = g.formula(vars, 4);
    EXPECT_EQ(truth_table(f, vars), truth_table(to_cnf(f), vars)) << format(f);
  }
}

TEST(HornLabeling, XorFlipsAOnly) {
  auto lambda = find_horn_labeling(parse_formula(kXor));
  ASSERT_TRUE(lambda);
  EXPECT_EQ(*lambda, (HornLabeling{{"A", true}, {"B", false}}));
  EXPECT_TRUE(is_horn(relabel(to_cnf(parse_formula(kXor)), *lambda)));
}

TEST(HornLabeling, AlreadyHornGetsIdentity) {
  auto lambda = find_horn_labeling(parse_formula("~p | q"));
  ASSERT_TRUE(lambda);
  EXPECT_EQ(*lambda, (HornLabeling{{"p", false}, {"q", false}}));
}

TEST(HornLabeling, ThreeXorHasNone) {
  Formula f = parse_formula("(x | y | z) & (x | ~y | ~z) & (~x | y | ~z) & (~x | ~y | z)");
  EXPECT_FALSE(find_horn_labeling(f).has_value());
  EXPECT_FALSE(exhaustive_labeling_exists(to_cnf(f), vars_of(f)));
}

TEST(HornLabeling, RejectsDiamond) {
  EXPECT_THROW(find_horn_labeling(parse_formula("<>{a}(p | q)")), Error);
}

TEST(HornLabeling, SoundAndCompleteAgainstEnumeration) {
  Generator g(13);
  for (int i = 0; i < 400; ++i) {
    std::vector<std::string> vars;
    std::size_t n = g.uniform(1, 6);
    for (std::size_t k = 0; k < n; ++k) vars.push_back("x" + std::to_string(k));
    Formula f = g.formula(vars, 4);
    ClauseSet cnf = to_cnf(f);
    auto lambda = find_horn_labeling(f);
    if (lambda) {
      EXPECT_TRUE(is_horn(relabel(cnf, *lambda))) << format(f);
      for (const auto& v : vars_of(f)) EXPECT_TRUE(lambda->contains(v));
    } else {
      EXPECT_FALSE(exhaustive_labeling_exists(cnf, vars_of(f))) << format(f);
    }
  }
}

TEST(HornLabeling, AbsenceConfirmedUpToTwelveVariables) {
  Generator g(19);
  int absent = 0;
  for (int i = 0; i < 60; ++i) {
    std::vector<std::string> vars;
    std::size_t n = g.uniform(7, 12);
    for (std::size_t k = 0; k < n; ++k) vars.push_back("x" + std::to_string(k));
    Formula f = g.formula(vars, 4);
    if (i % 2 == 0) f = parse_formula("(" + format(f) + ") & ((x0 & ~x1 | ~x0 & x1) & ~x2 | ~(x0 & ~x1 | ~x0 & x1) & x2)");
    ClauseSet cnf = to_cnf(f);
    auto lambda = find_horn_labeling(cnf, vars);
    if (lambda) {
      EXPECT_TRUE(is_horn(relabel(cnf, *lambda)));
    } else {
      ++absent;
      EXPECT_FALSE(exhaustive_labeling_exists(cnf, vars)) << format(f);
    }
  }
  EXPECT_GT(absent, 0);
}

TEST(MintermExpansion, XorHasTwoMinterms) {
  HornDisjunction h = minterm_expansion(parse_formula(kXor));
  ASSERT_EQ(h.disjuncts.size(), 2U);
  EXPECT_EQ(h.disjuncts[0], parse_formula("~A & B"));
  EXPECT_EQ(h.disjuncts[1], parse_formula("A & ~B"));
}

TEST(MintermExpansion, Phi2HasThreeMinterms) {
  // Enumerating the 8 rows: phi2 holds iff v6 is false and not both v5, v3.
  HornDisjunction h = minterm_expansion(parse_formula(kPhi2));
  ASSERT_EQ(h.disjuncts.size(), 3U);
  EXPECT_EQ(h.disjuncts[0], parse_formula("~v5 & ~v3 & ~v6"));
  EXPECT_EQ(h.disjuncts[1], parse_formula("~v5 & v3 & ~v6"));
  EXPECT_EQ(h.disjuncts[2], parse_formula("v5 & ~v3 & ~v6"));
}

TEST(MintermExpansion, UnsatisfiableIsEmpty) {
  EXPECT_TRUE(minterm_expansion(parse_formula("p & ~p")).disjuncts.empty());
}

TEST(MintermExpansion, BudgetEnforced) {
  std::string text = "x0";
  for (int i = 1; i <= 16; ++i) text += " | x" + std::to_string(i);
  try {
    minterm_expansion(parse_formula(text));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::budget_exceeded);
  }
}

TEST(MintermExpansion, EquivalentAndHornProperty) {
  Generator g(17);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> vars{"a", "b", "c", "d", "e"};
    Formula f = g.formula(vars, 4);
    HornDisjunction h = minterm_expansion(f);
    Formula joined = Formula::negation(Formula::top());
    for (const auto& d : h.disjuncts) {
      joined = Formula::disjunction(joined, d);
      EXPECT_TRUE(is_horn(to_cnf(d)));
    }
    EXPECT_EQ(truth_table(f, vars), truth_table(joined, vars)) << format(f);
  }
}
