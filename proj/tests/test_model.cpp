#include <gtest/gtest.h>

#include "coalguard/model.hpp"
#include "support/reference.hpp"

using namespace coalguard;
using namespace coalguard::testing;

namespace {

std::vector<std::string> names_of(const Model& m, const std::vector<AgentId>& ids) { return agent_names(m, ids); }

}  // namespace

TEST(Model, Example1Lookups) {
  Model m = example1_model();
  EXPECT_EQ(m.agent_count(), 5U);
  EXPECT_EQ(m.variable_count(), 9U);
  EXPECT_EQ(m.name(*m.owner(m.variable("v6"))), "a3");
  EXPECT_EQ(m.name(controller_of(m, "v9")), "a5");
  EXPECT_EQ(m.controlled_by(m.agent("a4")), (std::vector<VarId>{m.variable("v4"), m.variable("v5")}));
  EXPECT_FALSE(m.find_agent("a9"));
  try {
    m.variable("v10");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unknown_variable);
  }
  EXPECT_THROW(m.agent("zz"), Error);
  EXPECT_TRUE(validate_model(m).ok());
}

TEST(Model, Example1InitialStateSecure) {
  Model m = example1_model();
  SystemState s = example1_state(m);
  for (const auto& f : m.critical_formulas()) EXPECT_FALSE(eval(f, m, s)) << format(f);
  EXPECT_TRUE(is_secure(m, s));
}

TEST(Model, AgentsOfExample1) {
  Model m = example1_model();
  const auto& phi = m.critical_formulas();
  EXPECT_EQ(names_of(m, agents_of(phi[0], m)), (std::vector<std::string>{"a1", "a2", "a3", "a4"}));
  EXPECT_EQ(names_of(m, agents_of(phi[1], m)), (std::vector<std::string>{"a2", "a3", "a4"}));
  EXPECT_EQ(names_of(m, agents_of(phi[2], m)), (std::vector<std::string>{"a1", "a3"}));
  EXPECT_EQ(names_of(m, agents_of(phi[3], m)), (std::vector<std::string>{"a1", "a3", "a4", "a5"}));
}

TEST(Model, MakeStateRequiresEveryVariable) {
  Model m = example1_model();
  EXPECT_THROW(make_state(m, {{"v1", true}}), Error);
}

TEST(Diamond, Phi2ByA3WitnessFlipsOnlyV6) {
  Model m = example1_model();
  SystemState s = example1_state(m);
  DiamondResult r = diamond_holds(m, s, {m.agent("a3")}, m.critical_formulas()[1]);
  ASSERT_TRUE(r.holds);
  ASSERT_TRUE(r.witness);
  PartialValuation expected{{m.agent("a3")}, {{m.variable("v2"), true}, {m.variable("v6"), false}}};
  EXPECT_EQ(*r.witness, expected);
  EXPECT_TRUE(eval(m.critical_formulas()[1], m, apply_witness(s, *r.witness)));
}

TEST(Diamond, Phi2ByA2Fails) {
  Model m = example1_model();
  SystemState s = example1_state(m);
  DiamondResult r = diamond_holds(m, s, {m.agent("a2")}, m.critical_formulas()[1]);
  EXPECT_FALSE(r.holds);
  EXPECT_FALSE(r.witness);
}

TEST(Diamond, FormulaSyntaxMatchesSearch) {
  Model m = example1_model();
  SystemState s = example1_state(m);
  EXPECT_TRUE(eval(parse_formula("<>{a3}((~v5 | ~v3) & ~v6)"), m, s));
  EXPECT_FALSE(eval(parse_formula("<>{a2}((~v5 | ~v3) & ~v6)"), m, s));
  EXPECT_TRUE(eval(parse_formula("<>{a2,a3}(~v3 & ~v6)"), m, s));
}

TEST(Diamond, NestedRejectedAndBudgetEnforced) {
  Model m = example1_model();
  SystemState s = example1_state(m);
  EXPECT_THROW(diamond_holds(m, s, {m.agent("a1")}, parse_formula("<>{a2} v3")), Error);

  Model::Partition big{{"a1", {}}, {"a2", {"y"}}};
  std::vector<std::string> vars{"y"};
  for (int i = 0; i < 21; ++i) {
    big[0].second.push_back("x" + std::to_string(i));
    vars.push_back("x" + std::to_string(i));
  }
  Model wide(big, vars, {});
  SystemState zero{0, std::vector<bool>(vars.size())};
  try {
    diamond_holds(wide, zero, {wide.agent("a1")}, parse_formula("x0"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::budget_exceeded);
  }
}

TEST(Diamond, AgreesWithReferenceProperty) {
  Generator g(23);
  InstanceShape shape;
  shape.max_vars = 8;
  for (int i = 0; i < 300; ++i) {
    Instance inst = random_instance(g, shape);
    const Model& m = inst.model;
    std::vector<std::string> coalition;
    for (const auto& a : m.agents()) {
      if (g.coin()) coalition.push_back(a);
    }
    if (coalition.empty()) coalition.push_back(m.agents().front());
    std::vector<AgentId> ids;
    for (const auto& a : coalition) ids.push_back(m.agent(a));
    const Formula& f = m.critical_formulas()[g.uniform(0, m.critical_formulas().size() - 1)];
    DiamondResult r = diamond_holds(m, inst.state, ids, f);
    bool expected = ref_exists(f, m, named(m, inst.state), coalition_vars(m, coalition));
    EXPECT_EQ(r.holds, expected) << format(f);
    if (r.holds) {
      SystemState t = apply_witness(inst.state, *r.witness);
      EXPECT_TRUE(eval(f, m, t));
      for (std::size_t v = 0; v < m.variable_count(); ++v) {
        auto owner = m.owner(VarId{static_cast<std::uint32_t>(v)});
        bool inside = owner && std::find(ids.begin(), ids.end(), *owner) != ids.end();
        if (!inside) EXPECT_EQ(t.valuation[v], inst.state.valuation[v]);
      }
    }
  }
}

TEST(Eval, CompiledAgreesWithReferenceProperty) {
  Generator g(29);
  std::vector<std::string> agents{"a1", "a2", "a3"};
  Model::Partition p{{"a1", {"p", "q"}}, {"a2", {"r"}}, {"a3", {"s", "t"}}};
  std::vector<std::string> vars{"p", "q", "r", "s", "t"};
  Model m(p, vars, {});
  for (int i = 0; i < 300; ++i) {
    Formula f = g.formula_with_diamonds(vars, agents, 4);
    SystemState s{0, std::vector<bool>(vars.size())};
    for (std::size_t k = 0; k < vars.size(); ++k) s.valuation[k] = g.coin();
    EXPECT_EQ(eval(f, m, s), ref_eval(f, m, named(m, s))) << format(f);
    Model bound(p, vars, {f});
    EXPECT_EQ(bound.compiled().front().eval(s.valuation), ref_eval(f, m, named(m, s))) << format(f);
  }
}

TEST(Eval, UnknownIdentifiers) {
  Model m = example1_model();
  SystemState s = example1_state(m);
  try {
    eval(parse_formula("v1 | w"), m, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unknown_variable);
  }
  try {
    eval(parse_formula("<>{zz} v1"), m, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unknown_agent);
  }
}

TEST(HornDisjunction, Phi2MintermsAndEquivalence) {
  Model m = example1_model();
  const Formula& phi2 = m.critical_formulas()[1];
  HornDisjunction h = to_horn_disjunction(phi2, m);
  ASSERT_EQ(h.disjuncts.size(), 3U);
  for (std::uint32_t r = 0; r < 512; ++r) {
    SystemState s{0, std::vector<bool>(9)};
    for (std::size_t k = 0; k < 9; ++k) s.valuation[k] = ((r >> k) & 1U) != 0;
    bool any = false;
    for (const auto& d : h.disjuncts) any = any || eval(d, m, s);
    EXPECT_EQ(any, eval(phi2, m, s));
  }
  EXPECT_THROW(to_horn_disjunction(parse_formula("w & v1"), m), Error);
}

TEST(Validate, ReportsEveryViolation) {
  Model::Partition p{{"a1", {"v1", "v2"}}, {"a2", {"v2"}}, {"a3", {}}};
  std::vector<std::string> vars{"v1", "v2", "v3"};
  Model m(p, vars, {parse_formula("v1 & v1"), parse_formula("v1 | zz")});
  ValidationResult r = validate_model(m);
  EXPECT_FALSE(r.ok());
  std::vector<std::string> got;
  for (const auto& v : r.violations) got.push_back(v.describe());
  auto has = [&](const std::string& s) { return std::find(got.begin(), got.end(), s) != got.end(); };
  EXPECT_TRUE(has("DoublyOwned(v2)"));
  EXPECT_TRUE(has("UncoveredVariable(v3)"));
  bool single = false;
  bool unknown = false;
  for (const auto& v : r.violations) {
    single = single || v.kind == ViolationKind::single_agent_formula;
    unknown = unknown || v.kind == ViolationKind::unknown_identifier;
  }
  EXPECT_TRUE(single);
  EXPECT_TRUE(unknown);
}

TEST(Validate, SingleAgentAsWarning) {
  Model::Partition p{{"a1", {"v1"}}, {"a2", {"v2"}}};
  Model m(p, {"v1", "v2"}, {parse_formula("v1")});
  EXPECT_FALSE(validate_model(m).ok());
  ValidationResult r = validate_model(m, ValidationOptions{true});
  EXPECT_TRUE(r.ok());
  ASSERT_EQ(r.warnings.size(), 1U);
  EXPECT_EQ(r.warnings[0].kind, ViolationKind::single_agent_formula);
}

TEST(Validate, EmptyModel) {
  Model m({}, {}, {});
  ValidationResult r = validate_model(m);
  ASSERT_GE(r.violations.size(), 2U);
  EXPECT_EQ(r.violations[0].kind, ViolationKind::empty_agents);
  EXPECT_EQ(r.violations[1].kind, ViolationKind::empty_variables);
}

TEST(Diamond, LargerCoalitionsKeepTruthProperty) {
  Generator g(89);
  for (int i = 0; i < 300; ++i) {
    Instance inst = random_instance(g, InstanceShape{8, 5, 3, 1, 3});
    const Model& m = inst.model;
    std::vector<AgentId> small;
    std::vector<AgentId> large;
    for (std::size_t a = 0; a < m.agent_count(); ++a) {
      AgentId id{static_cast<std::uint32_t>(a)};
      bool in_large = g.coin(0.6);
      if (in_large) large.push_back(id);
      if (in_large && g.coin()) small.push_back(id);
    }
    if (small.empty()) continue;
    for (const auto& f : m.critical_formulas()) {
      if (diamond_holds(m, inst.state, small, f).holds) EXPECT_TRUE(diamond_holds(m, inst.state, large, f).holds);
    }
  }
}

TEST(Model, ValidatedPartitionHasUniqueOwners) {
  Generator g(97);
  for (int i = 0; i < 100; ++i) {
    Instance inst = random_instance(g, {});
    const Model& m = inst.model;
    for (std::size_t v = 0; v < m.variable_count(); ++v) {
      int owners = 0;
      for (const auto& [agent, vars] : m.partition()) owners += std::count(vars.begin(), vars.end(), m.variables()[v]);
      EXPECT_EQ(owners, 1);
    }
  }
}
