#include <gtest/gtest.h>

#include <random>

#include "pfp/builders.hpp"
#include "test_util.hpp"

using namespace pfp;

namespace {

/// Register basis index with every group member set to its variable value.
std::size_t embed(const QubitLayout& layout, std::uint64_t x, bool control) {
  std::size_t i = 0;
  for (std::size_t j = 0; j < layout.num_vars(); ++j) {
    if ((x >> j) & 1U) {
      for (Qubit q : layout.group_members[j]) i |= std::size_t{1} << q;
    }
  }
  if (control) i |= std::size_t{1} << layout.control_qubit;
  return i;
}

StateVector basis(std::size_t width, std::size_t index) {
  std::vector<Amplitude> amps(std::size_t{1} << width, 0.0);
  amps[index] = 1.0;
  return StateVector::from_amplitudes(std::move(amps));
}

cnf::CnfFormula chain_of_clauses(int m) {
  std::vector<cnf::Clause> clauses;
  for (int c = 0; c < m; ++c) clauses.push_back({{{1, false}, {2, c % 2 == 0}, {3, false}}});
  return cnf::CnfFormula(3, clauses);
}

}  // namespace

TEST(Layout, ExampleFormulaWidthAndOrder) {
  const auto layout = build_layout(test::example_formula());
  EXPECT_EQ(layout.total_width, 10u);
  EXPECT_EQ(layout.group_members, (std::vector<std::vector<Qubit>>{{0, 1, 2}, {3}, {4}}));
  EXPECT_EQ(layout.clause_qubits, (std::vector<Qubit>{5, 6, 7}));
  EXPECT_EQ(layout.formula_qubit, 8u);
  EXPECT_EQ(layout.control_qubit, 9u);
  EXPECT_EQ(layout.member_for(0, 0), 0u);
  EXPECT_EQ(layout.member_for(1, 0), 1u);
  EXPECT_EQ(layout.member_for(2, 0), 2u);
  EXPECT_EQ(layout.member_for(1, 1), 3u);
  EXPECT_EQ(layout.representatives(), (std::vector<Qubit>{0, 3, 4}));
}

TEST(Layout, UnusedVariableGetsOneQubit) {
  const cnf::CnfFormula f(3, {cnf::Clause{{{1, false}, {3, true}}}});
  const auto layout = build_layout(f);
  EXPECT_EQ(layout.group_members[1].size(), 1u);
  EXPECT_EQ(layout.total_width, 3u + 1 + 1 + 1);
}

TEST(Layout, InitialStateIsGhzTensorPlus) {
  const auto layout = build_layout(test::example_formula());
  const auto s = init_state(initial_directives(layout));
  const double amp = 1.0 / std::sqrt(8.0);
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    const bool ghz = (i & 7) == 0 || (i & 7) == 7;
    const bool ok = ghz && (i & (0b11111 << 5)) == (1u << 9);
    EXPECT_NEAR(std::abs(s[i]), ok ? amp : 0.0, 1e-15) << i;
  }
}

TEST(ClauseCircuit, TruthTable) {
  // (a v b) on its own: members 0, 1, ancilla 2.
  const cnf::CnfFormula f(2, {cnf::Clause{{{1, false}, {2, false}}}});
  const auto layout = build_layout(f);
  const auto c = build_clause_circuit(f.clause(0), layout, 0);
  for (std::size_t x = 0; x < 4; ++x) {
    StateVector s = basis(layout.total_width, x);
    apply(s, c);
    const double p1 = outcome_probability(s, layout.clause_qubits[0], Basis::Z, 1);
    EXPECT_NEAR(p1, x != 0 ? 1.0 : 0.0, 1e-15) << x;
  }
}

TEST(ClauseCircuit, FormulaQubitMatchesEvaluation) {
  std::mt19937_64 gen(17);
  std::vector<cnf::CnfFormula> formulas{test::example_formula()};
  for (int k = 0; k < 10; ++k) formulas.push_back(test::random_ksat(gen, 3, 3, 2));
  for (const auto& f : formulas) {
    const auto layout = build_layout(f);
    Circuit omega(layout.total_width);
    for (std::size_t i = 0; i < f.num_clauses(); ++i) omega.append(build_clause_circuit(f.clause(i), layout, i));
    omega.append(build_formula_conjunction(layout));
    for (std::uint64_t x = 0; x < (1u << f.num_vars()); ++x) {
      StateVector s = basis(layout.total_width, embed(layout, x, false));
      apply(s, omega);
      EXPECT_NEAR(outcome_probability(s, layout.formula_qubit, Basis::Z, 1),
                  test::brute_force_satisfies(f, x) ? 1.0 : 0.0, 1e-15);
    }
  }
}

TEST(ControlledOracle, StagesAndRestoration) {
  const auto f = test::example_formula();
  const auto layout = build_layout(f);
  const auto oracle = build_controlled_oracle(layout, f, 0.4);
  for (const char* label : {"omega/clauses", "omega/rotation", "omega/conjunction", "phase",
                            "omega_inv/clauses", "omega_inv/rotation", "omega_inv/conjunction"}) {
    EXPECT_NO_THROW(staged_depth(oracle, label)) << label;
  }
  // Basis inputs come back with ancillas cleared and members unchanged.
  for (std::uint64_t x = 0; x < 8; ++x) {
    for (bool ctrl : {false, true}) {
      const auto in = embed(layout, x, ctrl);
      StateVector s = basis(layout.total_width, in);
      apply(s, oracle);
      double kept = 0.0;
      for (bool c2 : {false, true}) kept += std::norm(s[embed(layout, x, c2)]);
      EXPECT_NEAR(kept, 1.0, 1e-14);
    }
  }
}

TEST(ControlledOracle, PhaseOnlyWhenControlStaysOne) {
  // phi = 0: the oracle is controlled-O (phase -1 on solutions with control 1).
  const auto f = test::example_formula();
  const auto layout = build_layout(f);
  const auto oracle = build_controlled_oracle(layout, f, 0.0);
  for (std::uint64_t x = 0; x < 8; ++x) {
    for (bool ctrl : {false, true}) {
      const auto in = embed(layout, x, ctrl);
      StateVector s = basis(layout.total_width, in);
      apply(s, oracle);
      const double sign = (ctrl && x == 7) ? -1.0 : 1.0;
      EXPECT_NEAR(std::abs(s[in] - sign), 0.0, 1e-14);
    }
  }
}

TEST(ControlledDiffuser, ActsAsGroverDiffusionOnControlOne) {
  const auto f = test::example_formula();
  const auto layout = build_layout(f);
  const auto diffuser = build_controlled_diffuser(layout);
  for (const char* label : {"disentangle", "reflect", "reentangle"}) EXPECT_NO_THROW(staged_depth(diffuser, label));
  for (bool ctrl : {false, true}) {
    StateVector s = basis(layout.total_width, embed(layout, 5, ctrl));
    apply(s, diffuser);
    for (std::uint64_t y = 0; y < 8; ++y) {
      // G = 2|u><u| - I with |u> uniform over 8 assignments.
      const double g = ctrl ? (2.0 / 8 - (y == 5 ? 1.0 : 0.0)) : (y == 5 ? 1.0 : 0.0);
      EXPECT_NEAR(std::abs(s[embed(layout, y, ctrl)] - g), 0.0, 1e-14) << y;
    }
  }
}

TEST(GroverBaseline, OracleMarksSolutionsAndRestoresAncillas) {
  std::mt19937_64 gen(23);
  for (int k = 0; k < 8; ++k) {
    const auto f = test::random_ksat(gen, 3, 4, 2);
    const auto g = build_grover_baseline(f);
    for (std::uint64_t x = 0; x < 8; ++x) {
      std::size_t idx = 0;
      for (std::size_t j = 0; j < 3; ++j) {
        if ((x >> j) & 1U) idx |= std::size_t{1} << g.layout.variable_qubits[j];
      }
      StateVector s = basis(g.layout.total_width, idx);
      apply(s, g.oracle);
      EXPECT_NEAR(std::abs(s[idx] - (test::brute_force_satisfies(f, x) ? -1.0 : 1.0)), 0.0, 1e-14);
    }
  }
}

TEST(Depth, ParallelClauseStageIsIndependentOfClauseCount) {
  const auto f1 = chain_of_clauses(1);
  const auto f50 = chain_of_clauses(50);
  const auto d1 = staged_depth(build_controlled_oracle(build_layout(f1), f1, 0.3), "omega/clauses");
  const auto d50 = staged_depth(build_controlled_oracle(build_layout(f50), f50, 0.3), "omega/clauses");
  EXPECT_EQ(d1, d50);
  const auto s1 = staged_depth(build_grover_baseline(f1).oracle, "clauses");
  const auto s50 = staged_depth(build_grover_baseline(f50).oracle, "clauses");
  EXPECT_GE(s50, 50 * s1 / 2);
  EXPECT_GE(s50, 50u);
}
