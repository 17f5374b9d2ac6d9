#include "pfp/builders.hpp"

namespace pfp {

std::vector<Qubit> QubitLayout::representatives() const {
  std::vector<Qubit> reps;
  reps.reserve(group_members.size());
  for (const auto& g : group_members) reps.push_back(g.front());
  return reps;
}

QubitLayout build_layout(const cnf::CnfFormula& formula) {
  QubitLayout layout;
  const auto counts = cnf::occurrence_counts(formula);
  Qubit next = 0;
  layout.group_members.resize(static_cast<std::size_t>(formula.num_vars()));
  for (int j = 1; j <= formula.num_vars(); ++j) {
    const int members = std::max(counts.at(j), 1);
    auto& group = layout.group_members[static_cast<std::size_t>(j - 1)];
    for (int c = 0; c < members; ++c) group.push_back(next++);
  }

  std::vector<std::size_t> used(layout.group_members.size(), 0);
  for (std::size_t i = 0; i < formula.num_clauses(); ++i) {
    const auto& lits = formula.clause(i).literals;
    for (std::size_t slot = 0; slot < lits.size(); ++slot) {
      const auto v = static_cast<std::size_t>(lits[slot].variable - 1);
      layout.occurrence_assignment[{i, slot}] = layout.group_members[v][used[v]++];
    }
  }

  for (std::size_t i = 0; i < formula.num_clauses(); ++i) layout.clause_qubits.push_back(next++);
  layout.formula_qubit = next++;
  layout.control_qubit = next++;
  layout.total_width = next;
  return layout;
}

InitDirectives initial_directives(const QubitLayout& layout) {
  InitDirectives d;
  d.width = layout.total_width;
  for (const auto& g : layout.group_members) {
    if (g.size() == 1) {
      d.plus.push_back(g.front());
    } else {
      d.ghz_groups.push_back(g);
    }
  }
  d.zeros = layout.clause_qubits;
  d.zeros.push_back(layout.formula_qubit);
  d.ones.push_back(layout.control_qubit);
  return d;
}

Circuit build_clause_circuit(const cnf::Clause& clause, const QubitLayout& layout,
                             std::size_t clause_index) {
  Circuit c(layout.total_width);
  const Qubit ancilla = layout.clause_qubits.at(clause_index);
  std::vector<Qubit> members;
  for (std::size_t slot = 0; slot < clause.literals.size(); ++slot) {
    const Qubit q = layout.member_for(clause_index, slot);
    members.push_back(q);
    if (!clause.literals[slot].negated) c.append(gates::x(q));
  }
  c.append(gates::x(ancilla));
  c.append(gates::mcx(std::move(members), ancilla));
  return c;
}

Circuit build_formula_conjunction(const QubitLayout& layout) {
  Circuit c(layout.total_width);
  c.append(gates::mcx(layout.clause_qubits, layout.formula_qubit));
  return c;
}

Circuit build_controlled_oracle(const QubitLayout& layout, const cnf::CnfFormula& formula,
                                double phi) {
  Circuit omega(layout.total_width);
  for (std::size_t i = 0; i < formula.num_clauses(); ++i) {
    omega.append(build_clause_circuit(formula.clause(i), layout, i), "omega/clauses");
  }
  Gate rotation = gates::ry(layout.control_qubit, phi);
  rotation.stage = "omega/rotation";
  omega.append(std::move(rotation));
  omega.append(build_formula_conjunction(layout), "omega/conjunction");

  Circuit out(layout.total_width);
  out.append(omega);
  Gate phase = gates::cz(layout.formula_qubit, layout.control_qubit);
  phase.stage = "phase";
  out.append(std::move(phase));
  out.append(inverse(omega), "omega_inv");
  return out;
}

Circuit build_controlled_diffuser(const QubitLayout& layout) {
  Circuit entangle(layout.total_width);
  for (const auto& g : layout.group_members) {
    for (std::size_t k = 1; k < g.size(); ++k) entangle.append(gates::cnot(g.front(), g[k]));
  }

  const auto reps = layout.representatives();
  Circuit reflect(layout.total_width);
  for (Qubit q : reps) reflect.append(gates::h(q)).append(gates::x(q));
  std::vector<Qubit> controls(reps.begin(), reps.end() - 1);
  controls.push_back(layout.control_qubit);
  reflect.append(gates::mcz(std::move(controls), reps.back()));
  for (Qubit q : reps) reflect.append(gates::x(q)).append(gates::h(q));
  reflect.append(gates::z(layout.control_qubit));

  Circuit out(layout.total_width);
  out.append(entangle, "disentangle");
  out.append(reflect, "reflect");
  out.append(inverse(entangle), "reentangle");
  return out;
}

GroverBaseline build_grover_baseline(const cnf::CnfFormula& formula) {
  GroverLayout layout;
  Qubit next = 0;
  for (int j = 0; j < formula.num_vars(); ++j) layout.variable_qubits.push_back(next++);
  for (std::size_t i = 0; i < formula.num_clauses(); ++i) layout.clause_qubits.push_back(next++);
  layout.formula_qubit = next++;
  layout.total_width = next;

  Circuit compute(layout.total_width);
  for (std::size_t i = 0; i < formula.num_clauses(); ++i) {
    const auto& lits = formula.clause(i).literals;
    const Qubit ancilla = layout.clause_qubits[i];
    Circuit clause(layout.total_width);
    std::vector<Qubit> members;
    for (const auto& lit : lits) {
      const Qubit q = layout.variable_qubits[static_cast<std::size_t>(lit.variable - 1)];
      members.push_back(q);
      if (!lit.negated) clause.append(gates::x(q));
    }
    clause.append(gates::x(ancilla));
    clause.append(gates::mcx(members, ancilla));
    for (const auto& lit : lits) {
      if (!lit.negated) {
        clause.append(gates::x(layout.variable_qubits[static_cast<std::size_t>(lit.variable - 1)]));
      }
    }
    compute.append(clause, "clauses");
  }
  Gate conjunction = gates::mcx(layout.clause_qubits, layout.formula_qubit);
  conjunction.stage = "conjunction";
  compute.append(std::move(conjunction));

  GroverBaseline out{Circuit(layout.total_width), Circuit(layout.total_width), layout};
  out.oracle.append(compute);
  Gate phase = gates::z(layout.formula_qubit);
  phase.stage = "phase";
  out.oracle.append(std::move(phase));
  out.oracle.append(inverse(compute), "uncompute");

  Circuit& d = out.diffuser;
  const auto& vars = layout.variable_qubits;
  if (!vars.empty()) {
    for (Qubit q : vars) d.append(gates::h(q)).append(gates::x(q));
    d.append(gates::mcz(std::vector<Qubit>(vars.begin(), vars.end() - 1), vars.back()));
    for (Qubit q : vars) d.append(gates::x(q)).append(gates::h(q));
  }
  return out;
}

}  // namespace pfp
