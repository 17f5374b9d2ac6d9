#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "pfp/circuit.hpp"
#include "pfp/cnf.hpp"
#include "pfp/sim.hpp"

namespace pfp {

/// Qubit assignment for the parallel fixed-point search register.
///
/// Variable x_j owns a group of max(r_j, 1) qubits; the c-th occurrence of
/// x_j (scanning clauses left to right) is wired to member c, so every clause
/// reads exclusive qubits. Index order: variable groups by variable index,
/// then one ancilla per clause, the formula qubit, and the control qubit last.
struct QubitLayout {
  /// group_members[j-1] = qubits of variable x_j; member 0 is the representative.
  std::vector<std::vector<Qubit>> group_members;
  /// (clause index, literal slot) -> member qubit.
  std::map<std::pair<std::size_t, std::size_t>, Qubit> occurrence_assignment;
  std::vector<Qubit> clause_qubits;
  Qubit formula_qubit = 0;
  Qubit control_qubit = 0;
  std::size_t total_width = 0;

  std::size_t num_vars() const noexcept { return group_members.size(); }
  /// Member 0 of every group, in variable order.
  std::vector<Qubit> representatives() const;
  Qubit member_for(std::size_t clause, std::size_t slot) const {
    return occurrence_assignment.at({clause, slot});
  }
};

QubitLayout build_layout(const cnf::CnfFormula& formula);

/// Algorithm 1 input state: GHZ per group (|+> for one-member groups), clause
/// and formula qubits |0>, control |1>.
InitDirectives initial_directives(const QubitLayout& layout);

/// R layer (X on positive-literal members), X on the clause ancilla, then an
/// MCX over the members onto the ancilla. On basis inputs the ancilla ends
/// in |1> iff the clause is satisfied. Member qubits are left in the R frame.
Circuit build_clause_circuit(const cnf::Clause& clause, const QubitLayout& layout,
                             std::size_t clause_index);

/// MCX from every clause ancilla onto the formula qubit.
Circuit build_formula_conjunction(const QubitLayout& layout);

/// Controlled parallel oracle with stages:
///   omega/clauses, omega/rotation (RY(phi) on control), omega/conjunction,
///   phase (CZ between formula and control qubit),
///   omega_inv/... (the inverse of omega).
Circuit build_controlled_oracle(const QubitLayout& layout, const cnf::CnfFormula& formula,
                                double phi);

/// Controlled parallel diffuser with stages disentangle, reflect, reentangle.
/// The reflect stage is H,X on representatives, MCZ (target: last
/// representative; controls: other representatives and the control qubit),
/// X,H, followed by Z on the control qubit so that the control=1 branch sees
/// G = 2|psi0><psi0| - I rather than -G.
Circuit build_controlled_diffuser(const QubitLayout& layout);

/// Register for the sequential Grover baseline: one qubit per variable.
struct GroverLayout {
  std::vector<Qubit> variable_qubits;
  std::vector<Qubit> clause_qubits;
  Qubit formula_qubit = 0;
  std::size_t total_width = 0;
};

struct GroverBaseline {
  Circuit oracle;
  Circuit diffuser;
  GroverLayout layout;
};

/// Sequential oracle (self-restoring clause circuits chained on shared
/// variable qubits, conjunction, Z on the formula qubit, uncompute) and the
/// standard H/X/MCZ/X/H diffuser.
GroverBaseline build_grover_baseline(const cnf::CnfFormula& formula);

}  // namespace pfp
