#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "pfp/builders.hpp"
#include "pfp/circuit.hpp"
#include "pfp/cnf.hpp"
#include "pfp/schedule.hpp"
#include "pfp/sim.hpp"

namespace pfp {

/// Project onto control = 1 each iteration and accumulate the halting mass.
struct ExactMode {};
/// Sample every measurement from a generator seeded with `seed`.
struct TrajectoryMode {
  std::uint64_t seed = 0;
};
using RunMode = std::variant<ExactMode, TrajectoryMode>;

struct IterationRecord {
  int t = 0;
  double phi = 0.0;
  /// p(control = 0) given that iteration t was reached.
  double flip_probability = 0.0;
  /// Probability of having halted in iterations 1..t.
  double cumulative_success = 0.0;
  /// Probability of still running after iteration t.
  double branch_weight = 1.0;
};

enum class RunOutcome { Solved, Exhausted };

struct PfpRunReport {
  int iterations = 0;
  int max_iters = 0;
  std::vector<IterationRecord> records;
  RunOutcome outcome = RunOutcome::Exhausted;
  std::optional<cnf::Assignment> assignment;
  std::optional<std::uint64_t> seed;
  /// Exact mode: accumulated halting probability per assignment index.
  std::vector<double> halting_distribution;
};

inline constexpr const char* kExhaustedMessage =
    "no control flip observed — instance likely unsatisfiable";

/// ceil(3 (pi/4) sqrt(N)) + 10.
int default_max_iters(std::uint64_t search_space);

/// Circuits and register for one formula. Safe to share across threads.
class PfpEngine {
 public:
  explicit PfpEngine(cnf::CnfFormula formula);

  const cnf::CnfFormula& formula() const noexcept { return formula_; }
  const QubitLayout& layout() const noexcept { return layout_; }
  const Circuit& diffuser() const noexcept { return diffuser_; }
  Circuit oracle(double phi) const;

  StateVector initial_state() const;
  /// Controlled oracle then controlled diffuser.
  void apply_iteration(StateVector& state, double phi) const;

  /// Observable over the logical variable register.
  SolutionObservable observable(ObservableKind kind,
                                const std::vector<std::uint64_t>& solutions) const;

  /// Probability that some GHZ group disagrees or an ancilla is |1>.
  double leakage(const StateVector& state) const;

 private:
  cnf::CnfFormula formula_;
  QubitLayout layout_;
  Circuit diffuser_;
};

PfpRunReport pfp_run(const cnf::CnfFormula& formula, const PhiSchedule& schedule,
                     const RunMode& mode, int max_iters);

/// Advances the register by one iteration at angle phi.
using IterationStep = std::function<void(StateVector& state, int t, double phi)>;

/// pfp_run with a caller-supplied iteration and initial state.
PfpRunReport pfp_run(const PfpEngine& engine, StateVector initial, const PhiSchedule& schedule,
                     const RunMode& mode, int max_iters, const IterationStep& step);

/// Independent trajectories; run i is seeded with Rng(seed).split(i).next().
/// Results are in run-index order regardless of `jobs`.
std::vector<PfpRunReport> run_trajectories(const cnf::CnfFormula& formula,
                                           const PhiSchedule& schedule, int runs,
                                           std::uint64_t seed, int max_iters, int jobs = 1);

/// Exact Grover success probability after 0..iterations applications of
/// diffuser * oracle.
std::vector<double> grover_run(const cnf::CnfFormula& formula, int iterations);

struct EquivalenceReport {
  double max_deviation = 0.0;  // after removing a global phase
  double leakage = 0.0;        // worst norm lost outside the logical subspace
};

/// Compare the composed circuit (controlled oracle then controlled diffuser)
/// with the dense operator
///   (G P1 + P0) e^{i phi Y/2} (O P1 + P0) e^{-i phi Y/2}
/// on the logical variables plus control. n <= 4.
EquivalenceReport circuit_operator_equivalence(const cnf::CnfFormula& formula, double phi);

}  // namespace pfp
