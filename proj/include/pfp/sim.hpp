#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "pfp/circuit.hpp"

namespace pfp {

using Amplitude = std::complex<double>;
/// Row-major 2x2 matrix {m00, m01, m10, m11}.
using Matrix2 = std::array<Amplitude, 4>;

/// Amplitudes with magnitude below this are treated as zero in support checks.
inline constexpr double kAmplitudeEpsilon = 1e-12;
inline constexpr double kZeroProbability = kAmplitudeEpsilon * kAmplitudeEpsilon;

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Seedable, splittable generator. `split(k)` derives an independent child
/// stream from (seed, k) so parallel runs are reproducible by run index.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  Rng split(std::uint64_t stream) const;

  std::uint64_t next() { return engine_(); }
  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

/// Dense 2^q statevector. Qubit k is bit k of the basis index (qubit 0 is
/// the least significant bit). `branch_weight` is the probability mass
/// retained by exact conditioning; it multiplies the (normalized) state.
class StateVector {
 public:
  explicit StateVector(std::size_t width = 0);
  static StateVector from_amplitudes(std::vector<Amplitude> amplitudes);

  std::size_t width() const noexcept { return width_; }
  std::size_t dimension() const noexcept { return amps_.size(); }
  std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
  std::span<Amplitude> amplitudes() noexcept { return amps_; }
  Amplitude operator[](std::size_t i) const { return amps_[i]; }

  double branch_weight() const noexcept { return branch_weight_; }
  void set_branch_weight(double w) { branch_weight_ = w; }

  double norm_squared() const;
  void normalize();

 private:
  std::size_t width_;
  std::vector<Amplitude> amps_;
  double branch_weight_ = 1.0;
};

/// Initial product state: GHZ groups (|0..0>+|1..1>)/sqrt2, |+> singles,
/// |0> ancillas, |1> controls. Together they must partition [0, width).
struct InitDirectives {
  std::size_t width = 0;
  std::vector<std::vector<Qubit>> ghz_groups;
  std::vector<Qubit> plus;
  std::vector<Qubit> zeros;
  std::vector<Qubit> ones;
};

StateVector init_state(const InitDirectives& directives);

/// Normalized state with i.i.d. complex Gaussian amplitudes (Haar-distributed).
StateVector random_state(std::size_t width, Rng& rng);

void apply(StateVector& state, const Gate& gate);
void apply(StateVector& state, const Circuit& circuit);
/// U on `target` when every control is |1>.
void apply_controlled_unitary(StateVector& state, std::span<const Qubit> controls, Qubit target,
                              const Matrix2& u);

enum class Basis { Z, X };

struct MeasurementRecord {
  Qubit qubit = 0;
  Basis basis = Basis::Z;
  int outcome = 0;  // X basis: 0 is |+>, 1 is |->
  double probability = 0.0;
};

struct Trajectory {
  Rng* rng;
};
struct ConditionOn {
  int outcome;
};
using MeasureMode = std::variant<Trajectory, ConditionOn>;

/// Probability of `outcome` for a measurement of `qubit` in `basis`.
double outcome_probability(const StateVector& state, Qubit qubit, Basis basis, int outcome);

/// Trajectory mode samples with the Born rule and renormalizes. ConditionOn
/// projects onto the requested outcome, multiplies branch_weight by its
/// probability and renormalizes; conditioning on a zero-probability outcome
/// throws SimError.
MeasurementRecord measure(StateVector& state, Qubit qubit, Basis basis, MeasureMode mode);

enum class ObservableKind {
  SolutionProjector,  // Q
  OracleReflection,   // O = I - 2Q
  SolutionCoherence,  // A = |s><u| + |u><s|, s/u uniform over solutions/non-solutions
};

/// Observable on the logical variable register. Variable j (0-based) is read
/// from `variable_qubits[j]`; `solutions` lists satisfying assignment indices
/// (bit j = x_{j+1}). `copies[j]`, when present, lists qubits that encode
/// x_{j+1} redundantly (GHZ-style); they are decoded relative to the
/// representative before the remaining qubits are traced out.
struct SolutionObservable {
  ObservableKind kind = ObservableKind::SolutionProjector;
  std::vector<Qubit> variable_qubits;
  std::vector<std::uint64_t> solutions;
  std::vector<std::vector<Qubit>> copies;
};

/// <psi|Obs|psi> for the normalized state.
double expectation(const StateVector& state, const SolutionObservable& observable);
/// branch_weight * expectation: the unnormalized trace Tr(rho Obs).
double weighted_expectation(const StateVector& state, const SolutionObservable& observable);

/// Probability distribution over the joint values of `qubits` (bit k of the
/// result index is qubits[k]).
std::vector<double> marginal_distribution(const StateVector& state, std::span<const Qubit> qubits);

/// Total probability of basis states for which `pred(index)` holds.
template <class Pred>
double probability_where(const StateVector& state, Pred pred) {
  double p = 0.0;
  const auto amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (pred(i)) p += std::norm(amps[i]);
  }
  return p;
}

namespace matrices {
Matrix2 x();
Matrix2 z();
Matrix2 h();
Matrix2 ry(double angle);
}  // namespace matrices

}  // namespace pfp
