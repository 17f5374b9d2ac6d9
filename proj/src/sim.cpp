#include "pfp/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace pfp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

void check_qubit(const StateVector& s, Qubit q) {
  if (q >= s.width()) {
    throw SimError("qubit " + std::to_string(q) + " outside state width " +
                   std::to_string(s.width()));
  }
}

std::size_t mask_of(std::span<const Qubit> qs) {
  std::size_t m = 0;
  for (Qubit q : qs) m |= std::size_t{1} << q;
  return m;
}

// Calls f(i0, i1) for every index pair differing only in `target`, with
// i0 having the target bit clear and all `cmask` bits set.
template <class F>
void for_each_pair(std::size_t dim, Qubit target, std::size_t cmask, F&& f) {
  const std::size_t tbit = std::size_t{1} << target;
  const std::size_t low = tbit - 1;
  const std::size_t half = dim >> 1;
  for (std::size_t k = 0; k < half; ++k) {
    const std::size_t i0 = ((k & ~low) << 1) | (k & low);
    if ((i0 & cmask) != cmask) continue;
    f(i0, i0 | tbit);
  }
}

void apply_matrix(std::span<Amplitude> amps, Qubit target, std::size_t cmask, const Matrix2& u) {
  for_each_pair(amps.size(), target, cmask, [&](std::size_t i0, std::size_t i1) {
    const Amplitude a = amps[i0];
    const Amplitude b = amps[i1];
    amps[i0] = u[0] * a + u[1] * b;
    amps[i1] = u[2] * a + u[3] * b;
  });
}

void apply_flip(std::span<Amplitude> amps, Qubit target, std::size_t cmask) {
  for_each_pair(amps.size(), target, cmask,
                [&](std::size_t i0, std::size_t i1) { std::swap(amps[i0], amps[i1]); });
}

void apply_phase_flip(std::span<Amplitude> amps, std::size_t mask) {
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if ((i & mask) == mask) amps[i] = -amps[i];
  }
}

}  // namespace

namespace matrices {
Matrix2 x() { return {0.0, 1.0, 1.0, 0.0}; }
Matrix2 z() { return {1.0, 0.0, 0.0, -1.0}; }
Matrix2 h() {
  const double r = 1.0 / std::sqrt(2.0);
  return {r, r, r, -r};
}
Matrix2 ry(double angle) {
  const double c = std::cos(angle / 2);
  const double s = std::sin(angle / 2);
  return {c, -s, s, c};
}
}  // namespace matrices

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(mix_seed(seed, stream)) {}

Rng Rng::split(std::uint64_t stream) const { return Rng(mix_seed(seed_, stream_), stream); }

StateVector::StateVector(std::size_t width) : width_(width) {
  if (width > 30) throw SimError("state width " + std::to_string(width) + " too large");
  amps_.assign(std::size_t{1} << width, Amplitude{0.0, 0.0});
  amps_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(std::vector<Amplitude> amplitudes) {
  if (amplitudes.empty() || !std::has_single_bit(amplitudes.size())) {
    throw SimError("amplitude count must be a power of two");
  }
  StateVector s(static_cast<std::size_t>(std::countr_zero(amplitudes.size())));
  s.amps_ = std::move(amplitudes);
  return s;
}

double StateVector::norm_squared() const {
  double n = 0.0;
  for (const auto& a : amps_) n += std::norm(a);
  return n;
}

void StateVector::normalize() {
  const double n = norm_squared();
  if (n < kZeroProbability) throw SimError("cannot normalize a zero state");
  const double inv = 1.0 / std::sqrt(n);
  for (auto& a : amps_) a *= inv;
}

StateVector init_state(const InitDirectives& d) {
  std::vector<int> seen(d.width, 0);
  auto claim = [&](Qubit q) {
    if (q >= d.width) throw SimError("init directive qubit " + std::to_string(q) + " out of range");
    if (seen[q]++) throw SimError("qubit " + std::to_string(q) + " listed twice in init directives");
  };
  for (const auto& g : d.ghz_groups) {
    if (g.empty()) throw SimError("empty GHZ group");
    for (Qubit q : g) claim(q);
  }
  for (Qubit q : d.plus) claim(q);
  for (Qubit q : d.zeros) claim(q);
  for (Qubit q : d.ones) claim(q);
  for (std::size_t q = 0; q < d.width; ++q) {
    if (!seen[q]) throw SimError("qubit " + std::to_string(q) + " missing from init directives");
  }

  StateVector s(d.width);
  for (const auto& g : d.ghz_groups) {
    apply(s, gates::h(g.front()));
    for (std::size_t k = 1; k < g.size(); ++k) apply(s, gates::cnot(g.front(), g[k]));
  }
  for (Qubit q : d.plus) apply(s, gates::h(q));
  for (Qubit q : d.ones) apply(s, gates::x(q));
  return s;
}

StateVector random_state(std::size_t width, Rng& rng) {
  StateVector s(width);
  auto gauss = [&] {
    const double u1 = 1.0 - rng.uniform();  // (0, 1]
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  };
  for (auto& a : s.amplitudes()) a = Amplitude(gauss(), gauss());
  s.normalize();
  return s;
}

void apply(StateVector& state, const Gate& g) {
  check_qubit(state, g.target);
  for (Qubit c : g.controls) check_qubit(state, c);
  auto amps = state.amplitudes();
  const std::size_t cmask = mask_of(g.controls);
  switch (g.kind) {
    case GateKind::H: apply_matrix(amps, g.target, 0, matrices::h()); break;
    case GateKind::X: apply_flip(amps, g.target, 0); break;
    case GateKind::Z: apply_phase_flip(amps, std::size_t{1} << g.target); break;
    case GateKind::RY: apply_matrix(amps, g.target, 0, matrices::ry(g.angle)); break;
    case GateKind::CNOT:
    case GateKind::MCX: apply_flip(amps, g.target, cmask); break;
    case GateKind::CZ:
    case GateKind::MCZ: apply_phase_flip(amps, cmask | (std::size_t{1} << g.target)); break;
  }
}

void apply(StateVector& state, const Circuit& circuit) {
  if (circuit.width() != state.width()) {
    throw SimError("circuit width " + std::to_string(circuit.width()) + " != state width " +
                   std::to_string(state.width()));
  }
  for (const auto& g : circuit.gates()) apply(state, g);
}

void apply_controlled_unitary(StateVector& state, std::span<const Qubit> controls, Qubit target,
                              const Matrix2& u) {
  check_qubit(state, target);
  for (Qubit c : controls) {
    check_qubit(state, c);
    if (c == target) throw SimError("controlled unitary target is also a control");
  }
  apply_matrix(state.amplitudes(), target, mask_of(controls), u);
}

double outcome_probability(const StateVector& state, Qubit qubit, Basis basis, int outcome) {
  check_qubit(state, qubit);
  if (outcome != 0 && outcome != 1) throw SimError("measurement outcome must be 0 or 1");
  const std::size_t bit = std::size_t{1} << qubit;
  const auto amps = state.amplitudes();
  double p = 0.0;
  if (basis == Basis::Z) {
    for (std::size_t i = 0; i < amps.size(); ++i) {
      if (((i & bit) != 0) == (outcome == 1)) p += std::norm(amps[i]);
    }
  } else {
    const double sign = outcome == 0 ? 1.0 : -1.0;
    for_each_pair(amps.size(), qubit, 0, [&](std::size_t i0, std::size_t i1) {
      p += 0.5 * std::norm(amps[i0] + sign * amps[i1]);
    });
  }
  return p / state.norm_squared();
}

MeasurementRecord measure(StateVector& state, Qubit qubit, Basis basis, MeasureMode mode) {
  check_qubit(state, qubit);
  if (basis == Basis::X) apply(state, gates::h(qubit));
  const double p1 = outcome_probability(state, qubit, Basis::Z, 1);
  const double p0 = 1.0 - p1;

  int outcome = 0;
  bool conditioning = false;
  if (const auto* t = std::get_if<Trajectory>(&mode)) {
    outcome = t->rng->uniform() < p0 ? 0 : 1;
  } else {
    outcome = std::get<ConditionOn>(mode).outcome;
    if (outcome != 0 && outcome != 1) throw SimError("measurement outcome must be 0 or 1");
    conditioning = true;
  }
  const double p = outcome == 1 ? p1 : p0;
  if (p < kZeroProbability) {
    if (basis == Basis::X) apply(state, gates::h(qubit));
    throw SimError("conditioning on zero-probability outcome " + std::to_string(outcome) +
                   " of qubit " + std::to_string(qubit));
  }

  const std::size_t bit = std::size_t{1} << qubit;
  auto amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (((i & bit) != 0) != (outcome == 1)) amps[i] = 0.0;
  }
  state.normalize();
  if (conditioning) state.set_branch_weight(state.branch_weight() * p);
  if (basis == Basis::X) apply(state, gates::h(qubit));
  return {qubit, basis, outcome, p};
}

namespace {

std::uint64_t gather_bits(std::size_t index, std::span<const Qubit> qubits) {
  std::uint64_t v = 0;
  for (std::size_t k = 0; k < qubits.size(); ++k) {
    v |= static_cast<std::uint64_t>((index >> qubits[k]) & 1U) << k;
  }
  return v;
}

}  // namespace

std::vector<double> marginal_distribution(const StateVector& state, std::span<const Qubit> qubits) {
  for (Qubit q : qubits) check_qubit(state, q);
  std::vector<double> dist(std::size_t{1} << qubits.size(), 0.0);
  const auto amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) dist[gather_bits(i, qubits)] += std::norm(amps[i]);
  return dist;
}

double expectation(const StateVector& state, const SolutionObservable& obs) {
  const auto& vq = obs.variable_qubits;
  for (Qubit q : vq) check_qubit(state, q);
  const std::size_t n = vq.size();
  const std::uint64_t num_assignments = std::uint64_t{1} << n;
  std::vector<char> marked(num_assignments, 0);
  for (auto s : obs.solutions) {
    if (s >= num_assignments) throw SimError("solution index outside variable register");
    marked[s] = 1;
  }
  const double m = static_cast<double>(std::count(marked.begin(), marked.end(), 1));
  const double big_n = static_cast<double>(num_assignments);
  const auto amps = state.amplitudes();
  const double norm = state.norm_squared();

  if (obs.kind != ObservableKind::SolutionCoherence) {
    double q = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
      if (marked[gather_bits(i, vq)]) q += std::norm(amps[i]);
    }
    q /= norm;
    return obs.kind == ObservableKind::SolutionProjector ? q : 1.0 - 2.0 * q;
  }

  // Tr(rho A) = 2 Re sum_r <s|psi_r> <psi_r|u> over configurations r of the
  // traced-out qubits.
  if (m == 0.0 || m == big_n) return 0.0;
  std::vector<Qubit> rest;
  std::vector<char> is_var(state.width(), 0);
  for (Qubit q : vq) is_var[q] = 1;
  if (!obs.copies.empty() && obs.copies.size() != n) {
    throw SimError("observable copies must list one entry per variable");
  }
  std::vector<std::size_t> copy_masks(obs.copies.size(), 0);
  for (std::size_t j = 0; j < obs.copies.size(); ++j) {
    for (Qubit q : obs.copies[j]) {
      check_qubit(state, q);
      copy_masks[j] |= std::size_t{1} << q;
    }
  }
  auto decode = [&](std::size_t i) {
    for (std::size_t j = 0; j < copy_masks.size(); ++j) {
      if ((i >> vq[j]) & 1U) i ^= copy_masks[j];
    }
    return i;
  };
  for (Qubit q = 0; q < state.width(); ++q) {
    if (!is_var[q]) rest.push_back(q);
  }
  std::vector<Amplitude> on_solutions(std::size_t{1} << rest.size());
  std::vector<Amplitude> off_solutions(on_solutions.size());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const auto r = gather_bits(decode(i), rest);
    if (marked[gather_bits(i, vq)]) {
      on_solutions[r] += amps[i];
    } else {
      off_solutions[r] += amps[i];
    }
  }
  double acc = 0.0;
  for (std::size_t r = 0; r < on_solutions.size(); ++r) {
    acc += (on_solutions[r] * std::conj(off_solutions[r])).real();
  }
  return 2.0 * acc / (std::sqrt(m) * std::sqrt(big_n - m)) / norm;
}

double weighted_expectation(const StateVector& state, const SolutionObservable& observable) {
  return state.branch_weight() * expectation(state, observable);
}

}  // namespace pfp
