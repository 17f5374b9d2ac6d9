#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pfp/circuit.hpp"
#include "pfp/cnf.hpp"
#include "pfp/search.hpp"
#include "pfp/sim.hpp"

namespace pfp::distnet {

using NodeId = int;
inline constexpr NodeId kMaster = 0;
inline constexpr NodeId kUnowned = -1;

/// A quantum operation touched a qubit its node does not own.
class LocalityViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class PartitionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class EventKind { BellPair, LocalGate, Measure, Send, Receive, Correction, Reset };

struct TraceEvent {
  EventKind kind = EventKind::LocalGate;
  NodeId node = kMaster;
  NodeId peer = kUnowned;  // Send/Receive/BellPair counterpart
  int round = 0;
  std::vector<Qubit> qubits;
  std::string detail;      // gate kind or basis
  int bit = -1;            // measurement outcome or message payload
};

struct ProtocolTrace {
  std::vector<TraceEvent> events;

  std::size_t count(EventKind kind) const;
  std::size_t classical_bits() const { return count(EventKind::Send); }
  std::size_t bell_pairs() const { return count(EventKind::BellPair); }
  /// One JSON object per line.
  void write_jsonl(std::ostream& out) const;
};

/// Forced outcomes (branch mode) or Born-rule sampling (trajectory mode).
class OutcomeSource {
 public:
  explicit OutcomeSource(Rng& rng) : rng_(&rng) {}
  explicit OutcomeSource(std::vector<int> outcomes) : forced_(std::move(outcomes)) {}

  MeasureMode next();
  bool exhausted() const { return !rng_ && cursor_ == forced_.size(); }

 private:
  Rng* rng_ = nullptr;
  std::vector<int> forced_;
  std::size_t cursor_ = 0;
};

/// Nodes sharing one global statevector. Every quantum operation names the
/// node performing it; touching an unowned qubit counts a violation and
/// throws LocalityViolation. Bell-pair creation is the only operation that
/// spans nodes.
class Network {
 public:
  Network(StateVector substrate, int num_nodes, std::vector<NodeId> owners);

  int num_nodes() const noexcept { return num_nodes_; }
  const StateVector& state() const noexcept { return state_; }
  NodeId owner(Qubit q) const { return owners_.at(q); }
  std::size_t violations() const noexcept { return violations_; }
  const ProtocolTrace& trace() const noexcept { return trace_; }

  void local_gate(NodeId node, const Gate& gate);
  void local_controlled_unitary(NodeId node, const std::vector<Qubit>& controls, Qubit target,
                                const Matrix2& u, const std::string& label);
  int local_measure(NodeId node, Qubit qubit, Basis basis, OutcomeSource& source);

  void send(NodeId from, NodeId to, int round, int bit);
  int receive(NodeId to, NodeId from, int round);

  /// Prepare (|00>+|11>)/sqrt2 on two |0> qubits and hand them to the nodes.
  void create_bell_pair(NodeId a, Qubit qa, NodeId b, Qubit qb);
  /// Return a consumed pair qubit to |0> (local X/H on its owner) and release it.
  void reset_and_release(Qubit q, Basis measured_in, int outcome);

  void record(TraceEvent event) { trace_.events.push_back(std::move(event)); }

 private:
  void require(NodeId node, Qubit q);

  StateVector state_;
  int num_nodes_;
  std::vector<NodeId> owners_;
  std::size_t violations_ = 0;
  ProtocolTrace trace_;
  struct Message {
    NodeId from;
    NodeId to;
    int round;
    int bit;
  };
  std::vector<Message> inbox_;
};

/// One control held on a remote node and the pair (e on the control's
/// node, e_tilde on the master) that carries it.
struct RemoteControl {
  Qubit control = 0;
  Qubit e = 0;
  Qubit e_tilde = 0;
};

struct ProtocolOptions {
  /// Test hook: apply the Z correction on the wrong X outcome.
  bool corrupt_correction = false;
};

struct ProtocolOutcome {
  std::vector<int> z_outcomes;
  std::vector<int> x_outcomes;
};

/// Three-step teleportation scheme. Pairs must already be shared. The master
/// applies U on `target` controlled by every e_tilde and `local_controls`.
ProtocolOutcome controlled_unitary_protocol(Network& net, NodeId master,
                                            const std::vector<RemoteControl>& remote,
                                            const std::vector<Qubit>& local_controls,
                                            Qubit target, const Matrix2& u,
                                            OutcomeSource& source, int round_base = 0,
                                            const ProtocolOptions& options = {});

/// Stand-alone m-control network: sub-node i+1 owns p_i = 2i and e_i = 2i+1,
/// the master owns e_tilde_i = 2m+i and t = 3m.
struct GateNetwork {
  int m = 0;
  Matrix2 u{};
  Network network;

  Qubit p(int i) const { return static_cast<Qubit>(2 * i); }
  Qubit e(int i) const { return static_cast<Qubit>(2 * i + 1); }
  Qubit e_tilde(int i) const { return static_cast<Qubit>(2 * m + i); }
  Qubit t() const { return static_cast<Qubit>(3 * m); }
};

/// `input` is an (m+1)-qubit state: bit i is p_{i+1}, bit m is t. Bell pairs
/// are created during setup.
GateNetwork setup(int m, const Matrix2& u, const StateVector& input);

struct GateRun {
  StateVector output;  // (m+1)-qubit state on p_1..p_m, t
  ProtocolOutcome outcome;
  ProtocolTrace trace;
  std::size_t violations = 0;
};

/// Branch mode: `outcomes` = m Z-outcomes then m X-outcomes.
GateRun run_protocol(GateNetwork net, const std::vector<int>& outcomes,
                     const ProtocolOptions& options = {});
GateRun run_protocol(GateNetwork net, Rng& rng, const ProtocolOptions& options = {});

/// Direct m-controlled-U on an (m+1)-qubit input, target bit m.
StateVector direct_controlled_unitary(const StateVector& input, const Matrix2& u);

/// 1 - |<a|b>| for normalized states.
double overlap_deviation(const StateVector& a, const StateVector& b);

/// Clause-to-node map. Node 0 is the master and also holds the formula and
/// control qubits and any variable that appears in no clause.
struct Partition {
  int nodes = 1;
  std::vector<NodeId> clause_nodes;

  static Partition monolithic(const cnf::CnfFormula& formula);
  static Partition one_clause_per_node(const cnf::CnfFormula& formula);
  /// {"nodes": K, "clause_nodes": [...]}
  static Partition from_json(const std::string& text);
  void validate(const cnf::CnfFormula& formula) const;
};

/// Owner of each qubit of the search register.
std::vector<NodeId> register_owners(const QubitLayout& layout, const Partition& partition);

struct DistributedStep {
  StateVector state;  // search register only; Bell-pool qubits traced back to |0>
  ProtocolTrace trace;
  std::size_t violations = 0;
  std::size_t protocol_runs = 0;
  std::size_t remote_controls = 0;  // summed over protocol runs
};

/// Run `circuit` on `state` with every node-spanning gate routed through the
/// protocol (master = owner of the gate's target).
DistributedStep run_distributed_circuit(const Circuit& circuit, const StateVector& state,
                                        const std::vector<NodeId>& owners, int num_nodes,
                                        Rng& rng, const ProtocolOptions& options = {});

/// Initial state prepared with node-local H/X and distributed CNOTs.
DistributedStep distributed_initial_state(const PfpEngine& engine, const Partition& partition,
                                          Rng& rng);

/// One PFP iteration (controlled oracle then controlled diffuser).
DistributedStep run_distributed_pfp_iteration(const PfpEngine& engine, const Partition& partition,
                                              const StateVector& state, double phi, Rng& rng);

struct DistributedRunReport {
  PfpRunReport run;
  /// Register state after each iteration, before the control measurement.
  std::vector<StateVector> states;
  std::size_t classical_bits = 0;
  std::size_t bell_pairs = 0;
  std::size_t violations = 0;
};

/// Full PFP run; protocol outcomes are sampled from `protocol_seed`.
DistributedRunReport run_distributed_pfp(const cnf::CnfFormula& formula,
                                         const Partition& partition, const PhiSchedule& schedule,
                                         const RunMode& mode, int max_iters,
                                         std::uint64_t protocol_seed);

}  // namespace pfp::distnet
