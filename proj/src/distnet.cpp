#include "pfp/distnet.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

namespace pfp::distnet {

namespace {

const char* kind_name(EventKind k) {
  switch (k) {
    case EventKind::BellPair: return "bell_pair";
    case EventKind::LocalGate: return "gate";
    case EventKind::Measure: return "measure";
    case EventKind::Send: return "send";
    case EventKind::Receive: return "receive";
    case EventKind::Correction: return "correction";
    case EventKind::Reset: return "reset";
  }
  return "?";
}

}  // namespace

std::size_t ProtocolTrace::count(EventKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [&](const TraceEvent& e) { return e.kind == kind; }));
}

void ProtocolTrace::write_jsonl(std::ostream& out) const {
  for (const auto& e : events) {
    nlohmann::json j{{"event", kind_name(e.kind)}, {"node", e.node}, {"qubits", e.qubits}};
    if (e.peer != kUnowned) j["peer"] = e.peer;
    if (e.round) j["round"] = e.round;
    if (!e.detail.empty()) j["detail"] = e.detail;
    if (e.bit >= 0) j["bit"] = e.bit;
    out << j.dump() << '\n';
  }
}

MeasureMode OutcomeSource::next() {
  if (rng_) return Trajectory{rng_};
  if (cursor_ >= forced_.size()) throw std::logic_error("branch outcome vector exhausted");
  return ConditionOn{forced_[cursor_++]};
}

Network::Network(StateVector substrate, int num_nodes, std::vector<NodeId> owners)
    : state_(std::move(substrate)), num_nodes_(num_nodes), owners_(std::move(owners)) {
  if (num_nodes < 1) throw std::invalid_argument("network needs at least one node");
  if (owners_.size() != state_.width()) {
    throw std::invalid_argument("ownership list does not cover the substrate");
  }
  for (NodeId o : owners_) {
    if (o != kUnowned && (o < 0 || o >= num_nodes)) throw std::invalid_argument("owner out of range");
  }
}

void Network::require(NodeId node, Qubit q) {
  if (q >= owners_.size() || owners_[q] != node) {
    ++violations_;
    throw LocalityViolation("node " + std::to_string(node) + " does not own qubit " +
                            std::to_string(q));
  }
}

void Network::local_gate(NodeId node, const Gate& gate) {
  const auto qs = gate.qubits();
  for (Qubit q : qs) require(node, q);
  apply(state_, gate);
  record({EventKind::LocalGate, node, kUnowned, 0, qs, std::string(gate_name(gate.kind)), -1});
}

void Network::local_controlled_unitary(NodeId node, const std::vector<Qubit>& controls,
                                       Qubit target, const Matrix2& u, const std::string& label) {
  for (Qubit q : controls) require(node, q);
  require(node, target);
  apply_controlled_unitary(state_, controls, target, u);
  auto qs = controls;
  qs.push_back(target);
  record({EventKind::LocalGate, node, kUnowned, 0, std::move(qs), label, -1});
}

int Network::local_measure(NodeId node, Qubit qubit, Basis basis, OutcomeSource& source) {
  require(node, qubit);
  const auto rec = measure(state_, qubit, basis, source.next());
  record({EventKind::Measure, node, kUnowned, 0, {qubit}, basis == Basis::Z ? "Z" : "X",
          rec.outcome});
  return rec.outcome;
}

void Network::send(NodeId from, NodeId to, int round, int bit) {
  inbox_.push_back({from, to, round, bit});
  record({EventKind::Send, from, to, round, {}, {}, bit});
}

int Network::receive(NodeId to, NodeId from, int round) {
  const auto it = std::find_if(inbox_.begin(), inbox_.end(), [&](const Message& m) {
    return m.to == to && m.from == from && m.round == round;
  });
  if (it == inbox_.end()) throw std::logic_error("no message waiting for node " + std::to_string(to));
  const int bit = it->bit;
  inbox_.erase(it);
  record({EventKind::Receive, to, from, round, {}, {}, bit});
  return bit;
}

void Network::create_bell_pair(NodeId a, Qubit qa, NodeId b, Qubit qb) {
  require(kUnowned, qa);
  require(kUnowned, qb);
  apply(state_, gates::h(qa));
  apply(state_, gates::cnot(qa, qb));
  owners_[qa] = a;
  owners_[qb] = b;
  record({EventKind::BellPair, a, b, 0, {qa, qb}, {}, -1});
}

void Network::reset_and_release(Qubit q, Basis measured_in, int outcome) {
  const NodeId node = owners_.at(q);
  if (node == kUnowned) throw std::logic_error("releasing an unowned qubit");
  if (measured_in == Basis::X) apply(state_, gates::h(q));
  if (outcome == 1) apply(state_, gates::x(q));
  owners_[q] = kUnowned;
  record({EventKind::Reset, node, kUnowned, 0, {q}, {}, -1});
}

ProtocolOutcome controlled_unitary_protocol(Network& net, NodeId master,
                                            const std::vector<RemoteControl>& remote,
                                            const std::vector<Qubit>& local_controls,
                                            Qubit target, const Matrix2& u,
                                            OutcomeSource& source, int round_base,
                                            const ProtocolOptions& options) {
  const int forward = round_base + 1;
  const int backward = round_base + 2;
  ProtocolOutcome out;

  // Step 1: copy each remote control onto its pair half at the master.
  for (const auto& rc : remote) {
    const NodeId node = net.owner(rc.control);
    net.local_gate(node, gates::cnot(rc.control, rc.e));
    const int z = net.local_measure(node, rc.e, Basis::Z, source);
    out.z_outcomes.push_back(z);
    net.send(node, master, forward, z);
  }
  for (const auto& rc : remote) {
    if (net.receive(master, net.owner(rc.control), forward) == 1) {
      net.local_gate(master, gates::x(rc.e_tilde));
      net.record({EventKind::Correction, master, kUnowned, forward, {rc.e_tilde}, "X", 1});
    }
  }

  // Step 2.
  std::vector<Qubit> controls;
  for (const auto& rc : remote) controls.push_back(rc.e_tilde);
  controls.insert(controls.end(), local_controls.begin(), local_controls.end());
  net.local_controlled_unitary(master, controls, target, u, "controlled-U");

  // Step 3: erase the copies; a |-> outcome leaves a phase on the control.
  for (const auto& rc : remote) {
    const int x = net.local_measure(master, rc.e_tilde, Basis::X, source);
    out.x_outcomes.push_back(x);
    net.send(master, net.owner(rc.control), backward, x);
  }
  for (const auto& rc : remote) {
    const NodeId node = net.owner(rc.control);
    const int bit = net.receive(node, master, backward);
    if ((bit == 1) != options.corrupt_correction) {
      net.local_gate(node, gates::z(rc.control));
      net.record({EventKind::Correction, node, kUnowned, backward, {rc.control}, "Z", bit});
    }
  }
  return out;
}

GateNetwork setup(int m, const Matrix2& u, const StateVector& input) {
  if (m < 1 || m > 9) throw std::invalid_argument("control count must be in [1, 9]");
  if (input.width() != static_cast<std::size_t>(m) + 1) {
    throw std::invalid_argument("input must have m+1 qubits");
  }
  const std::size_t width = 3 * static_cast<std::size_t>(m) + 1;
  std::vector<Amplitude> amps(std::size_t{1} << width, 0.0);
  for (std::size_t k = 0; k < input.dimension(); ++k) {
    std::size_t idx = 0;
    for (int i = 0; i < m; ++i) {
      if ((k >> i) & 1U) idx |= std::size_t{1} << (2 * i);
    }
    if ((k >> m) & 1U) idx |= std::size_t{1} << (3 * m);
    amps[idx] = input[k];
  }
  std::vector<NodeId> owners(width, kUnowned);
  for (int i = 0; i < m; ++i) owners[static_cast<std::size_t>(2 * i)] = i + 1;
  owners[width - 1] = kMaster;

  GateNetwork g{m, u, Network(StateVector::from_amplitudes(std::move(amps)), m + 1, owners)};
  for (int i = 0; i < m; ++i) g.network.create_bell_pair(i + 1, g.e(i), kMaster, g.e_tilde(i));
  return g;
}

namespace {

GateRun finish(GateNetwork& g, OutcomeSource& source, const ProtocolOptions& options) {
  std::vector<RemoteControl> remote;
  for (int i = 0; i < g.m; ++i) remote.push_back({g.p(i), g.e(i), g.e_tilde(i)});
  GateRun run;
  run.outcome =
      controlled_unitary_protocol(g.network, kMaster, remote, {}, g.t(), g.u, source, 0, options);

  // Pair qubits are now |z_i> and |x_i>_X; rotate the latter and slice.
  StateVector s = g.network.state();
  std::size_t fixed = 0;
  for (int i = 0; i < g.m; ++i) {
    apply(s, gates::h(g.e_tilde(i)));
    if (run.outcome.z_outcomes[static_cast<std::size_t>(i)]) fixed |= std::size_t{1} << g.e(i);
    if (run.outcome.x_outcomes[static_cast<std::size_t>(i)]) fixed |= std::size_t{1} << g.e_tilde(i);
  }
  std::vector<Amplitude> out(std::size_t{1} << (g.m + 1));
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::size_t idx = fixed;
    for (int i = 0; i < g.m; ++i) {
      if ((k >> i) & 1U) idx |= std::size_t{1} << g.p(i);
    }
    if ((k >> g.m) & 1U) idx |= std::size_t{1} << g.t();
    out[k] = s[idx];
  }
  run.output = StateVector::from_amplitudes(std::move(out));
  run.output.set_branch_weight(g.network.state().branch_weight());
  run.trace = g.network.trace();
  run.violations = g.network.violations();
  return run;
}

}  // namespace

GateRun run_protocol(GateNetwork net, const std::vector<int>& outcomes,
                     const ProtocolOptions& options) {
  if (outcomes.size() != 2 * static_cast<std::size_t>(net.m)) {
    throw std::invalid_argument("branch mode needs 2m outcomes");
  }
  for (int o : outcomes) {
    if (o != 0 && o != 1) throw std::invalid_argument("branch outcomes must be 0 or 1");
  }
  OutcomeSource source(outcomes);
  return finish(net, source, options);
}

GateRun run_protocol(GateNetwork net, Rng& rng, const ProtocolOptions& options) {
  OutcomeSource source(rng);
  return finish(net, source, options);
}

StateVector direct_controlled_unitary(const StateVector& input, const Matrix2& u) {
  if (input.width() < 2) throw std::invalid_argument("need at least one control and a target");
  StateVector out = input;
  std::vector<Qubit> controls(input.width() - 1);
  for (std::size_t i = 0; i < controls.size(); ++i) controls[i] = i;
  apply_controlled_unitary(out, controls, input.width() - 1, u);
  return out;
}

double overlap_deviation(const StateVector& a, const StateVector& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("state dimensions differ");
  Amplitude dot = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) dot += std::conj(a[i]) * b[i];
  return 1.0 - std::abs(dot) / std::sqrt(a.norm_squared() * b.norm_squared());
}

Partition Partition::monolithic(const cnf::CnfFormula& formula) {
  return {1, std::vector<NodeId>(formula.num_clauses(), kMaster)};
}

Partition Partition::one_clause_per_node(const cnf::CnfFormula& formula) {
  Partition p{static_cast<int>(formula.num_clauses()) + 1, {}};
  for (std::size_t c = 0; c < formula.num_clauses(); ++c) p.clause_nodes.push_back(static_cast<NodeId>(c) + 1);
  return p;
}

Partition Partition::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    Partition p;
    p.nodes = j.at("nodes").get<int>();
    p.clause_nodes = j.at("clause_nodes").get<std::vector<NodeId>>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw PartitionError(std::string("bad partition document: ") + e.what());
  }
}

void Partition::validate(const cnf::CnfFormula& formula) const {
  if (nodes < 1) throw PartitionError("partition needs at least one node");
  if (clause_nodes.size() != formula.num_clauses()) {
    throw PartitionError("partition lists " + std::to_string(clause_nodes.size()) +
                         " clauses, formula has " + std::to_string(formula.num_clauses()));
  }
  for (NodeId n : clause_nodes) {
    if (n < 0 || n >= nodes) throw PartitionError("clause assigned to unknown node " + std::to_string(n));
  }
}

std::vector<NodeId> register_owners(const QubitLayout& layout, const Partition& partition) {
  std::vector<NodeId> owners(layout.total_width, kMaster);
  for (std::size_t c = 0; c < layout.clause_qubits.size(); ++c) {
    const NodeId node = partition.clause_nodes.at(c);
    owners[layout.clause_qubits[c]] = node;
  }
  for (const auto& [key, q] : layout.occurrence_assignment) owners[q] = partition.clause_nodes.at(key.first);
  return owners;
}

DistributedStep run_distributed_circuit(const Circuit& circuit, const StateVector& state,
                                        const std::vector<NodeId>& owners, int num_nodes,
                                        Rng& rng, const ProtocolOptions& options) {
  const std::size_t w = state.width();
  if (circuit.width() != w || owners.size() != w) {
    throw std::invalid_argument("circuit, state and ownership widths differ");
  }
  auto remote_of = [&](const Gate& g) {
    std::vector<Qubit> remote;
    for (Qubit c : g.controls) {
      if (owners[c] != owners[g.target]) remote.push_back(c);
    }
    return remote;
  };
  std::size_t pool = 0;
  for (const auto& g : circuit.gates()) pool = std::max(pool, remote_of(g).size());

  std::vector<Amplitude> amps(std::size_t{1} << (w + 2 * pool), 0.0);
  std::copy(state.amplitudes().begin(), state.amplitudes().end(), amps.begin());
  auto sub = StateVector::from_amplitudes(std::move(amps));
  sub.set_branch_weight(state.branch_weight());
  auto all_owners = owners;
  all_owners.resize(w + 2 * pool, kUnowned);
  Network net(std::move(sub), num_nodes, std::move(all_owners));
  OutcomeSource source(rng);

  DistributedStep step{StateVector(0), {}, 0, 0, 0};
  int round = 0;
  for (const auto& g : circuit.gates()) {
    const NodeId master = owners[g.target];
    const auto remote_controls = remote_of(g);
    if (remote_controls.empty()) {
      net.local_gate(master, g);
      continue;
    }
    std::vector<RemoteControl> remote;
    std::vector<Qubit> local;
    for (Qubit c : g.controls) {
      if (owners[c] == master) local.push_back(c);
    }
    for (std::size_t k = 0; k < remote_controls.size(); ++k) {
      const Qubit e = w + 2 * k;
      remote.push_back({remote_controls[k], e, e + 1});
      net.create_bell_pair(owners[remote_controls[k]], e, master, e + 1);
    }
    const bool phase = g.kind == GateKind::CZ || g.kind == GateKind::MCZ;
    const auto outcome = controlled_unitary_protocol(
        net, master, remote, local, g.target, phase ? matrices::z() : matrices::x(), source,
        round, options);
    round += 2;
    for (std::size_t k = 0; k < remote.size(); ++k) {
      net.reset_and_release(remote[k].e, Basis::Z, outcome.z_outcomes[k]);
      net.reset_and_release(remote[k].e_tilde, Basis::X, outcome.x_outcomes[k]);
    }
    ++step.protocol_runs;
    step.remote_controls += remote.size();
  }

  const auto full = net.state().amplitudes();
  std::vector<Amplitude> out(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(std::size_t{1} << w));
  step.state = StateVector::from_amplitudes(std::move(out));
  step.state.set_branch_weight(net.state().branch_weight());
  step.trace = net.trace();
  step.violations = net.violations();
  return step;
}

DistributedStep distributed_initial_state(const PfpEngine& engine, const Partition& partition,
                                          Rng& rng) {
  partition.validate(engine.formula());
  const auto& layout = engine.layout();
  const auto d = initial_directives(layout);
  Circuit prep(layout.total_width);
  for (const auto& g : d.ghz_groups) {
    prep.append(gates::h(g.front()));
    for (std::size_t k = 1; k < g.size(); ++k) prep.append(gates::cnot(g.front(), g[k]));
  }
  for (Qubit q : d.plus) prep.append(gates::h(q));
  for (Qubit q : d.ones) prep.append(gates::x(q));
  return run_distributed_circuit(prep, StateVector(layout.total_width),
                                 register_owners(layout, partition), partition.nodes, rng);
}

DistributedStep run_distributed_pfp_iteration(const PfpEngine& engine, const Partition& partition,
                                              const StateVector& state, double phi, Rng& rng) {
  partition.validate(engine.formula());
  return run_distributed_circuit(concat(engine.oracle(phi), engine.diffuser()), state,
                                 register_owners(engine.layout(), partition), partition.nodes, rng);
}

DistributedRunReport run_distributed_pfp(const cnf::CnfFormula& formula,
                                         const Partition& partition, const PhiSchedule& schedule,
                                         const RunMode& mode, int max_iters,
                                         std::uint64_t protocol_seed) {
  const PfpEngine engine(formula);
  Rng rng(protocol_seed);
  DistributedRunReport report;
  auto absorb = [&](const DistributedStep& s) {
    report.classical_bits += s.trace.classical_bits();
    report.bell_pairs += s.trace.bell_pairs();
    report.violations += s.violations;
  };
  auto init = distributed_initial_state(engine, partition, rng);
  absorb(init);
  report.run = pfp_run(engine, std::move(init.state), schedule, mode, max_iters,
                       [&](StateVector& state, int, double phi) {
                         auto s = run_distributed_pfp_iteration(engine, partition, state, phi, rng);
                         absorb(s);
                         state = std::move(s.state);
                         report.states.push_back(state);
                       });
  return report;
}

}  // namespace pfp::distnet
