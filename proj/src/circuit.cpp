#include "pfp/circuit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <utility>

namespace pfp {

std::string_view gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::Z: return "Z";
    case GateKind::RY: return "RY";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
    case GateKind::MCX: return "MCX";
    case GateKind::MCZ: return "MCZ";
  }
  return "?";
}

std::vector<Qubit> Gate::qubits() const {
  std::vector<Qubit> qs = controls;
  qs.push_back(target);
  return qs;
}

namespace gates {
Gate h(Qubit q) { return {GateKind::H, {}, q, 0.0, {}}; }
Gate x(Qubit q) { return {GateKind::X, {}, q, 0.0, {}}; }
Gate z(Qubit q) { return {GateKind::Z, {}, q, 0.0, {}}; }
Gate ry(Qubit q, double angle) { return {GateKind::RY, {}, q, angle, {}}; }
Gate cnot(Qubit control, Qubit target) { return {GateKind::CNOT, {control}, target, 0.0, {}}; }
Gate cz(Qubit control, Qubit target) { return {GateKind::CZ, {control}, target, 0.0, {}}; }
Gate mcx(std::vector<Qubit> controls, Qubit target) {
  return {GateKind::MCX, std::move(controls), target, 0.0, {}};
}
Gate mcz(std::vector<Qubit> controls, Qubit target) {
  return {GateKind::MCZ, std::move(controls), target, 0.0, {}};
}
}  // namespace gates

namespace {

void check_gate(const Gate& g, std::size_t width) {
  const auto name = std::string(gate_name(g.kind));
  if (g.target >= width) {
    throw CircuitError(name + " target " + std::to_string(g.target) + " outside width " +
                       std::to_string(width));
  }
  for (std::size_t i = 0; i < g.controls.size(); ++i) {
    const Qubit c = g.controls[i];
    if (c >= width) {
      throw CircuitError(name + " control " + std::to_string(c) + " outside width " +
                         std::to_string(width));
    }
    if (c == g.target) throw CircuitError(name + " target is also a control");
    for (std::size_t k = 0; k < i; ++k) {
      if (g.controls[k] == c) throw CircuitError(name + " repeats control " + std::to_string(c));
    }
  }
  switch (g.kind) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::Z:
    case GateKind::RY:
      if (!g.controls.empty()) throw CircuitError(name + " takes no controls");
      break;
    case GateKind::CNOT:
    case GateKind::CZ:
      if (g.controls.size() != 1) throw CircuitError(name + " takes exactly one control");
      break;
    case GateKind::MCX:
    case GateKind::MCZ:
      break;
  }
  if (g.kind == GateKind::RY && !std::isfinite(g.angle)) {
    throw CircuitError("RY angle is not finite");
  }
}

std::string_view stage_tail(std::string_view stage) {
  const auto slash = stage.find('/');
  return slash == std::string_view::npos ? std::string_view{} : stage.substr(slash);
}

bool stage_matches(std::string_view stage, std::string_view label) {
  if (stage.size() < label.size() || stage.substr(0, label.size()) != label) return false;
  return stage.size() == label.size() || stage[label.size()] == '/';
}

}  // namespace

std::vector<std::vector<std::size_t>> Circuit::layers() const {
  std::vector<std::vector<std::size_t>> out(depth_);
  for (std::size_t i = 0; i < gates_.size(); ++i) out[layer_[i]].push_back(i);
  return out;
}

Circuit& Circuit::append(Gate gate) {
  check_gate(gate, width_);
  std::size_t layer = 0;
  for (Qubit q : gate.controls) layer = std::max(layer, frontier_[q]);
  layer = std::max(layer, frontier_[gate.target]);
  for (Qubit q : gate.controls) frontier_[q] = layer + 1;
  frontier_[gate.target] = layer + 1;
  depth_ = std::max(depth_, layer + 1);
  layer_.push_back(layer);
  gates_.push_back(std::move(gate));
  return *this;
}

Circuit& Circuit::append(const Circuit& other, std::string_view stage) {
  if (other.width_ > width_) {
    throw CircuitError("appending a circuit of width " + std::to_string(other.width_) +
                       " onto width " + std::to_string(width_));
  }
  for (Gate g : other.gates_) {
    if (!stage.empty()) g.stage = std::string(stage) + std::string(stage_tail(g.stage));
    append(std::move(g));
  }
  return *this;
}

Circuit inverse(const Circuit& circuit) {
  Circuit out(circuit.width());
  const auto& gs = circuit.gates();
  for (auto it = gs.rbegin(); it != gs.rend(); ++it) {
    Gate g = *it;
    if (g.kind == GateKind::RY) g.angle = -g.angle;
    out.append(std::move(g));
  }
  return out;
}

Circuit concat(const Circuit& first, const Circuit& second) {
  Circuit out(std::max(first.width(), second.width()));
  out.append(first);
  out.append(second);
  return out;
}

Circuit with_stage_root(const Circuit& circuit, std::string_view root) {
  Circuit out(circuit.width());
  out.append(circuit, root);
  return out;
}

std::vector<std::size_t> staged_depth(const Circuit& circuit,
                                      std::span<const std::string> labels) {
  std::vector<std::size_t> result;
  result.reserve(labels.size());
  for (const auto& label : labels) {
    Circuit sub(circuit.width());
    for (const auto& g : circuit.gates()) {
      if (stage_matches(g.stage, label)) sub.append(g);
    }
    if (sub.empty()) throw CircuitError("unknown stage label '" + label + "'");
    result.push_back(sub.depth());
  }
  return result;
}

std::size_t staged_depth(const Circuit& circuit, std::string_view label) {
  const std::string labels[] = {std::string(label)};
  return staged_depth(circuit, labels).front();
}

void dump(std::ostream& out, const Circuit& circuit) {
  for (const auto& g : circuit.gates()) {
    out << gate_name(g.kind);
    if (g.kind == GateKind::RY) {
      char buf[32];
      auto res = std::to_chars(buf, buf + sizeof buf, g.angle, std::chars_format::general, 12);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << " c=";
    for (std::size_t i = 0; i < g.controls.size(); ++i) {
      if (i) out << ',';
      out << g.controls[i];
    }
    out << " t=" << g.target << '\n';
  }
}

std::string dump(const Circuit& circuit) {
  std::ostringstream out;
  dump(out, circuit);
  return out.str();
}

}  // namespace pfp
