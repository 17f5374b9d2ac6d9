#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pfp {

using Qubit = std::size_t;

enum class GateKind { H, X, Z, RY, CNOT, CZ, MCX, MCZ };

std::string_view gate_name(GateKind kind);

/// One gate. For MCZ the target is a designated member of a symmetric
/// phase gate. `stage` is a '/'-separated label path used for staged depth
/// accounting ("omega/clauses", "phase", ...); empty means unlabeled.
struct Gate {
  GateKind kind = GateKind::X;
  std::vector<Qubit> controls;
  Qubit target = 0;
  double angle = 0.0;
  std::string stage;

  /// All qubits touched: controls then target.
  std::vector<Qubit> qubits() const;

  friend bool operator==(const Gate&, const Gate&) = default;
};

namespace gates {
Gate h(Qubit q);
Gate x(Qubit q);
Gate z(Qubit q);
Gate ry(Qubit q, double angle);
Gate cnot(Qubit control, Qubit target);
Gate cz(Qubit control, Qubit target);
Gate mcx(std::vector<Qubit> controls, Qubit target);
Gate mcz(std::vector<Qubit> controls, Qubit target);
}  // namespace gates

class CircuitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ordered gate list over `width` qubits with ASAP layering: each appended
/// gate lands one layer after the latest layer already occupying any of its
/// qubits. Multi-controlled gates occupy a single layer slot on every qubit
/// they touch (no decomposition).
class Circuit {
 public:
  explicit Circuit(std::size_t width = 0) : width_(width), frontier_(width, 0) {}

  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return gates_.size(); }
  bool empty() const noexcept { return gates_.empty(); }
  const std::vector<Gate>& gates() const noexcept { return gates_; }
  const Gate& operator[](std::size_t i) const { return gates_.at(i); }

  /// Layer (0-based) of gate i.
  std::size_t layer_of(std::size_t i) const { return layer_.at(i); }
  std::size_t depth() const noexcept { return depth_; }
  /// Gate indices grouped by layer.
  std::vector<std::vector<std::size_t>> layers() const;

  Circuit& append(Gate gate);
  /// Append every gate of `other`; if `stage` is nonempty it replaces each
  /// gate's root label.
  Circuit& append(const Circuit& other, std::string_view stage = {});

  friend bool operator==(const Circuit& a, const Circuit& b) {
    return a.width_ == b.width_ && a.gates_ == b.gates_;
  }

 private:
  std::size_t width_;
  std::vector<Gate> gates_;
  std::vector<std::size_t> layer_;
  std::vector<std::size_t> frontier_;  // per qubit: next free layer
  std::size_t depth_ = 0;
};

inline std::size_t depth(const Circuit& c) { return c.depth(); }

/// Gates reversed; RY(a) becomes RY(-a); every other kind is self-inverse.
Circuit inverse(const Circuit& circuit);

Circuit concat(const Circuit& first, const Circuit& second);

/// Replace the first component of every gate's stage label with `root`.
Circuit with_stage_root(const Circuit& circuit, std::string_view root);

/// Depth of the sub-circuit formed by the gates whose stage equals a label
/// or lies under it ("omega" matches "omega/clauses"). One entry per label.
/// Throws CircuitError for a label that matches no gate.
std::vector<std::size_t> staged_depth(const Circuit& circuit,
                                      std::span<const std::string> labels);
std::size_t staged_depth(const Circuit& circuit, std::string_view label);

/// One gate per line: "<kind> [angle] c=<controls> t=<target>".
void dump(std::ostream& out, const Circuit& circuit);
std::string dump(const Circuit& circuit);

}  // namespace pfp
