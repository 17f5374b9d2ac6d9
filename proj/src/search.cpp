#include "pfp/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

namespace pfp {

namespace {

std::uint64_t gather_bits(std::size_t index, const std::vector<Qubit>& qubits) {
  std::uint64_t v = 0;
  for (std::size_t k = 0; k < qubits.size(); ++k) v |= std::uint64_t{(index >> qubits[k]) & 1U} << k;
  return v;
}

cnf::Assignment measure_register(StateVector& state, const std::vector<Qubit>& reps, Rng& rng) {
  cnf::Assignment a(reps.size());
  for (std::size_t j = 0; j < reps.size(); ++j) {
    a[j] = measure(state, reps[j], Basis::Z, Trajectory{&rng}).outcome == 1;
  }
  return a;
}

}  // namespace

int default_max_iters(std::uint64_t search_space) {
  return static_cast<int>(
             std::ceil(3 * std::numbers::pi / 4 * std::sqrt(static_cast<double>(search_space)))) +
         10;
}

PfpEngine::PfpEngine(cnf::CnfFormula formula)
    : formula_(std::move(formula)),
      layout_(build_layout(formula_)),
      diffuser_(build_controlled_diffuser(layout_)) {}

Circuit PfpEngine::oracle(double phi) const { return build_controlled_oracle(layout_, formula_, phi); }

StateVector PfpEngine::initial_state() const { return init_state(initial_directives(layout_)); }

void PfpEngine::apply_iteration(StateVector& state, double phi) const {
  apply(state, oracle(phi));
  apply(state, diffuser_);
}

SolutionObservable PfpEngine::observable(ObservableKind kind,
                                         const std::vector<std::uint64_t>& solutions) const {
  SolutionObservable obs;
  obs.kind = kind;
  obs.variable_qubits = layout_.representatives();
  obs.solutions = solutions;
  for (const auto& g : layout_.group_members) obs.copies.emplace_back(g.begin() + 1, g.end());
  return obs;
}

double PfpEngine::leakage(const StateVector& state) const {
  std::size_t ancilla_mask = std::size_t{1} << layout_.formula_qubit;
  for (Qubit q : layout_.clause_qubits) ancilla_mask |= std::size_t{1} << q;
  const double total = state.norm_squared();
  const double bad = probability_where(state, [&](std::size_t i) {
    if (i & ancilla_mask) return true;
    for (const auto& g : layout_.group_members) {
      const auto rep = (i >> g.front()) & 1U;
      for (Qubit q : g) {
        if (((i >> q) & 1U) != rep) return true;
      }
    }
    return false;
  });
  return bad / total;
}

PfpRunReport pfp_run(const cnf::CnfFormula& formula, const PhiSchedule& schedule,
                     const RunMode& mode, int max_iters) {
  const PfpEngine engine(formula);
  return pfp_run(engine, engine.initial_state(), schedule, mode, max_iters,
                 [&](StateVector& s, int, double phi) { engine.apply_iteration(s, phi); });
}

PfpRunReport pfp_run(const PfpEngine& engine, StateVector initial, const PhiSchedule& schedule,
                     const RunMode& mode, int max_iters, const IterationStep& step) {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  const auto& formula = engine.formula();
  const auto& layout = engine.layout();
  const auto reps = layout.representatives();
  const Qubit control = layout.control_qubit;
  const std::size_t control_bit = std::size_t{1} << control;

  PfpRunReport report;
  report.max_iters = max_iters;
  StateVector state = std::move(initial);
  double survival = 1.0;

  if (std::holds_alternative<ExactMode>(mode)) {
    report.halting_distribution.assign(std::size_t{1} << formula.num_vars(), 0.0);
    double halted = 0.0;
    for (int t = 1; t <= max_iters; ++t) {
      const double phi = schedule.angle(t);
      step(state, t, phi);
      const double norm = state.norm_squared();
      const auto amps = state.amplitudes();
      double p0 = 0.0;
      for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & control_bit) continue;
        const double w = std::norm(amps[i]) / norm;
        p0 += w;
        report.halting_distribution[gather_bits(i, reps)] += survival * w;
      }
      halted += survival * p0;
      survival *= 1.0 - p0;
      report.records.push_back({t, phi, p0, halted, survival});
      report.iterations = t;
      if (survival < kAmplitudeEpsilon || 1.0 - p0 < kZeroProbability) break;
      measure(state, control, Basis::Z, ConditionOn{1});
    }
    if (halted > kAmplitudeEpsilon) {
      const auto best = std::max_element(report.halting_distribution.begin(),
                                         report.halting_distribution.end());
      report.outcome = RunOutcome::Solved;
      report.assignment = cnf::decode_assignment(
          static_cast<std::uint64_t>(best - report.halting_distribution.begin()),
          formula.num_vars());
    }
    return report;
  }

  const auto seed = std::get<TrajectoryMode>(mode).seed;
  report.seed = seed;
  Rng rng(seed);
  for (int t = 1; t <= max_iters; ++t) {
    const double phi = schedule.angle(t);
    step(state, t, phi);
    const double p0 = outcome_probability(state, control, Basis::Z, 0);
    const auto rec = measure(state, control, Basis::Z, Trajectory{&rng});
    report.iterations = t;
    if (rec.outcome == 0) {
      report.records.push_back({t, phi, p0, 1.0, 0.0});
      report.outcome = RunOutcome::Solved;
      report.assignment = measure_register(state, reps, rng);
      return report;
    }
    report.records.push_back({t, phi, p0, 0.0, 1.0});
  }
  return report;
}

std::vector<PfpRunReport> run_trajectories(const cnf::CnfFormula& formula,
                                           const PhiSchedule& schedule, int runs,
                                           std::uint64_t seed, int max_iters, int jobs) {
  if (runs < 0) throw std::invalid_argument("runs must be >= 0");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  std::vector<PfpRunReport> out(static_cast<std::size_t>(runs));
  const Rng root(seed);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < runs; i = next++) {
      try {
        const std::uint64_t s = root.split(static_cast<std::uint64_t>(i)).next();
        out[static_cast<std::size_t>(i)] = pfp_run(formula, schedule, TrajectoryMode{s}, max_iters);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int workers = std::min(jobs, std::max(runs, 1));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<double> grover_run(const cnf::CnfFormula& formula, int iterations) {
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  const auto baseline = build_grover_baseline(formula);
  const auto solutions = cnf::enumerate_solutions(formula);
  const auto& vars = baseline.layout.variable_qubits;

  StateVector state(baseline.layout.total_width);
  for (Qubit q : vars) apply(state, gates::h(q));
  auto success = [&] {
    return probability_where(state, [&](std::size_t i) {
      return std::binary_search(solutions.begin(), solutions.end(), gather_bits(i, vars));
    });
  };
  std::vector<double> curve{success()};
  for (int t = 1; t <= iterations; ++t) {
    apply(state, baseline.oracle);
    apply(state, baseline.diffuser);
    curve.push_back(success());
  }
  return curve;
}

EquivalenceReport circuit_operator_equivalence(const cnf::CnfFormula& formula, double phi) {
  const int n = formula.num_vars();
  if (n > 4) throw std::invalid_argument("operator equivalence limited to n <= 4");
  const PfpEngine engine(formula);
  const auto& layout = engine.layout();
  const Circuit circuit = concat(engine.oracle(phi), engine.diffuser());

  const std::size_t logical_dim = std::size_t{1} << (n + 1);
  const std::size_t nx = std::size_t{1} << n;
  auto embed = [&](std::size_t logical) {
    std::size_t i = 0;
    for (int j = 0; j < n; ++j) {
      if ((logical >> j) & 1U) {
        for (Qubit q : layout.group_members[static_cast<std::size_t>(j)]) i |= std::size_t{1} << q;
      }
    }
    if ((logical >> n) & 1U) i |= std::size_t{1} << layout.control_qubit;
    return i;
  };

  using Mat = Eigen::MatrixXcd;
  EquivalenceReport report;
  Mat actual(logical_dim, logical_dim);
  for (std::size_t col = 0; col < logical_dim; ++col) {
    StateVector s(layout.total_width);
    auto amps = s.amplitudes();
    amps[0] = 0.0;
    amps[embed(col)] = 1.0;
    apply(s, circuit);
    double kept = 0.0;
    for (std::size_t row = 0; row < logical_dim; ++row) {
      actual(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = s[embed(row)];
      kept += std::norm(s[embed(row)]);
    }
    report.leakage = std::max(report.leakage, 1.0 - kept);
  }

  const auto solutions = cnf::enumerate_solutions(formula);
  Mat oracle = Mat::Identity(nx, nx);
  for (auto x : solutions) oracle(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = -1.0;
  const Mat grover = Mat::Constant(nx, nx, 2.0 / static_cast<double>(nx)) - Mat::Identity(nx, nx);

  Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2), ry = Mat(2, 2), ry_inv = Mat(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  const double c = std::cos(phi / 2), sn = std::sin(phi / 2);
  ry << c, -sn, sn, c;
  ry_inv = ry.adjoint();
  // Index x + (s << n): the control is the high factor of the Kronecker product.
  auto kron = [](const Mat& hi, const Mat& lo) {
    Mat out(hi.rows() * lo.rows(), hi.cols() * lo.cols());
    for (Eigen::Index i = 0; i < hi.rows(); ++i) {
      for (Eigen::Index j = 0; j < hi.cols(); ++j) {
        out.block(i * lo.rows(), j * lo.cols(), lo.rows(), lo.cols()) = hi(i, j) * lo;
      }
    }
    return out;
  };
  const Mat id = Mat::Identity(nx, nx);
  const Mat expected = (kron(p1, grover) + kron(p0, id)) * kron(ry_inv, id) *
                       (kron(p1, oracle) + kron(p0, id)) * kron(ry, id);

  Eigen::Index r = 0, k = 0;
  expected.cwiseAbs().maxCoeff(&r, &k);
  const auto phase = actual(r, k) / expected(r, k);
  const auto unit = phase / std::abs(phase);
  report.max_deviation = (actual - unit * expected).cwiseAbs().maxCoeff();
  return report;
}

}  // namespace pfp
