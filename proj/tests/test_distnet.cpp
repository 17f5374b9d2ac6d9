#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "pfp/distnet.hpp"
#include "test_util.hpp"

using namespace pfp;
using namespace pfp::distnet;

namespace {

std::vector<int> branch_bits(std::size_t b, int m) {
  std::vector<int> out(static_cast<std::size_t>(2 * m));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = static_cast<int>((b >> k) & 1U);
  return out;
}

}  // namespace

TEST(Setup, WidthsAndBellPairs) {
  StateVector in(2);
  const auto g = setup(1, matrices::x(), in);
  EXPECT_EQ(g.network.state().width(), 4u);
  // Inputs |00>: only e = e_tilde = 0 or 1 survive, each 1/sqrt2.
  const std::size_t both = (std::size_t{1} << g.e(0)) | (std::size_t{1} << g.e_tilde(0));
  EXPECT_NEAR(std::abs(g.network.state()[0]), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(std::abs(g.network.state()[both]), std::sqrt(0.5), 1e-15);
  EXPECT_EQ(g.network.owner(g.p(0)), 1);
  EXPECT_EQ(g.network.owner(g.e(0)), 1);
  EXPECT_EQ(g.network.owner(g.e_tilde(0)), kMaster);
  EXPECT_EQ(g.network.owner(g.t()), kMaster);

  const auto g3 = setup(3, matrices::x(), StateVector(4));
  EXPECT_EQ(g3.network.state().width(), 10u);
  EXPECT_EQ(g3.network.trace().bell_pairs(), 3u);
  EXPECT_THROW(setup(0, matrices::x(), StateVector(1)), std::invalid_argument);
  EXPECT_THROW(setup(2, matrices::x(), StateVector(2)), std::invalid_argument);
}

TEST(Protocol, BellSmokeCase) {
  StateVector in(2);
  apply(in, gates::h(0));
  for (std::size_t b = 0; b < 4; ++b) {
    const auto run = run_protocol(setup(1, matrices::x(), in), branch_bits(b, 1));
    EXPECT_NEAR(std::abs(run.output[0]), std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(std::abs(run.output[3]), std::sqrt(0.5), 1e-12);
    EXPECT_LT(overlap_deviation(run.output, direct_controlled_unitary(in, matrices::x())), 1e-12);
  }
}

TEST(Protocol, EveryBranchMatchesDirectGate) {
  Rng rng(7);
  for (int m = 1; m <= 4; ++m) {
    for (const auto& u : {matrices::x(), matrices::z(), matrices::h(), matrices::ry(0.8)}) {
      for (int k = 0; k < 5; ++k) {
        const auto in = random_state(static_cast<std::size_t>(m) + 1, rng);
        const auto direct = direct_controlled_unitary(in, u);
        for (std::size_t b = 0; b < (std::size_t{1} << (2 * m)); ++b) {
          const auto run = run_protocol(setup(m, u, in), branch_bits(b, m));
          EXPECT_LT(overlap_deviation(direct, run.output), 1e-10) << m << " branch " << b;
          // Exact equality, not only up to phase.
          for (std::size_t i = 0; i < direct.dimension(); ++i) EXPECT_LT(std::abs(direct[i] - run.output[i]), 1e-10);
          EXPECT_EQ(run.trace.classical_bits(), 2u * static_cast<std::size_t>(m));
          EXPECT_EQ(run.violations, 0u);
        }
      }
    }
  }
}

TEST(Protocol, TraceStructure) {
  Rng rng(3);
  const auto run = run_protocol(setup(3, matrices::z(), random_state(4, rng)), branch_bits(0b101101, 3));
  EXPECT_EQ(run.trace.classical_bits(), 6u);
  EXPECT_EQ(run.trace.bell_pairs(), 3u);
  EXPECT_EQ(run.outcome.z_outcomes, (std::vector<int>{1, 0, 1}));
  EXPECT_EQ(run.outcome.x_outcomes, (std::vector<int>{1, 0, 1}));
  // Each correction follows a receive by the same node in the same round.
  const auto& ev = run.trace.events;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (ev[i].kind != EventKind::Correction) continue;
    bool seen = false;
    for (std::size_t j = 0; j < i; ++j) {
      seen = seen || (ev[j].kind == EventKind::Receive && ev[j].node == ev[i].node && ev[j].round == ev[i].round);
    }
    EXPECT_TRUE(seen) << i;
  }
  std::ostringstream jsonl;
  run.trace.write_jsonl(jsonl);
  EXPECT_NE(jsonl.str().find("\"event\":\"send\""), std::string::npos);
  const std::string text = jsonl.str();
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), ev.size());
}

TEST(Protocol, CorruptedCorrectionIsDetected) {
  Rng rng(11);
  const auto in = random_state(3, rng);
  const auto direct = direct_controlled_unitary(in, matrices::z());
  double worst = 0.0;
  for (std::size_t b = 0; b < 16; ++b) {
    const auto run = run_protocol(setup(2, matrices::z(), in), branch_bits(b, 2), {true});
    worst = std::max(worst, overlap_deviation(direct, run.output));
  }
  EXPECT_GT(worst, 1e-3);
}

TEST(Protocol, TrajectoryFrequenciesMatchBranchProbabilities) {
  // Basis target, controls in superposition: every branch has probability 1/16.
  StateVector in(3);
  apply(in, gates::h(0));
  apply(in, gates::h(1));
  std::vector<double> born(16);
  for (std::size_t b = 0; b < 16; ++b) {
    born[b] = run_protocol(setup(2, matrices::x(), in), branch_bits(b, 2)).output.branch_weight();
    EXPECT_NEAR(born[b], 1.0 / 16, 1e-12);
  }
  Rng rng(2024);
  const int shots = 8000;
  std::vector<int> counts(16, 0);
  for (int k = 0; k < shots; ++k) {
    const auto run = run_protocol(setup(2, matrices::x(), in), rng);
    std::size_t b = 0;
    for (int i = 0; i < 2; ++i) {
      b |= static_cast<std::size_t>(run.outcome.z_outcomes[static_cast<std::size_t>(i)]) << i;
      b |= static_cast<std::size_t>(run.outcome.x_outcomes[static_cast<std::size_t>(i)]) << (2 + i);
    }
    ++counts[b];
  }
  for (std::size_t b = 0; b < 16; ++b) {
    const double mean = shots * born[b];
    EXPECT_LT(std::abs(counts[b] - mean), 5 * std::sqrt(mean * (1 - born[b]))) << b;
  }
}

TEST(Network, OwnershipIsEnforced) {
  Network net(StateVector(3), 2, {0, 1, kUnowned});
  EXPECT_THROW(net.local_gate(0, gates::cnot(0, 1)), LocalityViolation);
  EXPECT_THROW(net.local_gate(1, gates::h(0)), LocalityViolation);
  EXPECT_EQ(net.violations(), 2u);
  EXPECT_NO_THROW(net.local_gate(1, gates::h(1)));
  EXPECT_THROW(net.receive(0, 1, 1), std::logic_error);
}

TEST(Partition, ParsingAndValidation) {
  const auto f = test::example_formula();
  const auto p = Partition::from_json(R"({"nodes": 4, "clause_nodes": [1, 2, 3]})");
  EXPECT_EQ(p.nodes, 4);
  EXPECT_NO_THROW(p.validate(f));
  EXPECT_THROW(Partition::from_json("{\"nodes\": 2}"), PartitionError);
  EXPECT_THROW(Partition::from_json("not json"), PartitionError);
  EXPECT_THROW((Partition{2, {0, 1}}).validate(f), PartitionError);
  EXPECT_THROW((Partition{2, {0, 1, 2}}).validate(f), PartitionError);
  const auto owners = register_owners(build_layout(f), p);
  EXPECT_EQ(owners, (std::vector<NodeId>{1, 2, 3, 2, 3, 1, 2, 3, 0, 0}));
}

TEST(DistributedPfp, IterationMatchesMonolithic) {
  const auto f = test::example_formula();
  const PfpEngine engine(f);
  Rng rng(5);
  for (const auto& partition : {Partition::one_clause_per_node(f), Partition{2, {1, 1, 0}}, Partition::monolithic(f)}) {
    StateVector mono = engine.initial_state();
    auto init = distributed_initial_state(engine, partition, rng);
    EXPECT_LT(test::max_abs_diff(init.state, test::to_dense(mono)), 1e-12);
    StateVector dist = init.state;
    for (int t = 1; t <= 4; ++t) {
      engine.apply_iteration(mono, phi_unknown(t));
      auto step = run_distributed_pfp_iteration(engine, partition, dist, phi_unknown(t), rng);
      EXPECT_EQ(step.violations, 0u);
      EXPECT_LT(test::max_abs_diff(step.state, test::to_dense(mono)), 1e-10) << t;
      EXPECT_NEAR(step.state.norm_squared(), 1.0, 1e-12);
      if (partition.nodes == 1) EXPECT_EQ(step.protocol_runs, 0u);
      else EXPECT_GT(step.protocol_runs, 0u);
      EXPECT_EQ(step.trace.classical_bits(), 2 * step.remote_controls);
      dist = step.state;
    }
  }
}

TEST(DistributedPfp, FullRunSolvesExample) {
  const auto f = test::example_formula();
  const auto rep = run_distributed_pfp(f, Partition::one_clause_per_node(f), PhiSchedule::unknown_m(),
                                       ExactMode{}, 17, 9);
  ASSERT_EQ(rep.run.outcome, RunOutcome::Solved);
  EXPECT_EQ(*rep.run.assignment, (cnf::Assignment{true, true, true}));
  EXPECT_EQ(rep.violations, 0u);
  EXPECT_EQ(rep.classical_bits, 2 * rep.bell_pairs);
  const auto mono = pfp_run(f, PhiSchedule::unknown_m(), ExactMode{}, 17);
  ASSERT_EQ(rep.run.records.size(), mono.records.size());
  for (std::size_t t = 0; t < mono.records.size(); ++t) {
    EXPECT_NEAR(rep.run.records[t].cumulative_success, mono.records[t].cumulative_success, 1e-10);
  }
  const auto traj = run_distributed_pfp(f, Partition::one_clause_per_node(f), PhiSchedule::unknown_m(),
                                        TrajectoryMode{4}, 17, 4);
  if (traj.run.outcome == RunOutcome::Solved) EXPECT_EQ(*traj.run.assignment, (cnf::Assignment{true, true, true}));
}
