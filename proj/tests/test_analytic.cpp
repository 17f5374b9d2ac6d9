#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "pfp/analytic.hpp"
#include "pfp/schedule.hpp"

using namespace pfp;
using namespace pfp::analytic;

namespace {

constexpr double kPi = std::numbers::pi;

/// Two-level model: span{|s>, |u>} (x) control, control index 1 = "|1>".
/// Returns (Tr rho A, Tr rho O, Tr rho) after each step, conditioning the
/// control on 1. Built from the rotation/oracle/diffuser definitions only.
std::vector<std::array<double, 3>> two_level_model(double beta, const PhiSchedule& schedule, int steps) {
  using M4 = Eigen::Matrix4cd;
  using V4 = Eigen::Vector4cd;
  // index = v + 2 * c, v: 0 = s, 1 = u.
  auto kron_ctrl = [](const Eigen::Matrix2cd& ctrl_op, const Eigen::Matrix2cd& v_op) {
    M4 out;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) out.block<2, 2>(2 * a, 2 * b) = ctrl_op(a, b) * v_op;
    return out;
  };
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd p0 = Eigen::Matrix2cd::Zero(), p1 = Eigen::Matrix2cd::Zero();
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  Eigen::Vector2cd psi0(std::sin(beta), std::cos(beta));
  const Eigen::Matrix2cd grover = 2.0 * psi0 * psi0.adjoint() - id;
  Eigen::Matrix2cd oracle = id;
  oracle(0, 0) = -1.0;
  Eigen::Matrix2cd a_op;
  a_op << 0, 1, 1, 0;

  V4 state = V4::Zero();
  state.segment<2>(2) = psi0;
  std::vector<std::array<double, 3>> out;
  auto record = [&] {
    const Eigen::Vector2cd v = state.segment<2>(2);
    out.push_back({(v.adjoint() * a_op * v)(0).real(), (v.adjoint() * oracle * v)(0).real(),
                   v.squaredNorm()});
  };
  record();
  for (int t = 1; t <= steps; ++t) {
    const double phi = schedule.angle(t);
    Eigen::Matrix2cd ry;
    ry << std::cos(phi / 2), -std::sin(phi / 2), std::sin(phi / 2), std::cos(phi / 2);
    const M4 step = kron_ctrl(p1, grover) + kron_ctrl(p0, id);
    const M4 o = kron_ctrl(ry.adjoint(), id) * (kron_ctrl(p1, oracle) + kron_ctrl(p0, id)) * kron_ctrl(ry, id);
    state = step * o * state;
    state.segment<2>(0).setZero();  // keep only control = 1
    record();
  }
  return out;
}

}  // namespace

TEST(Schedule, UnknownMIsStrictlyDecreasingFromHalfPi) {
  EXPECT_NEAR(phi_unknown(1), kPi / 2, 1e-15);
  for (int t = 1; t < 200; ++t) EXPECT_LT(phi_unknown(t + 1), phi_unknown(t));
  EXPECT_GT(phi_unknown(10000), 0.0);
  EXPECT_THROW(phi_unknown(0), std::domain_error);
}

TEST(Schedule, CriticalAngle) {
  EXPECT_NEAR(std::cos(phi_critical(1, 8)), 0.4775927, 1e-6);
  const double s = std::sqrt(1.0 / 8);
  EXPECT_NEAR(std::cos(phi_critical(1, 8)), (1 - s) / (1 + s), 1e-15);
  EXPECT_NEAR(phi_critical(4, 4), kPi / 2, 1e-15);
  EXPECT_THROW(phi_critical(0, 8), std::domain_error);
  EXPECT_THROW(phi_critical(9, 8), std::domain_error);
  EXPECT_THROW(PhiSchedule::fixed(-0.1), std::domain_error);
  EXPECT_THROW(PhiSchedule::fixed(4.0), std::domain_error);
}

TEST(TransferMatrix, DomainChecks) {
  EXPECT_THROW(transfer_matrix(-0.1, 0.5), std::domain_error);
  EXPECT_THROW(transfer_matrix(0.5, 3.2), std::domain_error);
  EXPECT_NO_THROW(transfer_matrix(0.0, 0.0));
}

TEST(TransferMatrix, RecursionMatchesTwoLevelModel) {
  for (auto [m, n] : {std::pair{1, 8}, {1, 64}, {3, 16}, {5, 8}, {1, 2}}) {
    const double beta = search_angle(m, n);
    for (const auto& schedule : {PhiSchedule::unknown_m(), PhiSchedule::critical(m, n), PhiSchedule::fixed(0.9)}) {
      const auto states = evolve(beta, schedule, 25);
      const auto model = two_level_model(beta, schedule, 25);
      for (std::size_t t = 0; t < states.size(); ++t) {
        EXPECT_NEAR(states[t].a, model[t][0], 1e-12) << m << "/" << n << " t=" << t;
        EXPECT_NEAR(states[t].o, model[t][1], 1e-12);
        EXPECT_NEAR(states[t].p, model[t][2], 1e-12);
      }
    }
  }
}

TEST(TransferMatrix, InitialState) {
  const auto s = initial_state(search_angle(1, 8));
  EXPECT_NEAR(s.a, std::sqrt(7.0) / 4, 1e-15);
  EXPECT_NEAR(s.o, 0.75, 1e-15);
  EXPECT_EQ(s.p, 1.0);
  EXPECT_EQ(s.success(), 0.0);
}

TEST(Eigenvalues, AgreeWithEigenSolver) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> angle(0.01, kPi - 0.01);
  for (int k = 0; k < 200; ++k) {
    const double theta = angle(gen), phi = angle(gen);
    const auto e = transfer_matrix(theta, phi);
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = e(r, c);
    const Eigen::EigenSolver<Eigen::Matrix3d> solver(m);
    const auto ev = eigenvalues(e);
    // Match each computed root to its nearest reference root.
    for (const auto& v : ev) {
      double best = 1e9;
      for (int i = 0; i < 3; ++i) best = std::min(best, std::abs(std::complex<double>(v.re, v.im) - solver.eigenvalues()(i)));
      EXPECT_LT(best, 1e-6) << theta << " " << phi;
    }
    double radius = 0;
    for (int i = 0; i < 3; ++i) radius = std::max(radius, std::abs(solver.eigenvalues()(i)));
    EXPECT_NEAR(spectral_radius(e), radius, 1e-6);
  }
}

TEST(Eigenvalues, CriticalDampingIsTripleRoot) {
  using HP = HighPrecision;
  for (int k = 1; k <= 20; ++k) {
    const HP theta = HP(k) / 21 * boost::math::constants::half_pi<HP>();
    const HP phi = phi_critical_for_angle(theta);
    const auto e = transfer_matrix(theta, phi);
    // (E - cos(phi) I)^3 = 0.
    std::array<std::array<HP, 3>, 3> n{};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) n[r][c] = e(r, c) - (r == c ? HP(cos(phi)) : HP(0));
    auto mul = [](const auto& a, const auto& b) {
      std::array<std::array<HP, 3>, 3> out{};
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          for (int j = 0; j < 3; ++j) out[r][c] += a[r][j] * b[j][c];
      return out;
    };
    const auto cube = mul(mul(n, n), n);
    for (const auto& row : cube)
      for (const auto& x : row) EXPECT_LT(abs(x), HP("1e-40"));
    const auto ev = eigenvalues(e);
    EXPECT_LT(max_eigenvalue_gap(ev), HP("1e-12"));
    for (const auto& v : ev) EXPECT_LT(abs(v.re - cos(phi)) + abs(v.im), HP("1e-12"));
  }
}

TEST(SpectralRadius, InteriorBelowOneAndUnitAtZero) {
  for (int i = 1; i <= 20; ++i) {
    for (int j = 1; j <= 20; ++j) {
      const double theta = kPi / 2 * i / 21, phi = kPi * j / 21;
      EXPECT_LT(spectral_radius(transfer_matrix<HighPrecision>(theta, phi)), 1);
    }
    EXPECT_NEAR(spectral_radius(transfer_matrix(kPi / 2 * i / 21, 0.0)), 1.0, 1e-10);
  }
}

TEST(SpectralRadius, ProductFallsUnderUnknownSchedule) {
  const double beta = std::asin(1 / std::sqrt(8.0));
  int t = 1;
  while (product_radius_bound(beta, PhiSchedule::unknown_m(), t) >= 1e-3 && t < 200) ++t;
  EXPECT_LT(t, 200);
  EXPECT_LT(product_radius_bound(beta, PhiSchedule::unknown_m(), t), 1e-3);
}

TEST(Evolve, MonotoneSuccessAndGroverLimit) {
  const double beta = search_angle(1, 8);
  const auto s = evolve(beta, PhiSchedule::unknown_m(), 40);
  for (std::size_t t = 1; t < s.size(); ++t) EXPECT_GE(s[t].success(), s[t - 1].success() - 1e-15);
  EXPECT_GT(s.back().success(), 0.999);
  // phi = 0 never flips the control.
  const auto g = evolve(beta, PhiSchedule::fixed(0.0), 10);
  for (const auto& st : g) EXPECT_NEAR(st.success(), 0.0, 1e-15);
  // All solutions: one step at phi = pi/2 halts with certainty.
  EXPECT_NEAR(evolve(kPi / 2, PhiSchedule::unknown_m(), 1)[1].success(), 1.0, 1e-12);
}

TEST(QueryOverhead, RatioAtLeastOneForSparseSolutions) {
  for (std::uint64_t n : {16u, 256u, 4096u}) {
    for (std::uint64_t m = 1; m <= n / 4; m *= 2) {
      const auto q = query_overhead(m, n);
      EXPECT_GE(q.ratio, 1.0) << m << "/" << n;
      EXPECT_LE(q.pfp_iterations, 1.5 * q.grover_iterations + 2);
    }
  }
  EXPECT_EQ(query_overhead(4, 8).pfp_iterations, 1);
  EXPECT_THROW(query_overhead(0, 8), std::domain_error);
  EXPECT_THROW(query_overhead(1, (1u << 20) + 1), std::domain_error);
}

TEST(Csv, HeaderAndPrecision) {
  std::ostringstream out;
  const auto schedule = PhiSchedule::unknown_m();
  write_csv(out, schedule, evolve(search_angle(1, 8), schedule, 2));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,phi,a,o,p,success");
  std::getline(in, line);
  EXPECT_EQ(line, "0,0,0.661437827766,0.75,1,0");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("1,1.57079632679,", 0), 0u) << line;
}
