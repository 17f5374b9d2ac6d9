#pragma once

// Transfer-matrix model of one PFP iteration acting on the unnormalized
// traces (Tr(rho A), Tr(rho O), Tr(rho)) of the surviving (control = 1)
// variable-register state.
//
// Angle conventions: `theta` in transfer_matrix is the matrix parameter, the
// Grover rotation per step of the doubled (Bloch) angle. For a search with M
// of N marked states the simulator-consistent value is 2 * search_angle(M, N).
// The evolve/product helpers below take the search angle and double it.

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "pfp/schedule.hpp"

namespace pfp::analytic {

/// 50 decimal digits; used where eigenvalues are (nearly) defective.
using HighPrecision = boost::multiprecision::cpp_bin_float_50;

template <class Real>
struct TransferState {
  Real a{};  // Tr(rho A)
  Real o{};  // Tr(rho O)
  Real p{};  // Tr(rho): probability the control qubit has not flipped yet

  Real success() const { return Real(1) - p; }
};

template <class Real>
struct TransferMatrix {
  std::array<std::array<Real, 3>, 3> m{};

  const Real& operator()(int r, int c) const { return m[r][c]; }

  TransferState<Real> apply(const TransferState<Real>& u) const {
    const Real in[3] = {u.a, u.o, u.p};
    Real out[3];
    for (int r = 0; r < 3; ++r) out[r] = m[r][0] * in[0] + m[r][1] * in[1] + m[r][2] * in[2];
    return {out[0], out[1], out[2]};
  }
};

template <class Real>
TransferMatrix<Real> transfer_matrix(Real theta, Real phi) {
  using std::cos;
  using std::sin;
  const Real pi = boost::math::constants::pi<Real>();
  if (!(theta >= 0 && theta <= pi)) throw std::domain_error("transfer_matrix: theta outside [0, pi]");
  if (!(phi >= 0 && phi <= pi)) throw std::domain_error("transfer_matrix: phi outside [0, pi]");
  const Real c = cos(phi);
  const Real c2 = c * c;
  const Real s2t = sin(2 * theta);
  const Real c2t = cos(2 * theta);
  const Real plus = (1 + c2) / 2;
  const Real minus = (1 - c2) / 2;
  TransferMatrix<Real> e;
  e.m[0] = {c2t * c, s2t * plus, s2t * minus};
  e.m[1] = {-s2t * c, c2t * plus, c2t * minus};
  e.m[2] = {Real(0), minus, plus};
  return e;
}

template <class Real>
struct Eigenvalue {
  Real re{};
  Real im{};

  Real magnitude() const {
    using std::sqrt;
    return sqrt(re * re + im * im);
  }
};

/// Eigenvalues of a real 3x3 matrix from its characteristic polynomial:
/// one real root by bisection, the remaining pair from the deflated
/// quadratic. Real roots come first.
template <class Real>
std::array<Eigenvalue<Real>, 3> eigenvalues(const TransferMatrix<Real>& e) {
  using std::abs;
  using std::sqrt;
  const auto& m = e.m;
  const Real trace = m[0][0] + m[1][1] + m[2][2];
  const Real minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] -
                      m[0][2] * m[2][0] + m[1][1] * m[2][2] - m[1][2] * m[2][1];
  const Real det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                   m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                   m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  // lambda^3 + b lambda^2 + c lambda + d
  const Real b = -trace;
  const Real c = minors;
  const Real d = -det;
  auto poly = [&](const Real& x) { return ((x + b) * x + c) * x + d; };

  Real bound = 1 + abs(b);
  if (1 + abs(c) > bound) bound = 1 + abs(c);
  if (1 + abs(d) > bound) bound = 1 + abs(d);
  Real lo = -bound;
  Real hi = bound;
  const int iterations = std::numeric_limits<Real>::digits + 16;
  for (int i = 0; i < iterations; ++i) {
    const Real mid = (lo + hi) / 2;
    if (poly(mid) < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const Real r = (lo + hi) / 2;

  // Deflate: lambda^2 + b1 lambda + c1.
  const Real b1 = b + r;
  const Real c1 = c + r * b1;
  const Real disc = b1 * b1 - 4 * c1;
  std::array<Eigenvalue<Real>, 3> out;
  out[0] = {r, Real(0)};
  if (disc >= 0) {
    const Real sq = sqrt(disc);
    const Real q = b1 >= 0 ? -(b1 + sq) / 2 : -(b1 - sq) / 2;
    const Real r1 = q;
    const Real r2 = q != 0 ? c1 / q : Real(0);
    out[1] = {r1, Real(0)};
    out[2] = {r2, Real(0)};
  } else {
    const Real re = -b1 / 2;
    const Real im = sqrt(-disc) / 2;
    out[1] = {re, im};
    out[2] = {re, -im};
  }
  return out;
}

/// R(E) = max |lambda| over the spectrum.
template <class Real>
Real spectral_radius(const TransferMatrix<Real>& e) {
  Real best = 0;
  for (const auto& ev : eigenvalues(e)) {
    const Real mag = ev.magnitude();
    if (mag > best) best = mag;
  }
  return best;
}

/// Largest |lambda_i - lambda_j| over eigenvalue pairs.
template <class Real>
Real max_eigenvalue_gap(const std::array<Eigenvalue<Real>, 3>& ev) {
  Real gap = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const Eigenvalue<Real> diff{ev[i].re - ev[j].re, ev[i].im - ev[j].im};
      const Real g = diff.magnitude();
      if (g > gap) gap = g;
    }
  }
  return gap;
}

/// Uniform start: a0 = sin(2 beta), o0 = cos(2 beta) = 1 - 2M/N, p0 = 1.
TransferState<double> initial_state(double search_angle);

/// States t = 0..steps; entry t is after t iterations with phi_1..phi_t.
std::vector<TransferState<double>> evolve(double search_angle, const PhiSchedule& schedule,
                                          int steps);
std::vector<TransferState<double>> evolve(const TransferState<double>& start,
                                          double search_angle, const PhiSchedule& schedule,
                                          int steps);

/// Product of R(E_s) for s = 1..t along the schedule.
double product_radius_bound(double search_angle, const PhiSchedule& schedule, int t);

struct QueryOverhead {
  int pfp_iterations = 0;     // first t with 1 - p_t >= 0.5 (unknown-M schedule)
  int grover_iterations = 0;  // ceil((pi/4) sqrt(N/M))
  double ratio = 0.0;
};

QueryOverhead query_overhead(std::uint64_t num_solutions, std::uint64_t search_space);

/// Header "t,phi,a,o,p,success"; row t=0 is the initial state with phi = 0.
void write_csv(std::ostream& out, const PhiSchedule& schedule,
               const std::vector<TransferState<double>>& states);

}  // namespace pfp::analytic
