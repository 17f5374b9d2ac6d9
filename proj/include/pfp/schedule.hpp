#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/math/constants/constants.hpp>

namespace pfp {

/// cos(phi_t) = (1 - sin(pi/(2t))) / (1 + sin(pi/(2t))), t >= 1.
/// phi_1 = pi/2 and phi_t decreases strictly towards 0.
template <class Real>
Real phi_unknown(int t) {
  using std::acos;
  using std::sin;
  if (t < 1) throw std::domain_error("phi_unknown: iteration index must be >= 1");
  const Real s = sin(boost::math::constants::pi<Real>() / (2 * t));
  return acos((1 - s) / (1 + s));
}

/// Critical-damping angle for the transfer-matrix angle `theta`:
/// cos(phi) = (1 - sin(theta)) / (1 + sin(theta)). At this phi the three
/// eigenvalues of transfer_matrix(theta, phi) coincide at cos(phi).
template <class Real>
Real phi_critical_for_angle(Real theta) {
  using std::acos;
  using std::sin;
  const Real s = sin(theta);
  return acos((1 - s) / (1 + s));
}

inline double phi_unknown(int t) { return phi_unknown<double>(t); }

/// theta = arcsin(sqrt(M/N)) and phi = phi_critical_for_angle(theta).
double phi_critical(std::uint64_t num_solutions, std::uint64_t search_space);

/// arcsin(sqrt(M/N)).
double search_angle(std::uint64_t num_solutions, std::uint64_t search_space);

enum class ScheduleKind { UnknownM, Critical, Fixed };

/// Per-iteration rotation angle phi_t for the control qubit.
class PhiSchedule {
 public:
  static PhiSchedule unknown_m() { return PhiSchedule(ScheduleKind::UnknownM, 0.0); }
  /// Constant critical angle for a known solution count.
  static PhiSchedule critical(std::uint64_t num_solutions, std::uint64_t search_space) {
    return PhiSchedule(ScheduleKind::Critical, phi_critical(num_solutions, search_space));
  }
  /// Same angle as critical(M, N) for search angle arcsin(sqrt(M/N)).
  static PhiSchedule critical_for_search_angle(double search_angle) {
    return PhiSchedule(ScheduleKind::Critical, phi_critical_for_angle(search_angle));
  }
  static PhiSchedule fixed(double phi);

  ScheduleKind kind() const noexcept { return kind_; }
  /// phi_t for t >= 1.
  double angle(int t) const;
  std::string describe() const;

 private:
  PhiSchedule(ScheduleKind kind, double phi) : kind_(kind), phi_(phi) {}

  ScheduleKind kind_;
  double phi_;
};

}  // namespace pfp
