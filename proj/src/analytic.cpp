#include "pfp/analytic.hpp"

#include <ostream>

#include "pfp/format.hpp"

namespace pfp {

double search_angle(std::uint64_t num_solutions, std::uint64_t search_space) {
  if (search_space == 0 || num_solutions > search_space) {
    throw std::domain_error("search_angle: need 0 <= M <= N, N >= 1");
  }
  return std::asin(std::sqrt(static_cast<double>(num_solutions) /
                             static_cast<double>(search_space)));
}

double phi_critical(std::uint64_t num_solutions, std::uint64_t search_space) {
  if (num_solutions == 0) throw std::domain_error("phi_critical: M must be >= 1");
  if (num_solutions > search_space) throw std::domain_error("phi_critical: M exceeds N");
  return phi_critical_for_angle(search_angle(num_solutions, search_space));
}

PhiSchedule PhiSchedule::fixed(double phi) {
  if (!(phi >= 0.0 && phi <= boost::math::constants::pi<double>())) {
    throw std::domain_error("fixed phi must lie in [0, pi]");
  }
  return PhiSchedule(ScheduleKind::Fixed, phi);
}

double PhiSchedule::angle(int t) const {
  if (t < 1) throw std::domain_error("schedule iteration index must be >= 1");
  return kind_ == ScheduleKind::UnknownM ? phi_unknown(t) : phi_;
}

std::string PhiSchedule::describe() const {
  switch (kind_) {
    case ScheduleKind::UnknownM: return "unknown";
    case ScheduleKind::Critical: return "critical";
    case ScheduleKind::Fixed: return "fixed";
  }
  return "?";
}

namespace analytic {

TransferState<double> initial_state(double search_angle) {
  return {std::sin(2 * search_angle), std::cos(2 * search_angle), 1.0};
}

std::vector<TransferState<double>> evolve(const TransferState<double>& start, double search_angle,
                                          const PhiSchedule& schedule, int steps) {
  if (steps < 0) throw std::domain_error("evolve: negative step count");
  std::vector<TransferState<double>> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(start);
  for (int t = 1; t <= steps; ++t) {
    out.push_back(transfer_matrix(2 * search_angle, schedule.angle(t)).apply(out.back()));
  }
  return out;
}

std::vector<TransferState<double>> evolve(double search_angle, const PhiSchedule& schedule,
                                          int steps) {
  return evolve(initial_state(search_angle), search_angle, schedule, steps);
}

double product_radius_bound(double search_angle, const PhiSchedule& schedule, int t) {
  double product = 1.0;
  for (int s = 1; s <= t; ++s) {
    product *= spectral_radius(transfer_matrix(2 * search_angle, schedule.angle(s)));
  }
  return product;
}

QueryOverhead query_overhead(std::uint64_t num_solutions, std::uint64_t search_space) {
  if (num_solutions < 1 || num_solutions > search_space || search_space > (1ULL << 20)) {
    throw std::domain_error("query_overhead: need 1 <= M <= N <= 2^20");
  }
  const double beta = search_angle(num_solutions, search_space);
  const auto schedule = PhiSchedule::unknown_m();
  const double ratio_nm = static_cast<double>(search_space) / static_cast<double>(num_solutions);
  const int cap = 100 + static_cast<int>(100 * std::sqrt(static_cast<double>(search_space)));

  QueryOverhead q;
  q.grover_iterations =
      static_cast<int>(std::ceil(boost::math::constants::pi<double>() / 4 * std::sqrt(ratio_nm)));
  auto state = initial_state(beta);
  int t = 0;
  while (state.success() < 0.5) {
    if (++t > cap) throw std::runtime_error("query_overhead: success never reached 0.5");
    state = transfer_matrix(2 * beta, schedule.angle(t)).apply(state);
  }
  q.pfp_iterations = t;
  q.ratio = static_cast<double>(t) / q.grover_iterations;
  return q;
}

void write_csv(std::ostream& out, const PhiSchedule& schedule,
               const std::vector<TransferState<double>>& states) {
  out << "t,phi,a,o,p,success\n";
  for (std::size_t t = 0; t < states.size(); ++t) {
    const double phi = t == 0 ? 0.0 : schedule.angle(static_cast<int>(t));
    const auto& s = states[t];
    out << t << ',' << format_number(phi) << ',' << format_number(s.a) << ','
        << format_number(s.o) << ',' << format_number(s.p) << ',' << format_number(s.success())
        << '\n';
  }
}

}  // namespace analytic
}  // namespace pfp
