#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pfp::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitExhausted = 2,  // also: deviation above tolerance
};

struct RunConfig {
  std::string input;
  std::string mode = "exact";        // exact | trajectories
  std::string schedule = "unknown";  // unknown | critical | fixed
  std::optional<double> phi;         // fixed schedule
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iters;
  std::string out;                   // empty: stdout
  int jobs = 1;
  int runs = 1;                      // trajectories
  std::string partition;             // JSON file; empty: monolithic

  // analytic
  std::optional<double> theta;       // search angle arcsin(sqrt(M/N))
  std::optional<std::uint64_t> num_solutions;
  std::optional<std::uint64_t> search_space;

  // dist-verify
  int controls = 2;
  std::string gate = "X";
  int inputs = 20;
  bool corrupt_correction = false;
  std::string trace_out;             // JSON-lines trace of the first execution
};

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_dist_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_analytic(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parse argv and dispatch. argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pfp::cli
