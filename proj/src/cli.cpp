#include "pfp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pfp/analytic.hpp"
#include "pfp/cnf.hpp"
#include "pfp/distnet.hpp"
#include "pfp/format.hpp"
#include "pfp/schedule.hpp"
#include "pfp/search.hpp"

namespace pfp::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const RunConfig& config, std::ostream& out, const std::string& text) {
  if (config.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(config.out, std::ios::binary);
  if (!f) throw UsageError("cannot open output file " + config.out);
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

cnf::CnfFormula load_input(const RunConfig& config) {
  if (config.input.empty()) throw UsageError("missing input DIMACS file");
  return cnf::load_dimacs(config.input);
}

std::uint64_t count_solutions(const cnf::CnfFormula& formula) {
  return cnf::enumerate_solutions(formula).size();
}

PhiSchedule make_schedule(const RunConfig& config, const cnf::CnfFormula& formula) {
  if (config.schedule == "unknown") return PhiSchedule::unknown_m();
  if (config.schedule == "critical") {
    const auto m = count_solutions(formula);
    if (m == 0) throw UsageError("critical schedule needs at least one solution");
    return PhiSchedule::critical(m, std::uint64_t{1} << formula.num_vars());
  }
  if (config.schedule == "fixed") {
    if (!config.phi) throw UsageError("fixed schedule needs --phi");
    return PhiSchedule::fixed(*config.phi);
  }
  throw UsageError("unknown schedule '" + config.schedule + "'");
}

int max_iters_for(const RunConfig& config, const cnf::CnfFormula& formula) {
  const int cap = config.max_iters.value_or(default_max_iters(std::uint64_t{1} << formula.num_vars()));
  if (cap < 1) throw UsageError("--max-iters must be >= 1");
  return cap;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const cnf::ParseError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const cnf::CnfError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const distnet::PartitionError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitInputError;
}

json curve_json(const std::vector<double>& curve) {
  json arr = json::array();
  for (double v : curve) arr.push_back(v);
  return arr;
}

}  // namespace

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto formula = load_input(config);
    const auto schedule = make_schedule(config, formula);
    const int cap = max_iters_for(config, formula);
    const bool trajectories = config.mode == "trajectories";
    if (!trajectories && config.mode != "exact") throw UsageError("unknown mode '" + config.mode + "'");
    if (trajectories && !config.seed) throw UsageError("trajectory mode needs --seed");
    if (config.runs < 1) throw UsageError("--runs must be >= 1");
    if (config.jobs < 1) throw UsageError("--jobs must be >= 1");

    std::optional<distnet::Partition> partition;
    if (!config.partition.empty()) {
      partition = distnet::Partition::from_json(read_file(config.partition));
      partition->validate(formula);
    }

    std::vector<PfpRunReport> reports;
    json dist_info;
    if (partition) {
      if (trajectories && config.runs != 1) throw UsageError("distributed solve runs one trajectory");
      const RunMode mode = trajectories ? RunMode{TrajectoryMode{*config.seed}} : RunMode{ExactMode{}};
      const auto d = distnet::run_distributed_pfp(formula, *partition, schedule, mode, cap,
                                                  config.seed.value_or(0));
      reports.push_back(d.run);
      dist_info = {{"nodes", partition->nodes},
                   {"classical_bits", d.classical_bits},
                   {"bell_pairs", d.bell_pairs},
                   {"locality_violations", d.violations}};
    } else if (trajectories) {
      reports = run_trajectories(formula, schedule, config.runs, *config.seed, cap, config.jobs);
    } else {
      reports.push_back(pfp_run(formula, schedule, ExactMode{}, cap));
    }

    // Success curve, t = 0..cap: exact cumulative halting probability, or the
    // fraction of trajectories halted by t.
    std::vector<double> curve(static_cast<std::size_t>(cap) + 1, 0.0);
    if (!trajectories) {
      const auto& r = reports.front();
      for (std::size_t t = 1; t < curve.size(); ++t) {
        curve[t] = t <= r.records.size() ? r.records[t - 1].cumulative_success : curve[t - 1];
      }
    } else {
      for (const auto& r : reports) {
        if (r.outcome != RunOutcome::Solved) continue;
        for (std::size_t t = static_cast<std::size_t>(r.iterations); t < curve.size(); ++t) {
          curve[t] += 1.0 / static_cast<double>(reports.size());
        }
      }
    }

    const auto solved = std::find_if(reports.begin(), reports.end(), [](const PfpRunReport& r) {
      return r.outcome == RunOutcome::Solved;
    });
    json j;
    j["schema"] = 1;
    j["mode"] = trajectories ? "trajectories" : "exact";
    j["schedule"] = schedule.describe();
    j["max_iters"] = cap;
    j["seed"] = config.seed ? json(*config.seed) : json(nullptr);
    j["success_probability_curve"] = curve_json(curve);
    if (!dist_info.is_null()) j["distributed"] = dist_info;
    int status = kExitOk;
    if (solved != reports.end()) {
      j["status"] = "solved";
      j["assignment"] = cnf::assignment_string(*solved->assignment);
      j["satisfies"] = cnf::evaluate(formula, *solved->assignment);
      j["iterations"] = solved->iterations;
    } else {
      j["status"] = "exhausted";
      j["assignment"] = nullptr;
      j["iterations"] = reports.front().iterations;
      j["message"] = kExhaustedMessage;
      status = kExitExhausted;
    }
    if (trajectories) {
      json runs = json::array();
      for (const auto& r : reports) {
        runs.push_back({{"seed", *r.seed},
                        {"iterations", r.iterations},
                        {"assignment", r.assignment ? json(cnf::assignment_string(*r.assignment))
                                                    : json(nullptr)}});
      }
      j["runs"] = runs;
    }
    emit(config, out, j.dump(2) + "\n");
    if (status == kExitExhausted) err << kExhaustedMessage << '\n';
    return status;
  });
}

int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (config.mode != "exact") throw UsageError("compare supports exact mode only");
    const auto formula = load_input(config);
    const int steps = max_iters_for(config, formula);
    const auto m = count_solutions(formula);
    if (m == 0) throw UsageError("compare needs a satisfiable formula");
    const std::uint64_t n = std::uint64_t{1} << formula.num_vars();

    const auto grover = grover_run(formula, steps);
    auto pfp_curve = [&](const PhiSchedule& s) {
      const auto r = pfp_run(formula, s, ExactMode{}, steps);
      std::vector<double> c(static_cast<std::size_t>(steps) + 1, 0.0);
      for (std::size_t t = 1; t < c.size(); ++t) {
        c[t] = t <= r.records.size() ? r.records[t - 1].cumulative_success : c[t - 1];
      }
      return c;
    };
    const auto unknown = pfp_curve(PhiSchedule::unknown_m());
    const auto critical = pfp_curve(PhiSchedule::critical(m, n));

    std::ostringstream csv;
    csv << "t,grover_success,pfp_unknown_success,pfp_critical_success\n";
    for (std::size_t t = 0; t < grover.size(); ++t) {
      csv << t << ',' << format_number(grover[t]) << ',' << format_number(unknown[t]) << ','
          << format_number(critical[t]) << '\n';
    }
    emit(config, out, csv.str());
    return static_cast<int>(kExitOk);
  });
}

int cmd_dist_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const int m = config.controls;
    if (m < 1 || m > 4) throw UsageError("--controls must be in [1, 4]");
    if (config.inputs < 1) throw UsageError("--inputs must be >= 1");
    Matrix2 u;
    if (config.gate == "X") {
      u = matrices::x();
    } else if (config.gate == "Z") {
      u = matrices::z();
    } else if (config.gate == "H") {
      u = matrices::h();
    } else {
      throw UsageError("--gate must be X, Z or H");
    }
    distnet::ProtocolOptions options;
    options.corrupt_correction = config.corrupt_correction;

    Rng rng(config.seed.value_or(0));
    std::vector<StateVector> inputs;
    if (m == 1 && config.gate == "X") {
      StateVector smoke(2);  // p = |+>, t = |0>
      apply(smoke, gates::h(0));
      inputs.push_back(smoke);
    }
    while (inputs.size() < static_cast<std::size_t>(config.inputs)) {
      inputs.push_back(random_state(static_cast<std::size_t>(m) + 1, rng));
    }

    const std::size_t branches = std::size_t{1} << (2 * m);
    double worst = 0.0;
    std::size_t violations = 0;
    bool bits_ok = true;
    bool trace_written = config.trace_out.empty();
    for (const auto& in : inputs) {
      const auto direct = distnet::direct_controlled_unitary(in, u);
      for (std::size_t b = 0; b < branches; ++b) {
        std::vector<int> outcomes(static_cast<std::size_t>(2 * m));
        for (std::size_t k = 0; k < outcomes.size(); ++k) outcomes[k] = static_cast<int>((b >> k) & 1U);
        const auto run = distnet::run_protocol(distnet::setup(m, u, in), outcomes, options);
        worst = std::max(worst, distnet::overlap_deviation(direct, run.output));
        violations += run.violations;
        bits_ok = bits_ok && run.trace.classical_bits() == 2 * static_cast<std::size_t>(m);
        if (!trace_written) {
          std::ofstream f(config.trace_out, std::ios::binary);
          if (!f) throw UsageError("cannot open trace file " + config.trace_out);
          run.trace.write_jsonl(f);
          trace_written = true;
        }
      }
    }
    const bool ok = worst <= 1e-9 && violations == 0 && bits_ok;
    json j{{"schema", 1},
           {"controls", m},
           {"gate", config.gate},
           {"inputs", inputs.size()},
           {"branches_per_input", branches},
           {"max_deviation", worst},
           {"classical_bits_per_execution", 2 * m},
           {"classical_bits_ok", bits_ok},
           {"locality_violations", violations},
           {"status", ok ? "verified" : "deviation"}};
    emit(config, out, j.dump(2) + "\n");
    return static_cast<int>(ok ? kExitOk : kExitExhausted);
  });
}

int cmd_analytic(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    double beta = 0.0;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> counts;
    if (config.theta) {
      if (config.num_solutions || config.search_space) throw UsageError("give --theta or --M/--N, not both");
      beta = *config.theta;
      if (!(beta >= 0.0 && beta <= boost::math::constants::half_pi<double>())) {
        throw UsageError("--theta must lie in [0, pi/2]");
      }
    } else if (config.num_solutions && config.search_space) {
      counts = {*config.num_solutions, *config.search_space};
      beta = search_angle(counts->first, counts->second);
    } else {
      throw UsageError("analytic needs --theta or both --M and --N");
    }

    PhiSchedule schedule = PhiSchedule::unknown_m();
    if (config.schedule == "critical") {
      schedule = counts ? PhiSchedule::critical(counts->first, counts->second)
                        : PhiSchedule::critical_for_search_angle(beta);
    } else if (config.schedule == "fixed") {
      if (!config.phi) throw UsageError("fixed schedule needs --phi");
      schedule = PhiSchedule::fixed(*config.phi);
    } else if (config.schedule != "unknown") {
      throw UsageError("unknown schedule '" + config.schedule + "'");
    }
    const int steps = config.max_iters.value_or(20);
    if (steps < 0) throw UsageError("--max-iters must be >= 0");

    std::ostringstream csv;
    analytic::write_csv(csv, schedule, analytic::evolve(beta, schedule, steps));
    emit(config, out, csv.str());
    return static_cast<int>(kExitOk);
  });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parallel fixed-point quantum search for CNF satisfiability"};
  app.require_subcommand(1);
  RunConfig c;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", c.out, "Output file (default: stdout)");
    sub->add_option("--max-iters", c.max_iters, "Iteration cap / number of steps");
  };
  auto add_schedule = [&](CLI::App* sub) {
    sub->add_option("--schedule", c.schedule, "unknown | critical | fixed")
        ->check(CLI::IsMember({"unknown", "critical", "fixed"}));
    sub->add_option("--phi", c.phi, "Rotation angle for the fixed schedule");
  };

  auto* solve = app.add_subcommand("solve", "Search for a satisfying assignment");
  solve->add_option("input", c.input, "DIMACS CNF file")->required();
  solve->add_option("--mode", c.mode, "exact | trajectories")
      ->check(CLI::IsMember({"exact", "trajectories"}));
  solve->add_option("--seed", c.seed, "Seed for trajectory sampling and protocol outcomes");
  solve->add_option("--runs", c.runs, "Number of trajectories");
  solve->add_option("--jobs", c.jobs, "Worker threads for trajectories");
  solve->add_option("--partition", c.partition, "Clause-to-node JSON for distributed execution");
  add_schedule(solve);
  add_common(solve);

  auto* compare = app.add_subcommand("compare", "Grover vs parallel fixed-point success curves (CSV)");
  compare->add_option("input", c.input, "DIMACS CNF file")->required();
  compare->add_option("--mode", c.mode, "exact only");
  add_common(compare);

  auto* dist = app.add_subcommand("dist-verify", "Check the distributed controlled-U protocol");
  dist->add_option("--controls,-m", c.controls, "Number of controls (1-4)");
  dist->add_option("--gate", c.gate, "Target unitary: X, Z or H");
  dist->add_option("--inputs", c.inputs, "Number of input states");
  dist->add_option("--seed", c.seed, "Seed for random inputs");
  dist->add_option("--trace", c.trace_out, "Write the first execution's trace as JSON lines");
  dist->add_flag("--corrupt-correction", c.corrupt_correction)->group("");
  dist->add_option("--out", c.out, "Output file (default: stdout)");

  auto* analytic = app.add_subcommand("analytic", "Transfer-matrix recursion (CSV)");
  analytic->add_option("--theta", c.theta, "Search angle arcsin(sqrt(M/N))");
  analytic->add_option("--M", c.num_solutions, "Number of solutions");
  analytic->add_option("--N", c.search_space, "Search-space size");
  add_schedule(analytic);
  add_common(analytic);

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  if (*solve) return cmd_solve(c, out, err);
  if (*compare) return cmd_compare(c, out, err);
  if (*dist) return cmd_dist_verify(c, out, err);
  return cmd_analytic(c, out, err);
}

}  // namespace pfp::cli
