#include "commplan/cli.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "commplan/scenario_io.hpp"
#include "commplan/simulation.hpp"

namespace commplan {

namespace {

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double total(const MetricsLog& log, const std::string& mode) {
  double sum = 0.0;
  for (const auto& c : log.costs)
    if (c.mode == mode) sum += c.objective;
  return sum;
}

void print_summary(const MetricsLog& log, std::ostream& out) {
  const StepStats s = steps_per_cycle(log);
  out << "[" << to_string(log.mode) << "] cycles " << log.cycles.size() << ", steps " << log.steps.back().step
      << ", goals " << (log.goals_reached ? "reached" : "not reached") << ", violations "
      << log.violation_count() << (log.aborted ? ", ABORTED: " + log.abort_reason : "") << '\n';
  if (log.mode != RunMode::Centralized && s.count > 0) {
    out << "  steps per cycle: min " << fixed(s.min, 0) << "  median " << fixed(s.median, 1) << "  mean "
        << fixed(s.mean, 2) << "  max " << fixed(s.max, 0) << '\n';
  }
  out << "  summed objective " << fixed(total(log, std::string(to_string(log.mode))), 6) << '\n';
  if (log.mode == RunMode::Trading) {
    const auto net = log.cumulative_net_trades();
    out << "  cumulative net trades:";
    for (std::size_t i = 0; i < net.size(); ++i) out << ' ' << i << ':' << fixed(net[i], 5);
    out << '\n';
  }
}

}  // namespace

int run_cli(const RunRequest& request, std::ostream& out, std::ostream& err) {
  std::vector<RunMode> modes;
  if (request.mode == "all") {
    modes = {RunMode::Trading, RunMode::NoTrading, RunMode::Centralized};
  } else {
    try {
      modes = {parse_run_mode(request.mode)};
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitFatal;
    }
  }

  ScenarioConfig config;
  try {
    config = parse_scenario(request.scenario);
    if (request.seed) config.seed = *request.seed;
    if (request.max_cycles) {
      config.max_outer_cycles = *request.max_cycles;
      const auto problems = config.validate();
      if (!problems.empty()) throw ScenarioError(problems);
    }
  } catch (const ScenarioError& e) {
    err << "invalid scenario " << request.scenario.string() << ":\n";
    for (const auto& p : e.problems()) err << "  " << p << '\n';
    return kExitFatal;
  }

  int code = kExitClean;
  std::vector<MetricsLog> logs;
  for (RunMode mode : modes) {
    MetricsLog log = run_scenario(config, mode);
    try {
      write_traces(log, request.out_dir / std::string(to_string(mode)));
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitFatal;
    }
    if (!request.quiet) print_summary(log, out);
    if (log.aborted) code = kExitFatal;
    else if (log.violation_count() > 0 && code == kExitClean) code = kExitViolations;
    logs.push_back(std::move(log));
  }

  if (!request.quiet && logs.size() > 1) {
    out << "cost comparison (summed over cycles):";
    for (const auto& log : logs) {
      out << "  " << to_string(log.mode) << ' ' << fixed(total(log, std::string(to_string(log.mode))), 6);
    }
    out << '\n';
  }
  return code;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Communication-aware distributed multi-robot planner"};
  RunRequest req;
  std::string scenario;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int max_cycles = 0;

  app.add_option("--scenario", scenario, "Scenario JSON file")->required()->envname("COMMPLAN_SCENARIO");
  app.add_option("--out", out_dir, "Output directory for trace files")->envname("COMMPLAN_OUT");
  app.add_option("--mode", req.mode, "Run mode")
      ->check(CLI::IsMember({"trading", "no_trading", "centralized", "all"}))
      ->envname("COMMPLAN_MODE");
  auto* seed_opt = app.add_option("--seed", seed, "Override the scenario seed")->envname("COMMPLAN_SEED");
  auto* cycles_opt =
      app.add_option("--max-cycles", max_cycles, "Override max_outer_cycles")->envname("COMMPLAN_MAX_CYCLES");
  app.add_flag("--quiet", req.quiet, "Suppress the summary")->envname("COMMPLAN_QUIET");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitClean : kExitFatal;
  }
  req.scenario = scenario;
  req.out_dir = out_dir;
  if (seed_opt->count() > 0) req.seed = seed;
  if (cycles_opt->count() > 0) req.max_cycles = max_cycles;
  return run_cli(req, std::cout, std::cerr);
}

}  // namespace commplan
