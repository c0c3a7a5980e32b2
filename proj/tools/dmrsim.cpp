/*
 * dmrsim — discrete-event simulator for malleable cluster jobs.
 *
 *   dmrsim run      --scenario FILE [--trace-out F] [--summary-out F] ...
 *   dmrsim validate --scenario FILE
 *   dmrsim stats    --trace FILE [--reserved-nodes N]
 *   dmrsim compare  SCENARIO... [shared run flags]
 */

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dmrsim/cli.hpp"

namespace {

void add_scenario_flags(CLI::App& cmd, dmrsim::RunOptions& opt, bool with_scenario) {
  if (with_scenario)
    cmd.add_option("-s,--scenario", opt.scenario_path, "Scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
  cmd.add_option("-O,--override", opt.overrides,
                 "Scenario override as dotted.path=value (repeatable)");
  cmd.add_option("--seed", opt.seed, "Replace the scenario seed");
  cmd.add_option("--cost-mode", opt.cost_mode, "Reconfiguration cost mode")
      ->check(CLI::IsMember({"deterministic", "stochastic"}));
  cmd.add_option("--sched-mode", opt.sched_mode, "Scheduler sizing mode")
      ->check(CLI::IsMember({"greedy", "reserve-min"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for malleable cluster jobs"};
  app.require_subcommand(1);

  dmrsim::RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "Simulate one scenario");
  add_scenario_flags(*run, run_opt, true);
  run->add_option("--trace-out", run_opt.trace_out, "Write the event trace (JSONL)");
  run->add_option("--summary-out", run_opt.summary_out, "Write the summary (JSON)");
  run->add_option("--ce-csv-dir", run_opt.ce_csv_dir,
                  "Write per-job efficiency series as ce-<job>.csv into this directory");
  run->add_option("--alloc-csv", run_opt.alloc_csv, "Write the allocation profile (CSV)");
  run->add_flag("-q,--quiet", run_opt.quiet, "Do not print the summary to stdout");

  dmrsim::RunOptions validate_opt;
  CLI::App* validate = app.add_subcommand("validate", "Check a scenario file");
  add_scenario_flags(*validate, validate_opt, true);

  std::string trace_path;
  std::optional<dmrsim::NodeCount> reserved_override;
  CLI::App* stats = app.add_subcommand("stats", "Summarize a written trace");
  stats->add_option("-t,--trace", trace_path, "Trace file (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  stats->add_option("--reserved-nodes", reserved_override,
                    "Reservation size for total cost (defaults to the trace header)");

  dmrsim::RunOptions compare_opt;
  std::vector<std::string> compare_paths;
  CLI::App* compare = app.add_subcommand("compare", "Run several scenarios side by side");
  compare->add_option("scenarios", compare_paths, "Scenario JSON files")
      ->required()
      ->check(CLI::ExistingFile);
  add_scenario_flags(*compare, compare_opt, false);

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return dmrsim::cmd_run(run_opt, std::cout, std::cerr);
  if (validate->parsed()) return dmrsim::cmd_validate(validate_opt, std::cout, std::cerr);
  if (stats->parsed())
    return dmrsim::cmd_stats(trace_path, reserved_override, std::cout, std::cerr);
  if (compare->parsed())
    return dmrsim::cmd_compare(compare_paths, compare_opt, std::cout, std::cerr);
  return 1;  // unreachable: require_subcommand(1)
}
