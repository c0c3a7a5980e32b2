#pragma once

/*
 * Command implementations behind the dmrsim binary, kept as plain functions
 * over streams so tests can drive them without spawning processes.
 *
 *   run       simulate one scenario; print a summary, optionally write the
 *             trace (JSONL), per-job CE series (CSV), and the cluster
 *             allocation profile (CSV)
 *   validate  check a scenario file and list every violation
 *   stats     recompute the summary from a previously written trace
 *   compare   run several scenarios and print one summary line each
 *
 * Exit codes: 0 success, 1 failure (bad input, violations, unfinished jobs).
 */

#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "dmrsim/engine.hpp"
#include "dmrsim/metrics.hpp"
#include "dmrsim/scenario_io.hpp"
#include "dmrsim/trace_io.hpp"

namespace dmrsim {

struct RunOptions {
  std::string scenario_path;
  std::vector<std::string> overrides;     // dotted-path assignments, applied in order
  std::optional<std::uint64_t> seed;      // shorthand for seed=N
  std::optional<std::string> cost_mode;   // shorthand for cost_model.mode=...
  std::optional<std::string> sched_mode;  // shorthand for scheduler=...
  std::string trace_out;                  // JSONL trace path ("" = skip)
  std::string summary_out;                // summary JSON path ("" = skip)
  std::string ce_csv_dir;                 // directory for ce-<job>.csv ("" = skip)
  std::string alloc_csv;                  // allocation profile CSV path ("" = skip)
  bool quiet = false;                     // suppress the summary on stdout
};

namespace detail {

/* Shortest round-trip formatting for CSV cells, same as the JSON encoder. */
inline std::string num(double x) { return nlohmann::json(x).dump(); }

inline std::optional<ScenarioConfig> load_with_overrides(const RunOptions& opt,
                                                         std::ostream& err) {
  try {
    nlohmann::json doc = load_scenario_json(opt.scenario_path);
    for (const std::string& o : opt.overrides) apply_override(doc, o);
    if (opt.seed) apply_override(doc, "seed=" + std::to_string(*opt.seed));
    if (opt.cost_mode) apply_override(doc, "cost_model.mode=" + *opt.cost_mode);
    if (opt.sched_mode) apply_override(doc, "scheduler=" + *opt.sched_mode);
    return scenario_from_json(doc);
  } catch (const ScenarioFormatError& e) {
    err << "error: " << e.what() << "\n";
    return std::nullopt;
  }
}

inline bool report_violations(const ScenarioConfig& s, std::ostream& err) {
  const std::vector<Violation> vs = validate_scenario(s);
  for (const Violation& v : vs) err << "violation: " << v.str() << "\n";
  return vs.empty();
}

inline bool write_file(const std::string& path, const std::string& content, std::ostream& err) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    err << "error: cannot write " << path << "\n";
    return false;
  }
  out << content;
  return true;
}

}  // namespace detail

inline int cmd_validate(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  const auto scenario = detail::load_with_overrides(opt, err);
  if (!scenario) return 1;
  if (!detail::report_violations(*scenario, err)) return 1;
  out << "ok: " << (scenario->name.empty() ? opt.scenario_path : scenario->name) << " ("
      << scenario->materialized_jobs().size() << " jobs, "
      << scenario->cluster.total_compute_nodes << " compute nodes)\n";
  return 0;
}

inline int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  const auto scenario = detail::load_with_overrides(opt, err);
  if (!scenario) return 1;
  if (!detail::report_violations(*scenario, err)) return 1;

  SimResult result;
  try {
    result = run(*scenario);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  const WorkloadSummary summary =
      summarize(result.trace, scenario->cluster.reserved_total_nodes);
  const std::string summary_text = summary_to_json(summary).dump(2) + "\n";
  if (!opt.quiet) out << summary_text;
  if (!opt.summary_out.empty() && !detail::write_file(opt.summary_out, summary_text, err))
    return 1;

  if (!opt.trace_out.empty()) {
    TraceMeta meta;
    meta.scenario = scenario->name;
    meta.seed = scenario->seed;
    meta.total_compute_nodes = scenario->cluster.total_compute_nodes;
    meta.reserved_total_nodes = scenario->cluster.reserved_total_nodes;
    if (!detail::write_file(opt.trace_out, trace_to_string(meta, result.trace), err)) return 1;
  }

  if (!opt.ce_csv_dir.empty()) {
    std::set<std::string> ids;
    for (const JobState& j : result.jobs) ids.insert(j.spec.id);
    for (const std::string& id : ids) {
      const std::vector<ProfilePoint> series = ce_series(result.trace, id);
      if (series.empty()) continue;
      std::string csv = "time_s,value\n";
      for (const ProfilePoint& p : series)
        csv += detail::num(p.time) + "," + detail::num(p.value) + "\n";
      if (!detail::write_file(opt.ce_csv_dir + "/ce-" + id + ".csv", csv, err)) return 1;
    }
  }

  if (!opt.alloc_csv.empty()) {
    std::string csv = "time_s,value\n";
    for (const ProfilePoint& p : allocation_profile(result.trace))
      csv += detail::num(p.time) + "," + detail::num(p.value) + "\n";
    if (!detail::write_file(opt.alloc_csv, csv, err)) return 1;
  }

  return 0;
}

inline int cmd_stats(const std::string& trace_path, std::optional<NodeCount> reserved_override,
                     std::ostream& out, std::ostream& err) {
  std::ifstream in(trace_path, std::ios::binary);
  if (!in) {
    err << "error: cannot open trace file: " << trace_path << "\n";
    return 1;
  }
  ParsedTrace parsed;
  try {
    parsed = read_trace(in);
  } catch (const TraceFormatError& e) {
    err << "error: " << trace_path << ": " << e.what() << "\n";
    return 1;
  }
  const NodeCount reserved =
      reserved_override ? *reserved_override : parsed.meta.reserved_total_nodes;
  try {
    out << summary_to_json(summarize(parsed.events, reserved)).dump(2) << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

inline int cmd_compare(const std::vector<std::string>& scenario_paths, const RunOptions& common,
                       std::ostream& out, std::ostream& err) {
  out << std::left << std::setw(18) << "scenario" << std::right << std::setw(14) << "makespan_s"
      << std::setw(14) << "net_nh" << std::setw(14) << "total_nh" << std::setw(10) << "resizes"
      << "\n";
  bool ok = true;
  for (const std::string& path : scenario_paths) {
    RunOptions opt = common;
    opt.scenario_path = path;
    const auto scenario = detail::load_with_overrides(opt, err);
    if (!scenario || !detail::report_violations(*scenario, err)) {
      ok = false;
      continue;
    }
    try {
      const SimResult result = run(*scenario);
      const WorkloadSummary s =
          summarize(result.trace, scenario->cluster.reserved_total_nodes);
      out << std::left << std::setw(18)
          << (scenario->name.empty() ? path : scenario->name) << std::right << std::fixed
          << std::setprecision(2) << std::setw(14) << s.makespan << std::setw(14)
          << s.net_cost_node_hours << std::setw(14) << s.total_cost_node_hours
          << std::setw(10) << s.reconfig.all.count << "\n";
      out.unsetf(std::ios::fixed);
    } catch (const std::exception& e) {
      err << "error: " << path << ": " << e.what() << "\n";
      ok = false;
    }
  }
  return ok ? 0 : 1;
}

}  // namespace dmrsim
