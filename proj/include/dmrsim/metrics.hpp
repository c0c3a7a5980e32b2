#pragma once

/*
 * Post-run accounting over a trace:
 *
 *  - makespan: last job completion minus earliest submission
 *  - net cost: node-hours actually allocated, integrated from the
 *    cluster-wide allocation profile (a left-constant step function)
 *  - total cost: node-hours of the full reservation over the makespan
 *  - reconfiguration stats: per-event downtime between a job's Terminate and
 *    its matching Restart, split into expansions and shrinks
 */

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmrsim/domain.hpp"

namespace dmrsim {

struct ProfilePoint {
  Seconds time = 0.0;
  double value = 0.0;
};

/* Cluster-wide allocation profile: one point per NodesAllocatedTotal event,
 * valid from its timestamp until the next point. */
inline std::vector<ProfilePoint> allocation_profile(const std::vector<TraceEvent>& trace) {
  std::vector<ProfilePoint> out;
  for (const TraceEvent& e : trace) {
    if (e.kind != TraceKind::NodesAllocatedTotal) continue;
    if (!e.total_nodes) throw std::invalid_argument("allocation event without a total");
    out.push_back({e.time, static_cast<double>(*e.total_nodes)});
  }
  return out;
}

/* Integral of a left-constant step function: each point holds until the next
 * one; the last point contributes nothing. */
inline double integrate_step(const std::vector<ProfilePoint>& profile) {
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
    const double dt = profile[i + 1].time - profile[i].time;
    if (dt < 0) throw std::invalid_argument("profile times must be non-decreasing");
    area += profile[i].value * dt;
  }
  return area;
}

/* Plain trapezoid rule over a piecewise-linear profile. */
inline double integrate_trapezoid(const std::vector<ProfilePoint>& profile) {
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
    const double dt = profile[i + 1].time - profile[i].time;
    if (dt < 0) throw std::invalid_argument("profile times must be non-decreasing");
    area += 0.5 * (profile[i].value + profile[i + 1].value) * dt;
  }
  return area;
}

/* Expand a step profile so the trapezoid rule integrates it exactly: before
 * every value change insert a carryover point holding the old value at the
 * new timestamp. */
inline std::vector<ProfilePoint> with_carryover_points(const std::vector<ProfilePoint>& profile) {
  std::vector<ProfilePoint> out;
  out.reserve(profile.size() * 2);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (i > 0 && profile[i].time > profile[i - 1].time && profile[i].value != profile[i - 1].value)
      out.push_back({profile[i].time, profile[i - 1].value});
    out.push_back(profile[i]);
  }
  return out;
}

/* Wall time from the earliest submission to the last completion. Every
 * submitted job must have finished; an empty trace has zero makespan. */
inline Seconds makespan(const std::vector<TraceEvent>& trace) {
  std::optional<Seconds> first_submit;
  std::optional<Seconds> last_finish;
  std::map<std::string, int> open;  // submits minus finishes per job
  for (const TraceEvent& e : trace) {
    if (e.kind == TraceKind::Submit) {
      if (!first_submit || e.time < *first_submit) first_submit = e.time;
      open[e.job] += 1;
    } else if (e.kind == TraceKind::Finish) {
      if (!last_finish || e.time > *last_finish) last_finish = e.time;
      open[e.job] -= 1;
    }
  }
  for (const auto& [id, n] : open)
    if (n != 0) throw std::invalid_argument("makespan undefined: job " + id + " did not finish");
  if (!first_submit) return 0.0;
  return *last_finish - *first_submit;
}

/* Node-hours actually held by running jobs over the whole run. */
inline double net_cost_node_hours(const std::vector<TraceEvent>& trace) {
  return integrate_step(allocation_profile(trace)) / 3600.0;
}

inline double total_cost_node_hours(Seconds makespan_s, NodeCount reserved_total_nodes) {
  if (reserved_total_nodes < 0) throw std::invalid_argument("negative reservation");
  return makespan_s * static_cast<double>(reserved_total_nodes) / 3600.0;
}

inline double total_cost_node_hours(const std::vector<TraceEvent>& trace,
                                    NodeCount reserved_total_nodes) {
  return total_cost_node_hours(makespan(trace), reserved_total_nodes);
}

struct SampleStats {
  int count = 0;
  double total = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1); see stddev_defined
  double min = 0.0;
  double max = 0.0;
  bool stddev_defined = false;  // false with fewer than two samples
};

inline SampleStats compute_stats(const std::vector<double>& xs) {
  SampleStats s;
  s.count = static_cast<int>(xs.size());
  if (xs.empty()) return s;
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  for (double x : xs) s.total += x;
  s.mean = s.total / static_cast<double>(xs.size());
  if (xs.size() >= 2) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    s.stddev_defined = true;
  }
  return s;
}

/* One applied reconfiguration, reconstructed by pairing a job's Terminate
 * with its next Restart. */
struct ReconfigRecord {
  std::string job;
  Seconds terminate_time = 0.0;
  Seconds restart_time = 0.0;
  Seconds duration = 0.0;
  NodeCount from = 0;
  NodeCount to = 0;

  bool expansion() const { return to > from; }
};

inline std::vector<ReconfigRecord> reconfig_records(const std::vector<TraceEvent>& trace) {
  std::vector<ReconfigRecord> out;
  std::map<std::string, ReconfigRecord> pending;
  for (const TraceEvent& e : trace) {
    if (e.kind == TraceKind::Terminate) {
      if (pending.count(e.job))
        throw std::invalid_argument("two terminations without a restart: job " + e.job);
      if (!e.nodes_from || !e.nodes_to)
        throw std::invalid_argument("termination without node counts: job " + e.job);
      ReconfigRecord r;
      r.job = e.job;
      r.terminate_time = e.time;
      r.from = *e.nodes_from;
      r.to = *e.nodes_to;
      pending[e.job] = r;
    } else if (e.kind == TraceKind::Restart) {
      auto it = pending.find(e.job);
      if (it == pending.end())
        throw std::invalid_argument("restart without a termination: job " + e.job);
      ReconfigRecord r = it->second;
      pending.erase(it);
      r.restart_time = e.time;
      r.duration = e.time - r.terminate_time;
      if (r.duration < 0) throw std::invalid_argument("restart precedes termination: job " + e.job);
      out.push_back(r);
    }
  }
  if (!pending.empty())
    throw std::invalid_argument("termination without a restart: job " + pending.begin()->first);
  return out;
}

struct ReconfigStats {
  SampleStats all;
  SampleStats expands;
  SampleStats shrinks;
};

inline ReconfigStats reconfig_stats(const std::vector<TraceEvent>& trace) {
  std::vector<double> all, ex, sh;
  for (const ReconfigRecord& r : reconfig_records(trace)) {
    all.push_back(r.duration);
    (r.expansion() ? ex : sh).push_back(r.duration);
  }
  return {compute_stats(all), compute_stats(ex), compute_stats(sh)};
}

/* Time series of one job's sampled communication efficiency. */
inline std::vector<ProfilePoint> ce_series(const std::vector<TraceEvent>& trace,
                                           const std::string& job) {
  std::vector<ProfilePoint> out;
  for (const TraceEvent& e : trace)
    if (e.kind == TraceKind::CeSample && e.job == job && e.ce)
      out.push_back({e.time, *e.ce});
  return out;
}

struct WorkloadSummary {
  int jobs_submitted = 0;
  int jobs_finished = 0;
  Seconds makespan = 0.0;
  double net_cost_node_hours = 0.0;
  double total_cost_node_hours = 0.0;
  ReconfigStats reconfig;
  Seconds reconfig_downtime = 0.0;          // sum of terminate->restart gaps
  double reconfig_overhead_fraction = 0.0;  // downtime / makespan
};

inline WorkloadSummary summarize(const std::vector<TraceEvent>& trace,
                                 NodeCount reserved_total_nodes) {
  WorkloadSummary s;
  for (const TraceEvent& e : trace) {
    if (e.kind == TraceKind::Submit) s.jobs_submitted += 1;
    if (e.kind == TraceKind::Finish) s.jobs_finished += 1;
  }
  s.makespan = makespan(trace);
  s.net_cost_node_hours = net_cost_node_hours(trace);
  s.total_cost_node_hours = total_cost_node_hours(s.makespan, reserved_total_nodes);
  s.reconfig = reconfig_stats(trace);
  s.reconfig_downtime = s.reconfig.all.total;
  s.reconfig_overhead_fraction = s.makespan > 0 ? s.reconfig_downtime / s.makespan : 0.0;
  return s;
}

}  // namespace dmrsim
