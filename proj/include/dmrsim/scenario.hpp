#pragma once

/*
 * Scenario description: everything one simulation run needs — cluster size,
 * application models, reconfiguration cost model, policy settings, scheduler
 * mode, and the workload (an explicit job list or a generator that stamps out
 * identical jobs at a fixed arrival spacing). validate_scenario returns every
 * violation instead of stopping at the first.
 */

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "dmrsim/domain.hpp"
#include "dmrsim/policy.hpp"
#include "dmrsim/scheduler.hpp"

namespace dmrsim {

struct ClusterConfig {
  NodeCount total_compute_nodes = 1;
  NodeCount reserved_total_nodes = 1;  // billed reservation, incl. controller

  bool operator==(const ClusterConfig&) const = default;
};

struct WorkloadGenerator {
  int count = 0;
  Seconds inter_arrival_seconds = 0.0;
  NodeCount n_min = 1;
  NodeCount n_max = 1;
  StepCount total_steps = 0;
  std::string app_model_id;

  bool operator==(const WorkloadGenerator&) const = default;
};

struct ScenarioConfig {
  std::string name;
  std::uint64_t seed = 1;
  ClusterConfig cluster;
  std::vector<AppModel> app_models;
  CostModel cost_model;
  PolicyConfig policy;
  SchedMode sched_mode = SchedMode::ReserveMin;
  std::vector<JobSpec> jobs;                     // explicit workload, or
  std::optional<WorkloadGenerator> generator;    // generated workload

  bool operator==(const ScenarioConfig&) const = default;

  /* The concrete job list: explicit jobs plus generator output. Generated ids
   * are zero-padded ("j01".."j10") so lexicographic order is arrival order. */
  std::vector<JobSpec> materialized_jobs() const {
    std::vector<JobSpec> out = jobs;
    if (generator) {
      const WorkloadGenerator& g = *generator;
      int width = 1;
      for (int c = g.count; c >= 10; c /= 10) ++width;
      for (int i = 0; i < g.count; ++i) {
        std::string n = std::to_string(i + 1);
        JobSpec j;
        j.id = "j" + std::string(static_cast<std::size_t>(width) - n.size(), '0') + n;
        j.n_min = g.n_min;
        j.n_max = g.n_max;
        j.total_steps = g.total_steps;
        j.submit_time = g.inter_arrival_seconds * static_cast<double>(i);
        j.app_model_id = g.app_model_id;
        out.push_back(j);
      }
    }
    return out;
  }

  const AppModel* find_model(const std::string& id) const {
    for (const AppModel& m : app_models)
      if (m.id == id) return &m;
    return nullptr;
  }
};

namespace detail {
inline void check_cost_params(const char* which, const CostParams& p, CostMode mode,
                              std::vector<Violation>& out) {
  const std::string subject = std::string("cost_model.") + which;
  if (p.mean <= 0.0) out.push_back({subject, "mean", "duration must be positive"});
  if (mode == CostMode::Stochastic) {
    if (p.stddev < 0.0) out.push_back({subject, "stddev", "must be non-negative"});
    if (p.min <= 0.0) out.push_back({subject, "min", "duration must be positive"});
    if (!(p.min <= p.mean && p.mean <= p.max))
      out.push_back({subject, "range", "min <= mean <= max required"});
  }
}
}  // namespace detail

inline std::vector<Violation> validate_scenario(const ScenarioConfig& s) {
  std::vector<Violation> out;

  if (s.cluster.total_compute_nodes < 1)
    out.push_back({"cluster", "total_compute_nodes", "must be >= 1"});
  if (s.cluster.reserved_total_nodes < 1)
    out.push_back({"cluster", "reserved_total_nodes", "must be >= 1"});

  std::set<std::string> model_ids;
  for (const AppModel& m : s.app_models) {
    const std::string subject = "app_model[" + m.id + "]";
    if (!model_ids.insert(m.id).second)
      out.push_back({subject, "id", "duplicate app model id"});
    if (m.work_per_step <= 0.0)
      out.push_back({subject, "work_per_step", "must be positive"});
    if (m.comm_base < 0.0) out.push_back({subject, "comm_base", "must be non-negative"});
    if (m.comm_per_node < 0.0)
      out.push_back({subject, "comm_per_node", "must be non-negative"});
    if (m.nstlist < 1) out.push_back({subject, "nstlist", "must be >= 1"});
    if (m.checkpoint_write_cost < 0.0)
      out.push_back({subject, "checkpoint_write_cost", "must be non-negative"});
  }

  detail::check_cost_params("expand", s.cost_model.expand, s.cost_model.mode, out);
  detail::check_cost_params("shrink", s.cost_model.shrink, s.cost_model.mode, out);

  if (s.policy.ce_target <= 0.0 || s.policy.ce_target >= 1.0)
    out.push_back({"policy", "ce_target", "must be in (0, 1)"});
  if (s.policy.decision_interval < 1)
    out.push_back({"policy", "decision_interval", "must be >= 1"});
  if (s.policy.inhibitor_delay < 0)
    out.push_back({"policy", "inhibitor_delay", "must be non-negative"});
  if (s.policy.expansion_gain < 0.0)
    out.push_back({"policy", "expansion_gain", "must be non-negative"});

  if (s.generator) {
    if (s.generator->count < 0)
      out.push_back({"workload.generator", "count", "must be non-negative"});
    if (s.generator->inter_arrival_seconds < 0.0)
      out.push_back({"workload.generator", "inter_arrival_seconds", "must be non-negative"});
  }

  std::set<std::string> job_ids;
  for (const JobSpec& j : s.materialized_jobs()) {
    const std::string subject = "job[" + j.id + "]";
    if (j.id.empty()) out.push_back({subject, "id", "must not be empty"});
    if (!job_ids.insert(j.id).second)
      out.push_back({subject, "id", "duplicate job id"});
    if (j.n_min < 1) out.push_back({subject, "n_min", "must be >= 1"});
    if (j.n_max < j.n_min) out.push_back({subject, "n_max", "must be >= n_min"});
    if (j.total_steps < 1) out.push_back({subject, "total_steps", "must be >= 1"});
    if (j.submit_time < 0.0) out.push_back({subject, "submit_time", "must be non-negative"});
    if (!s.find_model(j.app_model_id))
      out.push_back({subject, "app_model", "unknown app model '" + j.app_model_id + "'"});
    if (j.n_min >= 1 && j.n_min > s.cluster.total_compute_nodes)
      out.push_back({subject, "n_min", "unstartable job: n_min exceeds cluster size"});
  }

  return out;
}

}  // namespace dmrsim
