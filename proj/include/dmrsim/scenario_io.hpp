#pragma once

/*
 * Scenario file format (JSON):
 *
 * {
 *   "name": "static-2",
 *   "seed": 42,
 *   "cluster": {"total_compute_nodes": 31, "reserved_total_nodes": 32},
 *   "app_models": [{"id": "md", "work_per_step": 1.1, "comm_base": 0.0145,
 *                   "comm_per_node": 0.0005, "comm_shape": "linear",
 *                   "nstlist": 100, "checkpoint_write_cost": 0.0}],
 *   "cost_model": {"mode": "deterministic",
 *                  "expand": {"mean": 25.55, "stddev": 9.99, "min": 15.4, "max": 42.44},
 *                  "shrink": {"mean": 9.43, "stddev": 1.63, "min": 7.83, "max": 12.34}},
 *   "policy": {"ce_target": 0.95, "decision_interval": 500,
 *              "inhibitor_delay": 500, "expansion_gain": 50.0},
 *   "scheduler": "reserve-min",                 // or "greedy"
 *   "workload": {"count": 10, "inter_arrival_seconds": 0.0, "n_min": 2,
 *                "n_max": 2, "total_steps": 5000, "app_model_id": "md"},
 *   "jobs": [{"id": "a", "n_min": 1, "n_max": 12, "total_steps": 5000,
 *             "submit_time": 0.0, "app_model_id": "md"}]
 * }
 *
 * Every object field is optional and falls back to the built-in default, but
 * unknown keys are rejected so typos fail loudly. "workload" and "jobs" may
 * coexist; the run uses both. Overrides take dotted paths into this document,
 * e.g. "policy.ce_target=0.9" or "workload.n_max=12".
 */

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dmrsim/domain.hpp"
#include "dmrsim/metrics.hpp"
#include "dmrsim/scenario.hpp"

namespace dmrsim {

struct ScenarioFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_object(const nlohmann::json& j, const std::string& ctx) {
  if (!j.is_object()) throw ScenarioFormatError(ctx + ": expected a JSON object");
}

inline void check_keys(const nlohmann::json& j, const std::string& ctx,
                       std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) { ok = true; break; }
    if (!ok) throw ScenarioFormatError(ctx + ": unknown key \"" + item.key() + "\"");
  }
}

template <typename T>
T field_or(const nlohmann::json& j, const char* key, const std::string& ctx, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j[key].get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ScenarioFormatError(ctx + "." + key + ": wrong type");
  }
}

inline CostParams cost_params_from_json(const nlohmann::json& j, const std::string& ctx,
                                        const CostParams& defaults) {
  require_object(j, ctx);
  check_keys(j, ctx, {"mean", "stddev", "min", "max"});
  CostParams p = defaults;
  p.mean = field_or(j, "mean", ctx, p.mean);
  p.stddev = field_or(j, "stddev", ctx, p.stddev);
  p.min = field_or(j, "min", ctx, p.min);
  p.max = field_or(j, "max", ctx, p.max);
  return p;
}

}  // namespace detail

inline std::string comm_shape_name(CommShape s) {
  return s == CommShape::Linear ? "linear" : "logarithmic";
}

inline CommShape comm_shape_from_name(const std::string& s) {
  if (s == "linear") return CommShape::Linear;
  if (s == "logarithmic") return CommShape::Logarithmic;
  throw ScenarioFormatError("unknown comm_shape \"" + s + "\" (linear | logarithmic)");
}

inline std::string cost_mode_name(CostMode m) {
  return m == CostMode::Deterministic ? "deterministic" : "stochastic";
}

inline CostMode cost_mode_from_name(const std::string& s) {
  if (s == "deterministic") return CostMode::Deterministic;
  if (s == "stochastic") return CostMode::Stochastic;
  throw ScenarioFormatError("unknown cost mode \"" + s + "\" (deterministic | stochastic)");
}

inline std::string sched_mode_name(SchedMode m) {
  return m == SchedMode::Greedy ? "greedy" : "reserve-min";
}

inline SchedMode sched_mode_from_name(const std::string& s) {
  if (s == "greedy") return SchedMode::Greedy;
  if (s == "reserve-min") return SchedMode::ReserveMin;
  throw ScenarioFormatError("unknown scheduler \"" + s + "\" (greedy | reserve-min)");
}

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  using detail::check_keys;
  using detail::field_or;
  using detail::require_object;

  require_object(j, "scenario");
  check_keys(j, "scenario",
             {"name", "seed", "cluster", "app_models", "cost_model", "policy", "scheduler",
              "workload", "jobs"});

  ScenarioConfig s;
  s.name = field_or<std::string>(j, "name", "scenario", "");
  s.seed = field_or<std::uint64_t>(j, "seed", "scenario", s.seed);

  if (j.contains("cluster")) {
    const auto& c = j["cluster"];
    require_object(c, "cluster");
    check_keys(c, "cluster", {"total_compute_nodes", "reserved_total_nodes"});
    s.cluster.total_compute_nodes =
        field_or(c, "total_compute_nodes", "cluster", s.cluster.total_compute_nodes);
    s.cluster.reserved_total_nodes =
        field_or(c, "reserved_total_nodes", "cluster", s.cluster.reserved_total_nodes);
  }

  if (j.contains("app_models")) {
    if (!j["app_models"].is_array())
      throw ScenarioFormatError("app_models: expected a JSON array");
    for (const auto& mj : j["app_models"]) {
      const std::string ctx = "app_models[" + std::to_string(s.app_models.size()) + "]";
      require_object(mj, ctx);
      check_keys(mj, ctx,
                 {"id", "work_per_step", "comm_base", "comm_per_node", "comm_shape", "nstlist",
                  "checkpoint_write_cost"});
      AppModel m;
      m.id = field_or<std::string>(mj, "id", ctx, "");
      m.work_per_step = field_or(mj, "work_per_step", ctx, m.work_per_step);
      m.comm_base = field_or(mj, "comm_base", ctx, m.comm_base);
      m.comm_per_node = field_or(mj, "comm_per_node", ctx, m.comm_per_node);
      if (mj.contains("comm_shape"))
        m.comm_shape = comm_shape_from_name(field_or<std::string>(mj, "comm_shape", ctx, ""));
      m.nstlist = field_or(mj, "nstlist", ctx, m.nstlist);
      m.checkpoint_write_cost =
          field_or(mj, "checkpoint_write_cost", ctx, m.checkpoint_write_cost);
      s.app_models.push_back(std::move(m));
    }
  }

  if (j.contains("cost_model")) {
    const auto& c = j["cost_model"];
    require_object(c, "cost_model");
    check_keys(c, "cost_model", {"mode", "expand", "shrink"});
    if (c.contains("mode"))
      s.cost_model.mode = cost_mode_from_name(field_or<std::string>(c, "mode", "cost_model", ""));
    if (c.contains("expand"))
      s.cost_model.expand =
          detail::cost_params_from_json(c["expand"], "cost_model.expand", s.cost_model.expand);
    if (c.contains("shrink"))
      s.cost_model.shrink =
          detail::cost_params_from_json(c["shrink"], "cost_model.shrink", s.cost_model.shrink);
  }

  if (j.contains("policy")) {
    const auto& p = j["policy"];
    require_object(p, "policy");
    check_keys(p, "policy", {"ce_target", "decision_interval", "inhibitor_delay", "expansion_gain"});
    s.policy.ce_target = field_or(p, "ce_target", "policy", s.policy.ce_target);
    s.policy.decision_interval =
        field_or(p, "decision_interval", "policy", s.policy.decision_interval);
    s.policy.inhibitor_delay = field_or(p, "inhibitor_delay", "policy", s.policy.inhibitor_delay);
    s.policy.expansion_gain = field_or(p, "expansion_gain", "policy", s.policy.expansion_gain);
  }

  if (j.contains("scheduler"))
    s.sched_mode = sched_mode_from_name(field_or<std::string>(j, "scheduler", "scenario", ""));

  if (j.contains("workload")) {
    const auto& w = j["workload"];
    require_object(w, "workload");
    check_keys(w, "workload",
               {"count", "inter_arrival_seconds", "n_min", "n_max", "total_steps",
                "app_model_id"});
    WorkloadGenerator g;
    g.count = field_or(w, "count", "workload", g.count);
    g.inter_arrival_seconds =
        field_or(w, "inter_arrival_seconds", "workload", g.inter_arrival_seconds);
    g.n_min = field_or(w, "n_min", "workload", g.n_min);
    g.n_max = field_or(w, "n_max", "workload", g.n_max);
    g.total_steps = field_or(w, "total_steps", "workload", g.total_steps);
    g.app_model_id = field_or<std::string>(w, "app_model_id", "workload", "");
    s.generator = g;
  }

  if (j.contains("jobs")) {
    if (!j["jobs"].is_array()) throw ScenarioFormatError("jobs: expected a JSON array");
    for (const auto& jj : j["jobs"]) {
      const std::string ctx = "jobs[" + std::to_string(s.jobs.size()) + "]";
      require_object(jj, ctx);
      check_keys(jj, ctx, {"id", "n_min", "n_max", "total_steps", "submit_time", "app_model_id"});
      JobSpec spec;
      spec.id = field_or<std::string>(jj, "id", ctx, "");
      spec.n_min = field_or(jj, "n_min", ctx, spec.n_min);
      spec.n_max = field_or(jj, "n_max", ctx, spec.n_max);
      spec.total_steps = field_or(jj, "total_steps", ctx, spec.total_steps);
      spec.submit_time = field_or(jj, "submit_time", ctx, spec.submit_time);
      spec.app_model_id = field_or<std::string>(jj, "app_model_id", ctx, "");
      s.jobs.push_back(std::move(spec));
    }
  }

  return s;
}

inline nlohmann::ordered_json scenario_to_json(const ScenarioConfig& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["cluster"] = {{"total_compute_nodes", s.cluster.total_compute_nodes},
                  {"reserved_total_nodes", s.cluster.reserved_total_nodes}};
  j["app_models"] = nlohmann::ordered_json::array();
  for (const AppModel& m : s.app_models)
    j["app_models"].push_back({{"id", m.id},
                               {"work_per_step", m.work_per_step},
                               {"comm_base", m.comm_base},
                               {"comm_per_node", m.comm_per_node},
                               {"comm_shape", comm_shape_name(m.comm_shape)},
                               {"nstlist", m.nstlist},
                               {"checkpoint_write_cost", m.checkpoint_write_cost}});
  const auto cost = [](const CostParams& p) {
    return nlohmann::ordered_json{
        {"mean", p.mean}, {"stddev", p.stddev}, {"min", p.min}, {"max", p.max}};
  };
  j["cost_model"] = {{"mode", cost_mode_name(s.cost_model.mode)},
                     {"expand", cost(s.cost_model.expand)},
                     {"shrink", cost(s.cost_model.shrink)}};
  j["policy"] = {{"ce_target", s.policy.ce_target},
                 {"decision_interval", s.policy.decision_interval},
                 {"inhibitor_delay", s.policy.inhibitor_delay},
                 {"expansion_gain", s.policy.expansion_gain}};
  j["scheduler"] = sched_mode_name(s.sched_mode);
  if (s.generator)
    j["workload"] = {{"count", s.generator->count},
                     {"inter_arrival_seconds", s.generator->inter_arrival_seconds},
                     {"n_min", s.generator->n_min},
                     {"n_max", s.generator->n_max},
                     {"total_steps", s.generator->total_steps},
                     {"app_model_id", s.generator->app_model_id}};
  if (!s.jobs.empty()) {
    j["jobs"] = nlohmann::ordered_json::array();
    for (const JobSpec& spec : s.jobs)
      j["jobs"].push_back({{"id", spec.id},
                           {"n_min", spec.n_min},
                           {"n_max", spec.n_max},
                           {"total_steps", spec.total_steps},
                           {"submit_time", spec.submit_time},
                           {"app_model_id", spec.app_model_id}});
  }
  return j;
}

inline ScenarioConfig parse_scenario(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioFormatError(std::string("scenario is not valid JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

inline nlohmann::json load_scenario_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioFormatError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioFormatError(path + ": not valid JSON: " + e.what());
  }
}

inline ScenarioConfig load_scenario(const std::string& path) {
  return scenario_from_json(load_scenario_json(path));
}

/* Apply "dotted.path=value" to a scenario document. The value is parsed as
 * JSON when possible ("12", "0.9", "true") and treated as a bare string
 * otherwise ("greedy"). Array elements use numeric components: "jobs.0.n_max". */
inline void apply_override(nlohmann::json& doc, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ScenarioFormatError("override must look like path.to.field=value: " + assignment);
  std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  for (char& c : path)
    if (c == '.') c = '/';
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error&) {
    value = raw;  // unquoted strings like reserve-min
  }
  try {
    doc[nlohmann::json::json_pointer("/" + path)] = value;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioFormatError("cannot apply override \"" + assignment + "\": " + e.what());
  }
}

inline nlohmann::ordered_json sample_stats_to_json(const SampleStats& s) {
  nlohmann::ordered_json j;
  j["count"] = s.count;
  j["total_s"] = s.total;
  j["mean_s"] = s.mean;
  if (s.stddev_defined)
    j["stddev_s"] = s.stddev;
  else
    j["stddev_s"] = nullptr;
  j["min_s"] = s.min;
  j["max_s"] = s.max;
  return j;
}

inline nlohmann::ordered_json summary_to_json(const WorkloadSummary& s) {
  nlohmann::ordered_json j;
  j["jobs_submitted"] = s.jobs_submitted;
  j["jobs_finished"] = s.jobs_finished;
  j["makespan_s"] = s.makespan;
  j["net_cost_node_hours"] = s.net_cost_node_hours;
  j["total_cost_node_hours"] = s.total_cost_node_hours;
  j["reconfigurations"] = {{"all", sample_stats_to_json(s.reconfig.all)},
                           {"expansions", sample_stats_to_json(s.reconfig.expands)},
                           {"shrinks", sample_stats_to_json(s.reconfig.shrinks)}};
  j["reconfig_downtime_s"] = s.reconfig_downtime;
  j["reconfig_overhead_fraction"] = s.reconfig_overhead_fraction;
  return j;
}

}  // namespace dmrsim
