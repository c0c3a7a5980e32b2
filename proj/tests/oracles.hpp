#pragma once

/*
 * Independent cross-checks shared by the unit tests and the acceptance
 * runner. check_trace replays a finished trace against its scenario and
 * verifies structural properties the engine never encodes directly:
 *
 *  - per-job lifecycle order (submit, start once, progress, finish) and
 *    progress monotonicity within [0, total_steps]
 *  - allocations inside [n_min, n_max]; restarts resume exactly at the
 *    checkpointed step (no step is ever executed twice)
 *  - checkpoints only at neighbor-search steps
 *  - every applied resize was decided and granted first, and its
 *    terminate -> restart gap matches the configured cost distribution
 *  - at least inhibitor_delay steps between applied resizes of one job
 *  - cluster-wide allocation totals re-derived from per-job events match
 *    every emitted total and never exceed the cluster size
 *  - sampled efficiency equals the model's value at the sampled node count
 *
 * random_scenario generates small valid scenarios across both schedulers,
 * both cost modes, and a wide parameter range for fuzz-style runs.
 */

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmrsim/appmodel.hpp"
#include "dmrsim/domain.hpp"
#include "dmrsim/scenario.hpp"

namespace oracle {

using namespace dmrsim;

inline void fail(const std::string& msg) { throw std::runtime_error("trace oracle: " + msg); }

inline void check_trace(const ScenarioConfig& sc, const std::vector<TraceEvent>& trace) {
  struct Tracker {
    const JobSpec* spec = nullptr;
    const AppModel* model = nullptr;
    bool submitted = false, started = false, finished = false;
    NodeCount alloc = 0;
    StepCount last_step = 0;
    std::optional<StepCount> last_ckpt;
    std::optional<Seconds> terminate_time;
    std::optional<NodeCount> terminate_from;
    std::optional<StepCount> last_restart_step;
    std::optional<NodeCount> decided_to;
    std::optional<NodeCount> granted_to;
  };

  const std::vector<JobSpec> specs = sc.materialized_jobs();
  std::map<std::string, Tracker> jobs;
  for (const JobSpec& s : specs) {
    Tracker t;
    t.spec = &s;
    t.model = sc.find_model(s.app_model_id);
    if (!t.model) fail("job " + s.id + " references an unknown model");
    jobs[s.id] = t;
  }

  Seconds clock = -1.0;
  for (const TraceEvent& e : trace) {
    if (clock >= 0.0 && e.time < clock - 1e-9) fail("clock moved backwards");
    clock = std::max(clock, e.time);

    if (e.kind == TraceKind::NodesAllocatedTotal) {
      NodeCount sum = 0;
      for (const auto& [id, t] : jobs) sum += t.alloc;
      if (!e.total_nodes) fail("allocation total without a value");
      if (*e.total_nodes != sum)
        fail("allocation total " + std::to_string(*e.total_nodes) +
             " != recomputed " + std::to_string(sum));
      if (sum > sc.cluster.total_compute_nodes) fail("allocation exceeds the cluster");
      continue;
    }

    auto it = jobs.find(e.job);
    if (it == jobs.end()) fail("event for unknown job " + e.job);
    Tracker& t = it->second;
    const JobSpec& s = *t.spec;

    switch (e.kind) {
      case TraceKind::Submit:
        if (t.submitted) fail(s.id + ": submitted twice");
        if (std::abs(e.time - s.submit_time) > 1e-9) fail(s.id + ": wrong submit time");
        t.submitted = true;
        break;

      case TraceKind::Start:
        if (!t.submitted || t.started) fail(s.id + ": start out of order");
        if (!e.nodes || *e.nodes < s.n_min || *e.nodes > s.n_max)
          fail(s.id + ": start allocation outside [n_min, n_max]");
        t.started = true;
        t.alloc = *e.nodes;
        break;

      case TraceKind::StepProgress:
        if (!t.started || t.finished) fail(s.id + ": progress while not running");
        if (!e.step || *e.step < t.last_step || *e.step > s.total_steps)
          fail(s.id + ": progress step not monotone within bounds");
        if (!e.nodes || *e.nodes != t.alloc) fail(s.id + ": progress at wrong node count");
        t.last_step = *e.step;
        break;

      case TraceKind::CeSample: {
        if (!t.started) fail(s.id + ": efficiency sample before start");
        if (!e.ce || *e.ce <= 0.0 || *e.ce > 1.0) fail(s.id + ": efficiency out of (0, 1]");
        if (!e.nodes || *e.nodes != t.alloc) fail(s.id + ": sample at wrong node count");
        // Node count is constant between restarts and restarts reset the
        // accumulator, so the cumulative value must equal the model's.
        const double expect = instantaneous_ce(*t.model, t.alloc);
        if (std::abs(*e.ce - expect) > 1e-9) fail(s.id + ": efficiency sample off model");
        break;
      }

      case TraceKind::ResizeDecided:
        if (!t.started) fail(s.id + ": resize decided before start");
        if (!e.nodes_from || *e.nodes_from != t.alloc) fail(s.id + ": decided from wrong size");
        if (!e.nodes_to || *e.nodes_to < s.n_min || *e.nodes_to > s.n_max ||
            *e.nodes_to == t.alloc)
          fail(s.id + ": decided target invalid");
        t.decided_to = e.nodes_to;
        break;

      case TraceKind::ResizePendingResources:
        if (!t.decided_to || e.nodes_to != t.decided_to)
          fail(s.id + ": pending grant does not match the decision");
        break;

      case TraceKind::ResizeGranted:
        if (!t.decided_to || e.nodes_to != t.decided_to)
          fail(s.id + ": grant does not match the decision");
        t.granted_to = e.nodes_to;
        break;

      case TraceKind::CheckpointWritten:
        if (!e.step || *e.step != t.last_step) fail(s.id + ": checkpoint not at current step");
        if (*e.step <= 0 || *e.step % t.model->nstlist != 0)
          fail(s.id + ": checkpoint off the neighbor-search cadence");
        t.last_ckpt = e.step;
        break;

      case TraceKind::Terminate:
        if (!t.granted_to) fail(s.id + ": terminate without a granted resize");
        if (!e.nodes_from || *e.nodes_from != t.alloc) fail(s.id + ": terminate from wrong size");
        if (!e.nodes_to || *e.nodes_to != *t.granted_to)
          fail(s.id + ": terminate target does not match the grant");
        if (!t.last_ckpt || *t.last_ckpt != t.last_step)
          fail(s.id + ": terminate without a checkpoint at the current step");
        t.terminate_time = e.time;
        t.terminate_from = t.alloc;
        t.alloc = *e.nodes_to;  // new size is held through the restart delay
        t.granted_to.reset();
        t.decided_to.reset();
        break;

      case TraceKind::Restart: {
        if (!t.terminate_time) fail(s.id + ": restart without terminate");
        if (!e.step || !t.last_ckpt || *e.step != *t.last_ckpt)
          fail(s.id + ": restart does not resume at the checkpointed step");
        if (!e.nodes || *e.nodes != t.alloc) fail(s.id + ": restart at wrong node count");
        if (!e.duration || std::abs(*e.duration - (e.time - *t.terminate_time)) > 1e-9)
          fail(s.id + ": restart duration != terminate->restart gap");
        const bool expansion = t.alloc > *t.terminate_from;
        const CostParams& p = expansion ? sc.cost_model.expand : sc.cost_model.shrink;
        if (sc.cost_model.mode == CostMode::Deterministic) {
          if (std::abs(*e.duration - p.mean) > 1e-9)
            fail(s.id + ": deterministic restart delay != mean");
        } else if (*e.duration < p.min - 1e-9 || *e.duration > p.max + 1e-9) {
          fail(s.id + ": stochastic restart delay outside [min, max]");
        }
        if (t.last_restart_step &&
            *e.step - *t.last_restart_step < sc.policy.inhibitor_delay)
          fail(s.id + ": resizes closer together than the inhibitor allows");
        t.last_restart_step = e.step;
        t.terminate_time.reset();
        t.terminate_from.reset();
        break;
      }

      case TraceKind::Finish:
        if (!t.started || t.finished) fail(s.id + ": finish out of order");
        if (t.terminate_time) fail(s.id + ": finish during a restart");
        if (t.last_step != s.total_steps) fail(s.id + ": finished before the last step");
        t.finished = true;
        t.alloc = 0;
        break;

      case TraceKind::NodesAllocatedTotal:
        break;  // handled above
    }
  }

  for (const auto& [id, t] : jobs) {
    if (!t.submitted || !t.started || !t.finished) fail(id + ": incomplete lifecycle");
    if (t.terminate_time) fail(id + ": dangling terminate");
  }
}

/* Small random but always-valid scenario for fuzz runs. */
inline ScenarioConfig random_scenario(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto ri = [&](long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(rng);
  };
  auto rd = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  ScenarioConfig s;
  s.name = "random-" + std::to_string(seed);
  s.seed = seed;
  s.cluster.total_compute_nodes = static_cast<NodeCount>(ri(4, 40));
  s.cluster.reserved_total_nodes = s.cluster.total_compute_nodes + 1;

  AppModel m;
  m.id = "m";
  m.work_per_step = rd(0.2, 3.0);
  m.comm_base = rd(0.0, 0.05);
  m.comm_per_node = rd(0.0, 0.01);
  m.comm_shape = ri(0, 1) ? CommShape::Linear : CommShape::Logarithmic;
  m.nstlist = ri(1, 250);
  m.checkpoint_write_cost = rd(0.0, 2.0);
  s.app_models.push_back(m);

  s.cost_model.mode = ri(0, 1) ? CostMode::Stochastic : CostMode::Deterministic;
  const double em = rd(5.0, 40.0);
  s.cost_model.expand = {em, rd(0.0, 10.0), em * 0.5, em * 1.7};
  const double sm = rd(2.0, 15.0);
  s.cost_model.shrink = {sm, rd(0.0, 4.0), sm * 0.5, sm * 1.7};

  s.policy.ce_target = rd(0.30, 0.99);
  s.policy.decision_interval = ri(10, 400);
  s.policy.inhibitor_delay = ri(0, 400);
  s.policy.expansion_gain = rd(1.0, 60.0);
  s.sched_mode = ri(0, 1) ? SchedMode::ReserveMin : SchedMode::Greedy;

  const int njobs = static_cast<int>(ri(1, 8));
  for (int i = 0; i < njobs; ++i) {
    JobSpec j;
    j.id = "r" + std::to_string(i + 1);
    j.n_min = static_cast<NodeCount>(
        ri(1, std::min<NodeCount>(4, s.cluster.total_compute_nodes)));
    j.n_max = static_cast<NodeCount>(
        ri(j.n_min, std::min<NodeCount>(12, s.cluster.total_compute_nodes)));
    j.total_steps = ri(50, 1500);
    j.submit_time = ri(0, 2) == 0 ? 0.0 : rd(0.0, 600.0);
    j.app_model_id = "m";
    s.jobs.push_back(j);
  }
  return s;
}

}  // namespace oracle
