#pragma once

/*
 * Discrete-event simulation engine. Jobs advance in segments bounded by the
 * next decision point, the neighbor-search checkpoint target of a committed
 * reconfiguration, or completion — whichever comes first. The reconfiguration
 * lifecycle per applied resize is
 *
 *   decision (grant ready) -> run to checkpoint step -> CheckpointWritten ->
 *   Terminate (shrink surplus released / expansion earmarks join) ->
 *   restart delay -> Restart at the checkpointed step (TALP reset)
 *
 * so no completed step is ever re-executed. A reconfiguration whose
 * checkpoint target lies at or beyond the end of the job is abandoned and the
 * job simply finishes at its current size.
 *
 * Determinism: simultaneous events are ordered Finish < Terminate < Restart <
 * Submit < Decision, then by job index (= submit order). Within one event,
 * released nodes go to pending expansions before queued starts. Stochastic
 * restart delays come from a hand-rolled Box-Muller generator so the byte
 * stream depends only on scenario + seed, not on the standard library build.
 */

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmrsim/appmodel.hpp"
#include "dmrsim/dmr.hpp"
#include "dmrsim/domain.hpp"
#include "dmrsim/policy.hpp"
#include "dmrsim/scenario.hpp"
#include "dmrsim/scheduler.hpp"

namespace dmrsim {

struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimOptions {
  bool check_invariants = true;  // conservation + state checks after every event
};

struct SimResult {
  std::vector<TraceEvent> trace;
  std::vector<JobState> jobs;  // final states, in submit order
};

/* Reconfiguration-delay source. Deterministic mode returns the mean; the
 * stochastic mode draws normal(mean, stddev) clipped to [min, max]. */
class CostSampler {
 public:
  CostSampler(const CostModel& model, std::uint64_t seed) : model_(model), rng_(seed) {}

  Seconds draw(bool expansion) {
    const CostParams& p = expansion ? model_.expand : model_.shrink;
    if (model_.mode == CostMode::Deterministic) return p.mean;
    const double z = std_normal();
    return std::clamp(p.mean + p.stddev * z, p.min, p.max);
  }

 private:
  double std_normal() {
    // Box-Muller on 53-bit uniforms; u1 nudged away from zero for the log.
    const double scale = 1.0 / 9007199254740992.0;  // 2^-53
    double u1 = static_cast<double>(rng_() >> 11) * scale;
    const double u2 = static_cast<double>(rng_() >> 11) * scale;
    if (u1 <= 0.0) u1 = scale;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  CostModel model_;
  std::mt19937_64 rng_;
};

namespace detail {

enum class EvKind { FinishJob, Cut, RestartJob, SubmitJob, Decision };

inline int ev_rank(EvKind k) {
  switch (k) {
    case EvKind::FinishJob: return 0;
    case EvKind::Cut: return 1;        // checkpoint + terminate
    case EvKind::RestartJob: return 2;
    case EvKind::SubmitJob: return 4;  // grants re-examined inline rank 3
    case EvKind::Decision: return 5;
  }
  return 9;
}

struct Ev {
  Seconds t = 0.0;
  EvKind kind = EvKind::SubmitJob;
  int job = -1;

  bool operator>(const Ev& o) const {
    if (t != o.t) return t > o.t;
    const int a = ev_rank(kind), b = ev_rank(o.kind);
    if (a != b) return a > b;
    return job > o.job;
  }
};

/* A committed (granted + ready) reconfiguration in flight. */
struct InFlight {
  ActionRecord action;
  StepCount ckpt_step = 0;
  Seconds terminate_time = 0.0;
};

struct JobRuntime {
  const AppModel* model = nullptr;
  std::optional<DmrContext> ctx;
  StepCount milestone_step = 0;  // step the job's queued event will reach
  std::optional<InFlight> inflight;
};

}  // namespace detail

class Engine {
 public:
  Engine(const ScenarioConfig& scenario, SimOptions options = {})
      : cfg_(scenario),
        opt_(options),
        sched_(scenario.cluster.total_compute_nodes, scenario.sched_mode),
        costs_(scenario.cost_model, scenario.seed) {
    if (const auto v = validate_scenario(cfg_); !v.empty())
      throw SimulationError("invalid scenario: " + v.front().str());

    std::vector<JobSpec> specs = cfg_.materialized_jobs();
    std::stable_sort(specs.begin(), specs.end(), [](const JobSpec& a, const JobSpec& b) {
      if (a.submit_time != b.submit_time) return a.submit_time < b.submit_time;
      return a.id < b.id;
    });
    jobs_.reserve(specs.size());
    rt_.resize(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
      JobState st;
      st.spec = specs[i];
      jobs_.push_back(std::move(st));
      rt_[i].model = cfg_.find_model(specs[i].app_model_id);
      events_.push({specs[i].submit_time, detail::EvKind::SubmitJob, static_cast<int>(i)});
    }
  }

  SimResult run() {
    bool first_submit = true;
    while (!events_.empty()) {
      const detail::Ev ev = events_.top();
      events_.pop();
      now_ = ev.t;
      switch (ev.kind) {
        case detail::EvKind::SubmitJob: {
          if (first_submit) {
            emit_total();  // zero-allocation baseline for the cost integral
            first_submit = false;
          }
          // Same-instant submits batch into one scheduling pass so the
          // reserve-aware sizing sees the whole burst.
          handle_submit(ev.job);
          while (!events_.empty() && events_.top().t == now_ &&
                 events_.top().kind == detail::EvKind::SubmitJob) {
            handle_submit(events_.top().job);
            events_.pop();
          }
          apply_pass(sched_.release(jobs_, 0));
          break;
        }
        case detail::EvKind::Decision: handle_decision(ev.job); break;
        case detail::EvKind::Cut: handle_cut(ev.job); break;
        case detail::EvKind::RestartJob: handle_restart(ev.job); break;
        case detail::EvKind::FinishJob: handle_finish(ev.job); break;
      }
      if (opt_.check_invariants) check_invariants();
    }

    for (const JobState& j : jobs_)
      if (j.phase != JobPhase::Finished)
        throw SimulationError("simulation stalled: job " + j.spec.id +
                              " never finished (cluster too small or deadlock)");
    return {std::move(trace_), std::move(jobs_)};
  }

 private:
  JobState& job(int i) { return jobs_[static_cast<std::size_t>(i)]; }
  detail::JobRuntime& rt(int i) { return rt_[static_cast<std::size_t>(i)]; }
  const AppModel& model(int i) { return *rt(i).model; }

  /* ---- trace emission ---- */

  TraceEvent& emit(int job_idx, TraceKind kind) {
    TraceEvent e;
    e.time = now_;
    if (job_idx >= 0) e.job = job(job_idx).spec.id;
    e.kind = kind;
    trace_.push_back(e);
    return trace_.back();
  }

  void emit_total() {
    emit(-1, TraceKind::NodesAllocatedTotal).total_nodes = allocated_total_;
  }

  void emit_progress(int i) {
    TraceEvent& e = emit(i, TraceKind::StepProgress);
    e.step = job(i).step;
    e.nodes = job(i).nodes;
  }

  /* ---- event handlers ---- */

  void handle_submit(int i) {
    sched_.submit(jobs_, i);
    emit(i, TraceKind::Submit);
  }

  void handle_decision(int i) {
    JobState& j = job(i);
    advance_to_milestone(i);
    TraceEvent& ce_ev = emit(i, TraceKind::CeSample);
    ce_ev.ce = cumulative_ce(j);
    ce_ev.nodes = j.nodes;

    const CheckOutcome out = dmr_check(*rt(i).ctx, jobs_, i, sched_, cfg_.policy);
    if (out.decided_target) {
      TraceEvent& de = emit(i, TraceKind::ResizeDecided);
      de.nodes_from = j.nodes;
      de.nodes_to = *out.decided_target;
      if (out.request == ResizeOutcome::GrantedImmediately)
        emit(i, TraceKind::ResizeGranted).nodes_to = *out.decided_target;
      else
        emit(i, TraceKind::ResizePendingResources).nodes_to = *out.decided_target;
    }

    if (!out.ready) {
      schedule_milestone(i);
      return;
    }

    // Committed: checkpoint at this step if it is a neighbor-search step,
    // otherwise at the next one.
    const AppModel& m = model(i);
    const StepCount ckpt = (j.step % m.nstlist == 0)
                               ? j.step
                               : next_neighbor_search_step(j.step, m.nstlist);
    if (ckpt >= j.spec.total_steps) {
      // Too close to the end: abandon, return any earmarked nodes, run on.
      const NodeCount returned = sched_.withdraw(i);
      rt(i).ctx->abandon_grant();
      j.pending_resize.reset();
      schedule_milestone(i);
      if (returned > 0) apply_pass(sched_.release(jobs_, returned));
      return;
    }

    const ActionRecord rec = dmr_reconfigure(*rt(i).ctx, j);
    j.phase = JobPhase::CheckpointPending;
    rt(i).inflight = detail::InFlight{rec, ckpt, 0.0};
    rt(i).milestone_step = ckpt;
    const Seconds eta = static_cast<double>(ckpt - j.step) * step_time(m, j.nodes) +
                        m.checkpoint_write_cost;
    events_.push({now_ + eta, detail::EvKind::Cut, i});
  }

  void handle_cut(int i) {
    JobState& j = job(i);
    detail::InFlight& fl = *rt(i).inflight;
    if (j.step < fl.ckpt_step) advance_to_milestone(i);
    write_checkpoint(j, model(i));  // contract check; record is implicit
    emit(i, TraceKind::CheckpointWritten).step = j.step;

    dmr_finalize(*rt(i).ctx, jobs_, i, sched_);  // incarnation ends
    rt(i).ctx.reset();

    const NodeCount from = fl.action.from, to = fl.action.to;
    TraceEvent& te = emit(i, TraceKind::Terminate);
    te.nodes_from = from;
    te.nodes_to = to;

    j.phase = JobPhase::Restarting;
    j.nodes = to;
    allocated_total_ += to - from;
    SchedulePass pass;
    if (to < from) {
      pass = sched_.release(jobs_, from - to);  // shrink surplus back now
    } else {
      const NodeCount joined = sched_.consume_earmark(i);
      if (joined != to - from)
        throw SimulationError("expansion earmark mismatch for job " + j.spec.id);
    }
    emit_total();
    fl.terminate_time = now_;
    events_.push({now_ + costs_.draw(to > from), detail::EvKind::RestartJob, i});
    apply_pass(pass);
  }

  void handle_restart(int i) {
    JobState& j = job(i);
    const detail::InFlight fl = *rt(i).inflight;
    rt(i).inflight.reset();

    j.phase = JobPhase::Running;
    j.talp.reset();
    j.restart_count += 1;
    j.last_reconfig_step = j.step;

    rt(i).ctx = dmr_init({}, fl.action.kind);
    TraceEvent& re = emit(i, TraceKind::Restart);
    re.step = j.step;
    re.nodes = j.nodes;
    re.duration = now_ - fl.terminate_time;
    schedule_milestone(i);
  }

  void handle_finish(int i) {
    JobState& j = job(i);
    advance_to_milestone(i);
    const NodeCount returned = dmr_finalize(*rt(i).ctx, jobs_, i, sched_);
    rt(i).ctx.reset();
    const NodeCount held = j.nodes;
    j.phase = JobPhase::Finished;
    j.nodes = 0;
    allocated_total_ -= held;
    emit(i, TraceKind::Finish);
    emit_total();
    apply_pass(sched_.release(jobs_, held + returned));
  }

  /* ---- helpers ---- */

  void advance_to_milestone(int i) {
    JobState& j = job(i);
    const StepCount steps = rt(i).milestone_step - j.step;
    if (steps < 0) throw SimulationError("milestone behind current step");
    advance(j, model(i), steps);
    emit_progress(i);
  }

  /* Queue the job's next segment-end event: decision point or completion. */
  void schedule_milestone(int i) {
    JobState& j = job(i);
    const StepCount total = j.spec.total_steps;
    const StepCount d = cfg_.policy.decision_interval;
    const StepCount next_decision = (j.step / d + 1) * d;
    const Seconds per_step = step_time(model(i), j.nodes);
    if (next_decision >= total) {
      rt(i).milestone_step = total;
      events_.push({now_ + static_cast<double>(total - j.step) * per_step,
                    detail::EvKind::FinishJob, i});
    } else {
      rt(i).milestone_step = next_decision;
      events_.push({now_ + static_cast<double>(next_decision - j.step) * per_step,
                    detail::EvKind::Decision, i});
    }
  }

  void apply_pass(const SchedulePass& pass) {
    for (const ResizeGrant& g : pass.granted) {
      rt(g.job).ctx->note_grant(g.target);
      emit(g.job, TraceKind::ResizeGranted).nodes_to = g.target;
    }
    for (const StartGrant& s : pass.started) {
      JobState& j = job(s.job);
      j.phase = JobPhase::Running;
      j.nodes = s.nodes;
      allocated_total_ += s.nodes;
      rt(s.job).ctx = dmr_init({});
      emit(s.job, TraceKind::Start).nodes = s.nodes;
      emit_total();
      schedule_milestone(s.job);
    }
  }

  void check_invariants() const {
    sched_.check_conservation(jobs_);
    NodeCount held = 0;
    for (const JobState& j : jobs_) {
      if (j.step < 0 || j.step > j.spec.total_steps)
        throw SimulationError("invariant: step out of range for " + j.spec.id);
      if (j.phase == JobPhase::Running || j.phase == JobPhase::CheckpointPending) {
        if (j.nodes < j.spec.n_min || j.nodes > j.spec.n_max)
          throw SimulationError("invariant: allocation outside node range for " + j.spec.id);
      }
      if (j.phase != JobPhase::Queued && j.phase != JobPhase::Finished) held += j.nodes;
      if (j.pending_resize) {
        if (*j.pending_resize < j.spec.n_min || *j.pending_resize > j.spec.n_max ||
            *j.pending_resize == j.nodes)
          throw SimulationError("invariant: bad pending resize for " + j.spec.id);
      }
    }
    if (held != allocated_total_)
      throw SimulationError("invariant: allocation counter out of sync");
    if (!trace_.empty() && trace_.back().time > now_ + 1e-9)
      throw SimulationError("invariant: trace clock ran backwards");
  }

  ScenarioConfig cfg_;
  SimOptions opt_;
  Scheduler sched_;
  CostSampler costs_;
  std::vector<JobState> jobs_;
  std::vector<detail::JobRuntime> rt_;
  std::priority_queue<detail::Ev, std::vector<detail::Ev>, std::greater<detail::Ev>> events_;
  std::vector<TraceEvent> trace_;
  Seconds now_ = 0.0;
  NodeCount allocated_total_ = 0;
};

inline SimResult run(const ScenarioConfig& scenario, SimOptions options = {}) {
  return Engine(scenario, options).run();
}

}  // namespace dmrsim
