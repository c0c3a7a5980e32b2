#pragma once

/*
 * Malleability middleware layer between the application loop and the
 * scheduler. One DmrContext lives per process incarnation of a job:
 *
 *   dmr_init -> (dmr_check | dmr_reconfigure)* -> dmr_finalize
 *
 * dmr_check runs at synchronization points (every decision_interval steps).
 * It applies the CE policy, forwards resize proposals to the scheduler, and
 * reports ready_reconfig once a granted resize can be applied: immediately
 * when the grant happens at this very synchronization point, otherwise at the
 * first one after the grant arrives. dmr_reconfigure commits the resize and
 * records the action; the engine then drives checkpoint -> terminate ->
 * restart, and the restarted incarnation is dmr_init'ed with the action that
 * caused it (carried through the checkpoint record). dmr_finalize withdraws
 * any still-outstanding request from the scheduler.
 */

#include <stdexcept>
#include <string>
#include <vector>

#include "dmrsim/domain.hpp"
#include "dmrsim/policy.hpp"
#include "dmrsim/scheduler.hpp"

namespace dmrsim {

enum class ReconfigAction { None, Expanded, Shrunk };

struct ActionRecord {
  ReconfigAction kind = ReconfigAction::None;
  NodeCount from = 0;
  NodeCount to = 0;
};

struct ProtocolError : std::logic_error {
  using std::logic_error::logic_error;
};

/* Restart-capable launch command lines carry "-cpi <file>" (resume from the
 * checkpoint) and "-append" (continue output files in place). Missing flags
 * are appended at the end, -cpi before -append; present ones are untouched,
 * so the rewrite is idempotent. */
inline std::vector<std::string> normalize_launch_args(std::vector<std::string> args) {
  bool has_cpi = false;
  bool has_append = false;
  for (const std::string& a : args) {
    if (a == "-cpi") has_cpi = true;
    if (a == "-append") has_append = true;
  }
  if (!has_cpi) {
    args.push_back("-cpi");
    args.push_back("state.cpt");
  }
  if (!has_append) args.push_back("-append");
  return args;
}

class DmrContext {
 public:
  bool initialized() const { return initialized_ && !finalized_; }
  bool ready_reconfig() const { return ready_reconfig_; }
  std::optional<NodeCount> granted_target() const { return granted_target_; }
  const std::vector<std::string>& launch_args() const { return args_; }

  /* Record an asynchronously arriving grant (scheduler release path). The
   * reconfiguration itself waits for the next synchronization point. */
  void note_grant(NodeCount target) {
    require_live("note_grant");
    granted_target_ = target;
  }

  /* Drop a granted-but-unapplied resize (job will finish first). */
  void abandon_grant() {
    require_live("abandon_grant");
    granted_target_.reset();
    ready_reconfig_ = false;
  }

  void require_live(const char* op) const {
    if (!initialized_) throw ProtocolError(std::string(op) + ": context not initialized");
    if (finalized_) throw ProtocolError(std::string(op) + ": context already finalized");
  }

  ReconfigAction last_action_ = ReconfigAction::None;
  bool initialized_ = false;
  bool finalized_ = false;
  bool ready_reconfig_ = false;
  std::optional<NodeCount> granted_target_;
  std::vector<std::string> args_;
};

/* restored covers restarted incarnations: the action that caused the restart
 * travels with the checkpoint and seeds last_action. */
inline DmrContext dmr_init(std::vector<std::string> launch_args,
                           ReconfigAction restored = ReconfigAction::None) {
  DmrContext ctx;
  ctx.args_ = normalize_launch_args(std::move(launch_args));
  ctx.last_action_ = restored;
  ctx.initialized_ = true;
  return ctx;
}

struct CheckOutcome {
  std::optional<NodeCount> decided_target;  // policy proposed a resize
  std::optional<ResizeOutcome> request;     // outcome of the submitted request
  bool ready = false;                       // reconfiguration can be applied now
};

/* Synchronization-point hook. Pre: the job completed exactly `job.step` steps
 * and that step is a decision point. */
inline CheckOutcome dmr_check(DmrContext& ctx, std::vector<JobState>& jobs, int job_idx,
                              Scheduler& sched, const PolicyConfig& cfg) {
  ctx.require_live("dmr_check");
  JobState& job = jobs.at(static_cast<std::size_t>(job_idx));
  if (cfg.decision_interval < 1 || job.step % cfg.decision_interval != 0 || job.step == 0)
    throw ProtocolError("dmr_check: not at a decision point");
  CheckOutcome out;
  if (ctx.granted_target_) {
    // Grant arrived since the last check; this is the awaited sync point.
    ctx.ready_reconfig_ = true;
    out.ready = true;
    return out;
  }
  const Decision d = decide(job, cfg);
  if (d.is_resize()) {
    out.decided_target = d.target;
    const ResizeOutcome r = sched.request_resize(jobs, job_idx, *d.target);
    out.request = r;
    job.pending_resize = d.target;
    if (r == ResizeOutcome::GrantedImmediately) {
      ctx.granted_target_ = d.target;
      ctx.ready_reconfig_ = true;  // granted at a sync point: apply right here
      out.ready = true;
    }
  }
  return out;
}

/* Commit the granted resize. The engine performs the actual checkpoint /
 * terminate / restart lifecycle; this records the action and clears the
 * outstanding-request state. */
inline ActionRecord dmr_reconfigure(DmrContext& ctx, JobState& job) {
  ctx.require_live("dmr_reconfigure");
  if (!ctx.ready_reconfig_ || !ctx.granted_target_)
    throw ProtocolError("dmr_reconfigure: no granted resize is ready");
  ActionRecord rec;
  rec.from = job.nodes;
  rec.to = *ctx.granted_target_;
  rec.kind = rec.to > rec.from ? ReconfigAction::Expanded : ReconfigAction::Shrunk;
  ctx.last_action_ = rec.kind;
  ctx.ready_reconfig_ = false;
  ctx.granted_target_.reset();
  job.pending_resize.reset();
  return rec;
}

inline ReconfigAction dmr_get_last_action(const DmrContext& ctx) {
  ctx.require_live("dmr_get_last_action");
  return ctx.last_action_;
}

/* Tear the context down (job finished or is terminating for reconfiguration).
 * Withdraws any still-outstanding request; nodes earmarked for it are
 * returned via the scheduler's release path by the caller. */
inline NodeCount dmr_finalize(DmrContext& ctx, std::vector<JobState>& jobs, int job_idx,
                              Scheduler& sched) {
  ctx.require_live("dmr_finalize");
  JobState& job = jobs.at(static_cast<std::size_t>(job_idx));
  NodeCount returned = 0;
  if (job.pending_resize || ctx.granted_target_) {
    returned = sched.withdraw(job_idx);
    job.pending_resize.reset();
    ctx.granted_target_.reset();
    ctx.ready_reconfig_ = false;
  }
  ctx.finalized_ = true;
  return returned;
}

}  // namespace dmrsim
