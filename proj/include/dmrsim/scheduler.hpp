#pragma once

/*
 * Slurm-like resource manager for one homogeneous cluster partition. FIFO
 * admission without backfill: try_start walks the queue in order and stops at
 * the first job that does not fit. Two start-sizing modes:
 *
 *   Greedy:     allocate min(n_max, free).
 *   ReserveMin: allocate min(n_max, free - n_min of the next queued job),
 *               never below the job's own n_min. Holding back one minimum
 *               lets the next waiting job start too; with 31 free nodes and
 *               a queue of [1,12]-range jobs this sizes them 12, 12, 6, 1.
 *
 * Resize requests from running jobs: shrinks are granted immediately (the
 * surplus comes back when the job terminates for reconfiguration); expansions
 * are granted immediately when enough nodes are free (they are earmarked for
 * the job until applied) and otherwise queue in a strict-FIFO pending list
 * with head-of-line blocking. Released nodes go to pending expansions first,
 * then to queued job starts.
 *
 * The scheduler mutates only free/queue/pending/earmark bookkeeping; callers
 * apply the returned start/grant lists to job state and emit trace events.
 */

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dmrsim/domain.hpp"

namespace dmrsim {

enum class SchedMode { Greedy, ReserveMin };

enum class ResizeOutcome { GrantedImmediately, Pending };

struct StartGrant {
  int job = -1;  // index into the caller's job table
  NodeCount nodes = 0;
};

struct ResizeGrant {
  int job = -1;
  NodeCount target = 0;
};

/* Starts and expansion grants produced by one release or submit pass, in the
 * order they must be applied (grants strictly before starts). */
struct SchedulePass {
  std::vector<ResizeGrant> granted;
  std::vector<StartGrant> started;

  bool empty() const { return granted.empty() && started.empty(); }
};

class Scheduler {
 public:
  Scheduler(NodeCount total_nodes, SchedMode mode)
      : total_(total_nodes), free_(total_nodes), mode_(mode) {
    if (total_nodes < 1) throw std::invalid_argument("Scheduler: empty cluster");
  }

  NodeCount total_nodes() const { return total_; }
  NodeCount free_nodes() const { return free_; }
  SchedMode mode() const { return mode_; }
  const std::deque<int>& queue() const { return queue_; }
  const std::deque<ResizeGrant>& pending_resizes() const { return pending_; }

  NodeCount earmarked_for(int job) const {
    auto it = earmarks_.find(job);
    return it == earmarks_.end() ? 0 : it->second;
  }

  /* Append a queued job. Jobs must be submitted in (submit_time, id) order;
   * the queue preserves that order. */
  void submit(const std::vector<JobState>& jobs, int job) {
    const JobState& j = at(jobs, job);
    if (j.phase != JobPhase::Queued)
      throw std::logic_error("submit: job is not queued");
    if (std::find(queue_.begin(), queue_.end(), job) != queue_.end())
      throw std::logic_error("submit: job already in queue");
    queue_.push_back(job);
  }

  /* Start queued jobs FIFO while they fit. Does not mutate job state; the
   * caller applies the returned allocations. */
  std::vector<StartGrant> try_start(const std::vector<JobState>& jobs) {
    std::vector<StartGrant> started;
    while (!queue_.empty()) {
      const JobState& head = at(jobs, queue_.front());
      if (free_ < head.spec.n_min) break;  // FIFO: never start past a blocked job
      NodeCount alloc = 0;
      if (mode_ == SchedMode::Greedy) {
        alloc = std::min(head.spec.n_max, free_);
      } else {
        NodeCount reserve = 0;
        if (queue_.size() > 1) reserve = at(jobs, queue_[1]).spec.n_min;
        alloc = std::min(head.spec.n_max, free_ - reserve);
        alloc = std::max(alloc, head.spec.n_min);
      }
      started.push_back({queue_.front(), alloc});
      free_ -= alloc;
      queue_.pop_front();
    }
    return started;
  }

  /* Resize request from a running job. Shrinks always succeed; expansions
   * need target - current free nodes now or they join the pending queue. */
  ResizeOutcome request_resize(const std::vector<JobState>& jobs, int job,
                               NodeCount target) {
    const JobState& j = at(jobs, job);
    if (j.phase != JobPhase::Running)
      throw std::logic_error("request_resize: job is not running");
    if (target < j.spec.n_min || target > j.spec.n_max)
      throw std::invalid_argument("request_resize: target outside the job's node range");
    if (target == j.nodes)
      throw std::invalid_argument("request_resize: target equals current allocation");
    if (target < j.nodes) return ResizeOutcome::GrantedImmediately;
    const NodeCount need = target - j.nodes;
    if (free_ >= need) {
      free_ -= need;
      earmarks_[job] += need;
      return ResizeOutcome::GrantedImmediately;
    }
    pending_.push_back({job, target});
    return ResizeOutcome::Pending;
  }

  /* Return nodes to the free pool, then hand them out again: pending
   * expansions first (strict FIFO, stop at the first that does not fit),
   * queued starts second. release(0) still runs the redistribution pass so
   * callers can use it after queue changes. */
  SchedulePass release(const std::vector<JobState>& jobs, NodeCount nodes) {
    if (nodes < 0) throw std::invalid_argument("release: negative node count");
    free_ += nodes;
    if (free_ > total_) throw std::logic_error("release: more nodes freed than exist");
    SchedulePass pass;
    while (!pending_.empty()) {
      const ResizeGrant head = pending_.front();
      const NodeCount need = head.target - at(jobs, head.job).nodes;
      if (need > free_) break;  // head-of-line blocking
      free_ -= need;
      earmarks_[head.job] += need;
      pass.granted.push_back(head);
      pending_.pop_front();
    }
    pass.started = try_start(jobs);
    return pass;
  }

  /* Move a job's earmarked nodes into its allocation at reconfiguration time.
   * Returns how many joined. */
  NodeCount consume_earmark(int job) {
    auto it = earmarks_.find(job);
    if (it == earmarks_.end()) return 0;
    const NodeCount n = it->second;
    earmarks_.erase(it);
    return n;
  }

  /* Drop a job's pending request and return any earmarked nodes. The caller
   * folds the returned count into its next release(). */
  NodeCount withdraw(int job) {
    std::erase_if(pending_, [job](const ResizeGrant& g) { return g.job == job; });
    return consume_earmark(job);
  }

  /* Internal-consistency check: running allocations + earmarks + free must
   * equal the cluster size, and no queued/finished job may hold nodes. */
  void check_conservation(const std::vector<JobState>& jobs) const {
    NodeCount held = 0;
    for (const JobState& j : jobs) {
      switch (j.phase) {
        case JobPhase::Running:
        case JobPhase::CheckpointPending:
        case JobPhase::Restarting:
          held += j.nodes;
          break;
        case JobPhase::Queued:
        case JobPhase::Finished:
          if (j.nodes != 0)
            throw std::logic_error("conservation: idle job holds nodes: " + j.spec.id);
          break;
      }
    }
    NodeCount earmarked = 0;
    for (const auto& [job, n] : earmarks_) earmarked += n;
    if (held + earmarked + free_ != total_)
      throw std::logic_error("conservation: allocated + earmarked + free != total");
  }

 private:
  static const JobState& at(const std::vector<JobState>& jobs, int idx) {
    if (idx < 0 || idx >= static_cast<int>(jobs.size()))
      throw std::invalid_argument("scheduler: unknown job index");
    return jobs[static_cast<std::size_t>(idx)];
  }

  NodeCount total_;
  NodeCount free_;
  SchedMode mode_;
  std::deque<int> queue_;           // submitted, not yet started
  std::deque<ResizeGrant> pending_; // expansions waiting for nodes
  std::map<int, NodeCount> earmarks_;
};

}  // namespace dmrsim
