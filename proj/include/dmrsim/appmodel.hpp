#pragma once

/*
 * Synthetic application performance model. Per-step wall time at n nodes is
 *   step_time(n) = work_per_step / n + comm_part(n)
 * with comm_part(1) = 0 and, for n >= 2,
 *   Linear:       c0 + c1 * (n - 1)
 *   Logarithmic:  c0 + c1 * log2(n)
 * Instantaneous communication efficiency is the compute share of a step.
 * Progress accounting feeds the TALP accumulator that the resize policy reads.
 */

#include <cmath>
#include <stdexcept>
#include <utility>

#include "dmrsim/domain.hpp"

namespace dmrsim {

inline double compute_part(const AppModel& m, NodeCount n) {
  if (n < 1) throw std::invalid_argument("compute_part: node count must be >= 1");
  return m.work_per_step / static_cast<double>(n);
}

inline double comm_part(const AppModel& m, NodeCount n) {
  if (n < 1) throw std::invalid_argument("comm_part: node count must be >= 1");
  if (n == 1) return 0.0;  // single-node runs do not communicate
  switch (m.comm_shape) {
    case CommShape::Linear:
      return m.comm_base + m.comm_per_node * static_cast<double>(n - 1);
    case CommShape::Logarithmic:
      return m.comm_base + m.comm_per_node * std::log2(static_cast<double>(n));
  }
  throw std::logic_error("comm_part: unknown comm shape");
}

inline Seconds step_time(const AppModel& m, NodeCount n) {
  return compute_part(m, n) + comm_part(m, n);
}

inline double instantaneous_ce(const AppModel& m, NodeCount n) {
  return compute_part(m, n) / step_time(m, n);
}

/* Advance a running job by `steps` at its current node count, accumulating
 * compute/comm seconds. Returns the wall time the segment took. */
inline Seconds advance(JobState& job, const AppModel& m, StepCount steps) {
  if (job.phase != JobPhase::Running && job.phase != JobPhase::CheckpointPending)
    throw std::logic_error("advance: job is not running");
  if (steps < 0) throw std::invalid_argument("advance: negative step count");
  if (job.step + steps > job.spec.total_steps)
    throw std::invalid_argument("advance: past the end of the job");
  const double k = static_cast<double>(steps);
  job.talp.compute_time += k * compute_part(m, job.nodes);
  job.talp.comm_time += k * comm_part(m, job.nodes);
  job.step += steps;
  return k * step_time(m, job.nodes);
}

/* Cumulative CE since job start or the last restart; no value before any
 * progress has been accumulated. */
inline std::optional<double> cumulative_ce(const JobState& job) {
  return job.talp.ce();
}

/* Smallest neighbor-search step strictly after `current`. */
inline StepCount next_neighbor_search_step(StepCount current, StepCount nstlist) {
  if (nstlist < 1) throw std::invalid_argument("next_neighbor_search_step: nstlist must be >= 1");
  if (current < 0) throw std::invalid_argument("next_neighbor_search_step: negative step");
  return (current / nstlist + 1) * nstlist;
}

/* Checkpoint contents that survive a terminate/restart cycle. */
struct CheckpointRecord {
  StepCount step = 0;
};

/* Record the job's position for restart. Legal only at a neighbor-search step
 * (or before any progress); returns the record plus the write cost. */
inline std::pair<CheckpointRecord, Seconds> write_checkpoint(const JobState& job,
                                                             const AppModel& m) {
  if (job.step != 0 && job.step % m.nstlist != 0)
    throw std::logic_error("write_checkpoint: not at a neighbor-search step");
  return {CheckpointRecord{job.step}, m.checkpoint_write_cost};
}

}  // namespace dmrsim
