#pragma once

/*
 * Core domain types for the malleable-job cluster simulator: job descriptions
 * and runtime state, the TALP-style efficiency accumulator, the synthetic
 * application performance model, reconfiguration cost parameters, and the
 * trace event record everything downstream (metrics, CLI) is computed from.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dmrsim {

using JobId = std::string;
using StepCount = std::int64_t;
using NodeCount = int;
using Seconds = double;

/* Lifecycle of one job, from queued to finished. CheckpointPending covers the
 * stretch between a committed reconfiguration and the checkpoint cut;
 * Restarting covers the teardown/respawn delay between Terminate and Restart. */
enum class JobPhase { Queued, Running, CheckpointPending, Restarting, Finished };

struct JobSpec {
  JobId id;
  NodeCount n_min = 1;
  NodeCount n_max = 1;
  StepCount total_steps = 0;
  Seconds submit_time = 0.0;
  std::string app_model_id;

  bool operator==(const JobSpec&) const = default;
};

/* Accumulated compute/communication seconds since job start or the last
 * restart. Communication efficiency is compute / (compute + comm); with no
 * accumulated time there is no sample. */
struct TalpAccumulator {
  Seconds compute_time = 0.0;
  Seconds comm_time = 0.0;

  std::optional<double> ce() const {
    const Seconds total = compute_time + comm_time;
    if (total <= 0.0) return std::nullopt;
    return compute_time / total;
  }

  void reset() { compute_time = 0.0; comm_time = 0.0; }
};

enum class CommShape { Linear, Logarithmic };

/* Synthetic MD-like application: per-step wall time at n nodes splits into a
 * perfectly-divisible compute part W/n and a communication part that is zero
 * on one node and grows with n. Checkpoints are only legal at neighbor-search
 * steps (multiples of nstlist). */
struct AppModel {
  std::string id;
  double work_per_step = 1.0;       // W: node-seconds of compute per step
  double comm_base = 0.0;           // c0
  double comm_per_node = 0.0;       // c1
  CommShape comm_shape = CommShape::Linear;
  StepCount nstlist = 100;          // neighbor-search cadence in steps
  Seconds checkpoint_write_cost = 0.0;

  bool operator==(const AppModel&) const = default;
};

enum class CostMode { Deterministic, Stochastic };

/* One reconfiguration-cost distribution. Deterministic mode uses mean as the
 * fixed duration; stochastic mode draws a normal clipped to [min, max]. */
struct CostParams {
  Seconds mean = 0.0;
  Seconds stddev = 0.0;
  Seconds min = 0.0;
  Seconds max = 0.0;

  bool operator==(const CostParams&) const = default;
};

struct CostModel {
  CostMode mode = CostMode::Deterministic;
  CostParams expand{25.55, 9.99, 15.40, 42.44};
  CostParams shrink{9.43, 1.63, 7.83, 12.34};

  bool operator==(const CostModel&) const = default;
};

/* Mutable per-job runtime state owned by the engine. `step` only moves
 * forward: restarts resume exactly at the checkpointed step. */
struct JobState {
  JobSpec spec;
  JobPhase phase = JobPhase::Queued;
  NodeCount nodes = 0;
  StepCount step = 0;
  std::optional<StepCount> last_reconfig_step;  // step of the last applied resize
  std::optional<NodeCount> pending_resize;      // outstanding resize target, if any
  TalpAccumulator talp;
  int restart_count = 0;
};

enum class TraceKind {
  Submit,
  Start,
  StepProgress,
  CeSample,
  ResizeDecided,
  ResizePendingResources,
  ResizeGranted,
  CheckpointWritten,
  Terminate,
  Restart,
  Finish,
  NodesAllocatedTotal,
};

/* One line of the run trace. Only the fields meaningful for `kind` are set:
 *   Submit               —
 *   Start                nodes
 *   StepProgress         step, nodes
 *   CeSample             ce, nodes
 *   ResizeDecided        nodes_from, nodes_to
 *   ResizePendingResources  nodes_to
 *   ResizeGranted        nodes_to
 *   CheckpointWritten    step
 *   Terminate            nodes_from, nodes_to
 *   Restart              step, nodes, duration (Terminate->Restart seconds)
 *   Finish               —
 *   NodesAllocatedTotal  total_nodes (no job id)
 * Times are the simulation clock at emission and are non-decreasing. */
struct TraceEvent {
  Seconds time = 0.0;
  JobId job;
  TraceKind kind = TraceKind::Submit;
  std::optional<NodeCount> nodes;
  std::optional<NodeCount> nodes_from;
  std::optional<NodeCount> nodes_to;
  std::optional<NodeCount> total_nodes;
  std::optional<StepCount> step;
  std::optional<double> ce;
  std::optional<Seconds> duration;

  bool operator==(const TraceEvent&) const = default;
};

/* A single validation finding. Violations are data, not exceptions: scenario
 * validation returns the full list so a CLI user sees every problem at once. */
struct Violation {
  std::string subject;  // e.g. "job[j03]" or "policy"
  std::string field;
  std::string message;

  std::string str() const { return subject + "." + field + ": " + message; }
};

}  // namespace dmrsim
