#pragma once

/*
 * Communication-efficiency resize policy. At every decision point the policy
 * compares the job's cumulative CE against a target and proposes a node count
 * that moves CE toward it, linear in the relative deviation:
 *
 *   target_ranks = clamp(round_half_up(n * (1 + g * (ce/ce_target - 1))),
 *                        n_min, n_max)
 *
 * with gain g = 1 below target (plain proportional rule n*ce/ce_target: a job
 * at 79% CE against a 95% target is sized 12 -> 10) and g = expansion_gain
 * above it. CE is bounded by 1, so the headroom above a 95% target is at most
 * ~5%; the asymmetric gain is what makes expansion reachable for small
 * allocations with near-unit CE. expansion_gain = 1 degenerates to the plain
 * proportional rule in both directions.
 *
 * An inhibitor suppresses decisions within `inhibitor_delay` timesteps of the
 * last applied reconfiguration, and a job with an outstanding resize request
 * never issues another.
 */

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dmrsim/domain.hpp"

namespace dmrsim {

struct PolicyConfig {
  double ce_target = 0.95;
  StepCount decision_interval = 500;  // steps between dmr_check calls
  StepCount inhibitor_delay = 500;    // min steps between applied resizes
  double expansion_gain = 50.0;       // deviation gain above target

  bool operator==(const PolicyConfig&) const = default;
};

inline long long round_half_up(double x) {
  return static_cast<long long>(std::floor(x + 0.5));
}

inline NodeCount ce_policy_target_ranks(NodeCount n_cur, double ce,
                                        const PolicyConfig& cfg,
                                        NodeCount n_min, NodeCount n_max) {
  if (n_cur < 1) throw std::invalid_argument("ce_policy_target_ranks: bad node count");
  if (cfg.ce_target <= 0.0 || cfg.ce_target >= 1.0)
    throw std::invalid_argument("ce_policy_target_ranks: ce_target must be in (0,1)");
  const double ratio = ce / cfg.ce_target;
  const double gain = ratio > 1.0 ? cfg.expansion_gain : 1.0;
  const double scaled = static_cast<double>(n_cur) * (1.0 + gain * (ratio - 1.0));
  const long long rounded = round_half_up(scaled);
  const long long lo = n_min, hi = n_max;
  return static_cast<NodeCount>(std::clamp(rounded, lo, hi));
}

/* True when enough timesteps have passed since the last applied resize (or
 * none has been applied yet). */
inline bool inhibitor_allows(std::optional<StepCount> last_reconfig_step,
                             StepCount current_step, const PolicyConfig& cfg) {
  if (!last_reconfig_step) return true;
  return current_step - *last_reconfig_step >= cfg.inhibitor_delay;
}

/* A resize proposal; empty target means no change. */
struct Decision {
  std::optional<NodeCount> target;

  bool is_resize() const { return target.has_value(); }
};

/* Policy entry point, run at decision points only. NoChange when there is no
 * CE sample yet, a resize is already outstanding, the inhibitor is closed, or
 * the computed target equals the current allocation. */
inline Decision decide(const JobState& job, const PolicyConfig& cfg) {
  if (job.pending_resize) return {};
  const auto ce = job.talp.ce();
  if (!ce) return {};
  if (!inhibitor_allows(job.last_reconfig_step, job.step, cfg)) return {};
  const NodeCount target =
      ce_policy_target_ranks(job.nodes, *ce, cfg, job.spec.n_min, job.spec.n_max);
  if (target == job.nodes) return {};
  return {target};
}

}  // namespace dmrsim
