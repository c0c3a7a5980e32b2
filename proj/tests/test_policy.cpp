#include <cmath>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "dmrsim/policy.hpp"

using namespace dmrsim;

namespace {

PolicyConfig plain() {
  PolicyConfig cfg;
  cfg.expansion_gain = 1.0;  // pure proportional rule in both directions
  return cfg;
}

NodeCount target(NodeCount n, double ce, const PolicyConfig& cfg, NodeCount lo = 1,
                 NodeCount hi = 32) {
  return ce_policy_target_ranks(n, ce, cfg, lo, hi);
}

}  // namespace

TEST_CASE("round_half_up rounds halves away from zero toward positive") {
  CHECK(round_half_up(2.5) == 3);
  CHECK(round_half_up(3.5) == 4);
  CHECK(round_half_up(2.4999999) == 2);
  CHECK(round_half_up(9.5) == 10);
  CHECK(round_half_up(10.4999) == 10);
  CHECK(round_half_up(0.0) == 0);
}

TEST_CASE("proportional rule reference points") {
  const PolicyConfig cfg = plain();
  CHECK(target(1, 1.0, cfg) == 1);    // ~5% headroom cannot move a 1-node job
  CHECK(target(2, 0.99, cfg) == 2);   // 2 * 0.99/0.95 = 2.08 -> 2
  CHECK(target(12, 0.79, cfg) == 10); // 12 * 0.79/0.95 = 9.98 -> 10
  CHECK(target(5, 0.95, cfg) == 5);   // exactly on target
  CHECK(target(12, 0.99, cfg, 1, 12) == 12);  // 12.51 -> 13, clamped to n_max
  CHECK(target(12, 0.99, cfg, 1, 20) == 13);  // same point without the clamp
}

TEST_CASE("proportional rule maps the shrink window of a 12-node job to 10") {
  const PolicyConfig cfg = plain();
  for (double ce = 0.7521; ce <= 0.8312; ce += 1e-4)
    CHECK(target(12, ce, cfg, 1, 12) == 10);
  // Exact window edges: 12*ce/0.95 rounds to 10 iff 9.5 <= 12*ce/0.95 < 10.5.
  CHECK(target(12, 9.5 * 0.95 / 12, cfg, 1, 12) == 10);
  CHECK(target(12, 9.5 * 0.95 / 12 - 1e-6, cfg, 1, 12) == 9);
  CHECK(target(12, 10.5 * 0.95 / 12 - 1e-6, cfg, 1, 12) == 10);
  CHECK(target(12, 10.5 * 0.95 / 12, cfg, 1, 12) == 11);
}

TEST_CASE("asymmetric gain makes near-unit efficiency expand small jobs") {
  const PolicyConfig cfg;  // default expansion_gain = 50
  CHECK(target(1, 1.0, cfg, 1, 12) == 4);   // 1 * (1 + 50*(1/0.95 - 1)) = 3.63
  CHECK(target(2, 0.55 / 0.565, cfg, 1, 12) == 4);  // 2 * 2.234 = 4.47
  CHECK(target(4, 0.275 / 0.291, cfg, 1, 12) == 4); // just below target: stays
  // Below target the gain does not apply: identical to the plain rule.
  CHECK(target(12, 0.79, cfg, 1, 12) == target(12, 0.79, plain(), 1, 12));
}

TEST_CASE("expansion gain of one degenerates to the plain rule everywhere") {
  PolicyConfig unit;
  unit.expansion_gain = 1.0;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ce_dist(0.01, 1.0);
  std::uniform_int_distribution<int> n_dist(1, 32);
  for (int i = 0; i < 2000; ++i) {
    const NodeCount n = n_dist(rng);
    const double ce = ce_dist(rng);
    const long long expect = round_half_up(n * ce / unit.ce_target);
    CHECK(target(n, ce, unit) ==
          std::clamp(expect, static_cast<long long>(1), static_cast<long long>(32)));
  }
}

TEST_CASE("target is always within the job's node range") {
  const PolicyConfig cfg;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ce_dist(0.001, 1.0);
  std::uniform_int_distribution<int> n_dist(1, 40);
  for (int i = 0; i < 5000; ++i) {
    const NodeCount lo = n_dist(rng);
    const NodeCount hi = lo + n_dist(rng);
    NodeCount n = std::clamp(n_dist(rng), lo, hi);
    const NodeCount t = target(n, ce_dist(rng), cfg, lo, hi);
    CHECK(t >= lo);
    CHECK(t <= hi);
  }
}

TEST_CASE("a job exactly on target never moves") {
  for (double gain : {1.0, 50.0}) {
    PolicyConfig cfg;
    cfg.expansion_gain = gain;
    for (NodeCount n = 1; n <= 32; ++n) CHECK(target(n, cfg.ce_target, cfg) == n);
  }
}

TEST_CASE("target is monotone in measured efficiency") {
  const PolicyConfig cfg;
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ce_dist(0.001, 1.0);
  std::uniform_int_distribution<int> n_dist(1, 32);
  for (int i = 0; i < 5000; ++i) {
    const NodeCount n = n_dist(rng);
    double a = ce_dist(rng), b = ce_dist(rng);
    if (a > b) std::swap(a, b);
    CHECK(target(n, a, cfg) <= target(n, b, cfg));
  }
}

TEST_CASE("policy rejects invalid inputs") {
  PolicyConfig cfg;
  CHECK_THROWS_AS(ce_policy_target_ranks(0, 0.9, cfg, 1, 4), std::invalid_argument);
  cfg.ce_target = 0.0;
  CHECK_THROWS_AS(ce_policy_target_ranks(4, 0.9, cfg, 1, 4), std::invalid_argument);
  cfg.ce_target = 1.0;
  CHECK_THROWS_AS(ce_policy_target_ranks(4, 0.9, cfg, 1, 4), std::invalid_argument);
}

TEST_CASE("inhibitor blocks decisions until enough steps have passed") {
  PolicyConfig cfg;
  cfg.inhibitor_delay = 500;
  CHECK(inhibitor_allows(std::nullopt, 0, cfg));
  CHECK_FALSE(inhibitor_allows(1000, 1499, cfg));
  CHECK(inhibitor_allows(1000, 1500, cfg));
  CHECK(inhibitor_allows(1000, 2000, cfg));
  cfg.inhibitor_delay = 0;
  CHECK(inhibitor_allows(1000, 1000, cfg));
}

TEST_CASE("decide skips jobs that cannot or should not move") {
  PolicyConfig cfg;
  JobState j;
  j.spec.n_min = 1;
  j.spec.n_max = 12;
  j.spec.total_steps = 5000;
  j.phase = JobPhase::Running;
  j.nodes = 12;
  j.step = 500;

  SECTION("no efficiency sample yet") { CHECK_FALSE(decide(j, cfg).is_resize()); }

  SECTION("outstanding resize request") {
    j.talp.compute_time = 0.79;
    j.talp.comm_time = 0.21;
    j.pending_resize = 10;
    CHECK_FALSE(decide(j, cfg).is_resize());
  }

  SECTION("inhibitor still closed") {
    j.talp.compute_time = 0.79;
    j.talp.comm_time = 0.21;
    j.last_reconfig_step = 100;
    CHECK_FALSE(decide(j, cfg).is_resize());
  }

  SECTION("target equals the current size") {
    j.talp.compute_time = 0.95;
    j.talp.comm_time = 0.05;
    CHECK_FALSE(decide(j, cfg).is_resize());
  }

  SECTION("shrink proposed when efficiency is low") {
    j.talp.compute_time = 0.79;
    j.talp.comm_time = 0.21;
    const Decision d = decide(j, cfg);
    REQUIRE(d.is_resize());
    CHECK(*d.target == 10);
  }

  SECTION("inhibitor open exactly at the threshold") {
    j.talp.compute_time = 0.79;
    j.talp.comm_time = 0.21;
    j.step = 1500;
    j.last_reconfig_step = 1000;
    CHECK(decide(j, cfg).is_resize());
  }
}
