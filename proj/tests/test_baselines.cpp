#include <doctest.h>

#include <cmath>
#include <functional>

#include "gtplan/baselines.hpp"
#include "gtplan/errors.hpp"
#include "test_util.hpp"

using namespace gtplan;

namespace {

/// Independent bilevel reimplementation (recursive, no odometer) used to
/// cross-check the exhaustive solver.
struct RecursiveOracle {
  const Scenario& sc;
  const RewardModel& rm;

  void sequences(std::vector<std::vector<double>>& out) const {
    std::vector<double> cur;
    const std::function<void()> rec = [&]() {
      if (cur.size() == static_cast<std::size_t>(sc.horizon)) {
        out.push_back(cur);
        return;
      }
      for (double a : sc.actions.accelerations) {
        cur.push_back(a);
        rec();
        cur.pop_back();
      }
    };
    rec();
  }

  SolverOutcome solve() const {
    std::vector<std::vector<double>> seqs;
    sequences(seqs);
    SolverOutcome best;
    bool have = false;
    for (const auto& ue : seqs) {
      double br_ro = -1.0, br_re = 0.0;
      std::vector<double> br;
      for (const auto& uo : seqs) {
        double re, ro;
        joint_rewards(sc.init, ue, uo, sc, rm, re, ro);
        if (ro > br_ro) {
          br_ro = ro;
          br_re = re;
          br = uo;
        }
      }
      if (!have || br_re > best.reward_ego) {
        have = true;
        best.reward_ego = br_re;
        best.reward_opp = br_ro;
        best.ego_actions = ue;
        best.opp_actions = br;
      }
    }
    return best;
  }
};

}  // namespace

TEST_CASE("exhaustive solver matches a hand-computed 2x2 table") {
  // One step, two actions, engineered so that only the joint cruise (0, 0)
  // collides. Per-agent egoism values from the formula:
  //   E(0)  = 1 + 1 - exp(-0.1 * 25)          (v1 = 5)
  //   E(-1) = exp(-0.1) + 1 - exp(-0.1*20.25) (v1 = 4.5)
  Scenario sc;
  sc.dt = 0.5;
  sc.horizon = 1;
  sc.jerk_comfort = 2.0;
  sc.actions.accelerations = {-1.0, 0.0};
  sc.ego_path = {60.0, 10.0, 4.45, 6.0};
  sc.opp_path = {60.0, 10.0, 4.45, 6.0};
  sc.vehicle = {2.0, 2.0};
  sc.init.ego = {0.0, 5.0};
  sc.init.opp = {0.0, 5.0};
  RewardModel rm;
  rm.ego.gamma = 0.7;
  rm.opp.gamma = 0.9;

  const double e0 = 2.0 - std::exp(-2.5);
  const double em1 = std::exp(-0.1) + 1.0 - std::exp(-0.1 * 4.5 * 4.5);
  // Follower best responses per table column: against ego 0 the cruise cell
  // is the collision, so the opponent brakes; against ego -1 it cruises.
  // Leader: 0.7*E(0) + 0.3*E(-1) beats 0.7*E(-1) + 0.3*E(0) since E(0) > E(-1).
  const double expect_ego = 0.7 * e0 + 0.3 * em1;
  const double expect_opp = 0.9 * em1 + 0.1 * e0;

  const SolverOutcome got = exhaustive_stackelberg(sc.init, sc, rm);
  CHECK(got.ego_actions == std::vector<double>{0.0});
  CHECK(got.opp_actions == std::vector<double>{-1.0});
  CHECK(got.reward_ego == doctest::Approx(expect_ego).epsilon(1e-12));
  CHECK(got.reward_opp == doctest::Approx(expect_opp).epsilon(1e-12));
  CHECK(got.evals == 4);

  // Rewards stay consistent with a reward-module recomputation.
  double re, ro;
  joint_rewards(sc.init, got.ego_actions, got.opp_actions, sc, rm, re, ro);
  CHECK(re == got.reward_ego);
  CHECK(ro == got.reward_opp);
}

TEST_CASE("fully courteous leader maximizes the opponent's egoism") {
  const Scenario sc = test::small_scenario();
  RewardModel rm;
  rm.ego.gamma = 0.0;
  rm.opp.gamma = 0.9;
  const SolverOutcome got = exhaustive_stackelberg(sc.init, sc, rm);

  RecursiveOracle oracle{sc, rm};
  std::vector<std::vector<double>> seqs;
  oracle.sequences(seqs);
  double best_induced = -1.0;
  for (const auto& ue : seqs) {
    double br_ro = -1.0, induced = 0.0;
    for (const auto& uo : seqs) {
      double re, ro;
      joint_rewards(sc.init, ue, uo, sc, rm, re, ro);
      if (ro > br_ro) {
        br_ro = ro;
        const auto traj = rollout_joint(sc.init, ue, uo, sc);
        induced = is_unsafe(traj, sc)
                      ? 0.0
                      : egoism_reward(sc.init, uo, ue, rm.ego, AgentId::kOpp, sc);
      }
    }
    best_induced = std::max(best_induced, induced);
  }
  double re, ro;
  joint_rewards(sc.init, got.ego_actions, got.opp_actions, sc, rm, re, ro);
  const auto traj = rollout_joint(sc.init, got.ego_actions, got.opp_actions, sc);
  const double got_induced =
      is_unsafe(traj, sc) ? 0.0
                          : egoism_reward(sc.init, got.opp_actions, got.ego_actions,
                                          rm.ego, AgentId::kOpp, sc);
  CHECK(got_induced == doctest::Approx(best_induced).epsilon(1e-12));
}

TEST_CASE("oracle dominance and cross-check on random instances") {
  SyntheticKnobs knobs;
  knobs.horizon = 2;
  knobs.actions = {-2.0, 0.0, 2.0};
  int checked = 0;
  for (std::uint64_t seed = 1; checked < 50; ++seed) {
    const SyntheticScenario syn = make_synthetic_scenario(seed, knobs);
    Rng rng(seed);
    const RewardModel rm = test::default_rewards(0.2 + 0.7 * rng.uniform_real(),
                                                 0.2 + 0.7 * rng.uniform_real());
    const SolverOutcome got = exhaustive_stackelberg(syn.scenario.init,
                                                     syn.scenario, rm);
    const RecursiveOracle oracle{syn.scenario, rm};
    const SolverOutcome want = oracle.solve();
    CHECK(got.reward_ego == doctest::Approx(want.reward_ego).epsilon(1e-12));
    CHECK(got.ego_actions == want.ego_actions);
    CHECK(got.opp_actions == want.opp_actions);

    // Leader dominance: no ego sequence paired with its best response does
    // better than the oracle's choice.
    std::vector<std::vector<double>> seqs;
    oracle.sequences(seqs);
    for (const auto& ue : seqs) {
      double br_ro = -1.0, br_re = 0.0;
      for (const auto& uo : seqs) {
        double re, ro;
        joint_rewards(syn.scenario.init, ue, uo, syn.scenario, rm, re, ro);
        if (ro > br_ro) {
          br_ro = ro;
          br_re = re;
        }
      }
      CHECK(got.reward_ego >= br_re - 1e-12);
    }
    ++checked;
  }
}

TEST_CASE("alternating best response") {
  const Scenario sc = test::small_scenario();
  const RewardModel rm = test::default_rewards();

  SUBCASE("zero rounds returns the raw initialization") {
    AbrConfig cfg;
    cfg.max_rounds = 0;
    cfg.seed = 9;
    const SolverOutcome a = alternating_best_response(sc.init, sc, rm, cfg);
    const SolverOutcome b = alternating_best_response(sc.init, sc, rm, cfg);
    CHECK_FALSE(a.converged);
    CHECK(a.evals == 0);
    CHECK(a.ego_actions.size() == static_cast<std::size_t>(sc.horizon));
    CHECK(a.ego_actions == b.ego_actions);
    CHECK(a.opp_actions == b.opp_actions);
  }

  SUBCASE("a tight round cap reports non-convergence") {
    AbrConfig cfg;
    cfg.max_rounds = 1;
    bool saw_unconverged = false;
    for (std::uint64_t seed = 1; seed <= 10 && !saw_unconverged; ++seed) {
      cfg.seed = seed;
      const SolverOutcome got = alternating_best_response(sc.init, sc, rm, cfg);
      saw_unconverged = !got.converged;
    }
    CHECK(saw_unconverged);
  }

  SUBCASE("converged outcomes are mutual best responses") {
    RecursiveOracle helper{sc, rm};
    std::vector<std::vector<double>> seqs;
    helper.sequences(seqs);
    int verified = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
      AbrConfig cfg;
      cfg.seed = seed;
      const SolverOutcome got = alternating_best_response(sc.init, sc, rm, cfg);
      if (!got.converged) continue;
      ++verified;
      double re0, ro0;
      joint_rewards(sc.init, got.ego_actions, got.opp_actions, sc, rm, re0, ro0);
      CHECK(re0 == got.reward_ego);
      for (const auto& alt : seqs) {
        double re, ro;
        joint_rewards(sc.init, alt, got.opp_actions, sc, rm, re, ro);
        CHECK(re <= re0 + 1e-12);  // ego cannot improve unilaterally
        joint_rewards(sc.init, got.ego_actions, alt, sc, rm, re, ro);
        CHECK(ro <= ro0 + 1e-12);  // nor can the opponent
      }
    }
    CHECK(verified >= 150);
  }

  SUBCASE("a decoupled dominant optimum attracts every start") {
    Scenario dec = test::small_scenario();
    dec.ego_path.s_in = 55.0;
    dec.ego_path.s_out = 59.0;
    dec.opp_path.s_in = 55.0;
    dec.opp_path.s_out = 59.0;
    const SolverOutcome oracle = exhaustive_stackelberg(dec.init, dec, rm);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      AbrConfig cfg;
      cfg.seed = seed;
      const SolverOutcome got = alternating_best_response(dec.init, dec, rm, cfg);
      CHECK(got.converged);
      CHECK(got.ego_actions == oracle.ego_actions);
      CHECK(got.opp_actions == oracle.opp_actions);
    }
  }
}

TEST_CASE("solver agreement on decoupled scenarios") {
  Scenario dec = test::small_scenario();
  dec.ego_path.s_in = 55.0;
  dec.ego_path.s_out = 59.0;
  dec.opp_path.s_in = 55.0;
  dec.opp_path.s_out = 59.0;
  const RewardModel rm = test::default_rewards();

  const SolverOutcome oracle = exhaustive_stackelberg(dec.init, dec, rm);
  AbrConfig acfg;
  acfg.seed = 4;
  const SolverOutcome abr = alternating_best_response(dec.init, dec, rm, acfg);
  SearchConfig scfg;
  scfg.max_iterations = 30000;
  scfg.exploration_c = 15.0;
  scfg.seed = 4;
  scfg.stats_stride = 0;
  const SolverOutcome mcts = general_mcts(dec.init, dec, rm, scfg);

  CHECK(oracle.ego_actions == abr.ego_actions);
  CHECK(oracle.opp_actions == abr.opp_actions);
  CHECK(oracle.ego_actions == mcts.ego_actions);
  CHECK(oracle.opp_actions == mcts.opp_actions);
}

TEST_CASE("tree solver packaging") {
  const Scenario sc = test::interactive_scenario();
  const RewardModel rm = test::default_rewards();
  SearchConfig cfg;
  cfg.max_iterations = 3;  // partial extraction, completion fills the rest
  cfg.heuristic = false;
  cfg.rollout = RolloutPolicy::kUniform;
  cfg.stats_stride = 0;
  const SolverOutcome got = mcts_solver(sc.init, nullptr, sc, rm, cfg);
  CHECK(got.ego_actions.size() == static_cast<std::size_t>(sc.horizon));
  CHECK(got.opp_actions.size() == static_cast<std::size_t>(sc.horizon));
  double re, ro;
  joint_rewards(sc.init, got.ego_actions, got.opp_actions, sc, rm, re, ro);
  CHECK(re == got.reward_ego);
  CHECK(ro == got.reward_opp);
  CHECK(got.evals == 3);
}

TEST_CASE("enumeration caps") {
  const Scenario sc = test::interactive_scenario();  // |A|=6, N=5
  const RewardModel rm = test::default_rewards();
  CHECK_THROWS_AS(exhaustive_stackelberg(sc.init, sc, rm, 1000000),
                  InfeasibleError);
  AbrConfig cfg;
  cfg.cap = 1000;  // 6^5 = 7776 exceeds it
  CHECK_THROWS_AS(alternating_best_response(sc.init, sc, rm, cfg), InfeasibleError);
}

TEST_CASE("unsafe joint sequences score zero for both agents") {
  const Scenario sc = test::interactive_scenario();
  const RewardModel rm = test::default_rewards();
  // Both flooring collides on this geometry.
  const std::vector<double> floor_it(static_cast<std::size_t>(sc.horizon), 2.0);
  const auto traj = rollout_joint(sc.init, floor_it, floor_it, sc);
  REQUIRE(is_unsafe(traj, sc));
  double re = -1.0, ro = -1.0;
  joint_rewards(sc.init, floor_it, floor_it, sc, rm, re, ro);
  CHECK(re == 0.0);
  CHECK(ro == 0.0);
}
