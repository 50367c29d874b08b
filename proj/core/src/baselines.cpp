#include "gtplan/baselines.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "gtplan/errors.hpp"
#include "gtplan/rng.hpp"

namespace gtplan {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool next_sequence(std::vector<int>& digits, int base) {
  for (int i = static_cast<int>(digits.size()) - 1; i >= 0; --i) {
    if (++digits[static_cast<std::size_t>(i)] < base) return true;
    digits[static_cast<std::size_t>(i)] = 0;
  }
  return false;
}

std::vector<double> to_actions(const std::vector<int>& digits, const ActionSet& a) {
  std::vector<double> u(digits.size());
  for (std::size_t i = 0; i < digits.size(); ++i) {
    u[i] = a[static_cast<std::size_t>(digits[i])];
  }
  return u;
}

long long pow_checked(std::size_t base, int exp, long long cap) {
  long long v = 1;
  for (int i = 0; i < exp; ++i) {
    v *= static_cast<long long>(base);
    if (v > cap) return -1;
  }
  return v;
}

double one_step_egoism(const AgentState& state, double accel, const PathDesc& path,
                       const RewardParams& p, double dt) {
  const AgentState next = step_dynamics(state, accel, dt, path);
  return p.theta_comfort * std::exp(-p.alpha * accel * accel) +
         p.theta_efficiency * (1.0 - std::exp(-p.beta * next.v * next.v));
}

}  // namespace

void joint_rewards(const JointState& x0, std::span<const double> u_ego,
                   std::span<const double> u_opp, const Scenario& scenario,
                   const RewardModel& rewards, double& r_ego, double& r_opp) {
  const std::vector<JointState> traj = rollout_joint(x0, u_ego, u_opp, scenario);
  if (is_unsafe(traj, scenario)) {
    r_ego = 0.0;
    r_opp = 0.0;
    return;
  }
  r_ego = social_reward(x0, u_ego, u_opp, rewards.ego, AgentId::kEgo, scenario).total;
  r_opp = social_reward(x0, u_ego, u_opp, rewards.opp, AgentId::kOpp, scenario).total;
}

void complete_plan(const JointState& x0, std::vector<double>& u_ego,
                   std::vector<double>& u_opp, const Scenario& scenario,
                   const RewardModel& rewards) {
  const std::size_t paired = std::min(u_ego.size(), u_opp.size());
  u_ego.resize(paired);
  u_opp.resize(paired);
  JointState cur = x0;
  for (std::size_t k = 0; k < paired; ++k) {
    cur.ego = step_dynamics(cur.ego, u_ego[k], scenario.dt, scenario.ego_path);
    cur.opp = step_dynamics(cur.opp, u_opp[k], scenario.dt, scenario.opp_path);
  }
  while (u_opp.size() < static_cast<std::size_t>(scenario.horizon)) {
    // Ego: greedy one-step egoism.
    int best_e = 0;
    double best_ev = -1.0;
    for (std::size_t i = 0; i < scenario.actions.size(); ++i) {
      const double v = one_step_egoism(cur.ego, scenario.actions[i],
                                       scenario.ego_path, rewards.ego, scenario.dt);
      if (v > best_ev) {
        best_ev = v;
        best_e = static_cast<int>(i);
      }
    }
    const double ae = scenario.actions[static_cast<std::size_t>(best_e)];
    const AgentState ego_next = step_dynamics(cur.ego, ae, scenario.dt, scenario.ego_path);
    // Opponent: greedy one-step egoism among collision-free answers, greedy
    // overall when none is safe.
    int best_o = -1;
    double best_ov = -1.0;
    int best_any = 0;
    double best_anyv = -1.0;
    for (std::size_t i = 0; i < scenario.actions.size(); ++i) {
      const double v = one_step_egoism(cur.opp, scenario.actions[i],
                                       scenario.opp_path, rewards.opp, scenario.dt);
      if (v > best_anyv) {
        best_anyv = v;
        best_any = static_cast<int>(i);
      }
      JointState probe = cur;
      probe.ego = ego_next;
      probe.opp = step_dynamics(cur.opp, scenario.actions[i], scenario.dt,
                                scenario.opp_path);
      if (!unsafe_state(probe, scenario) && v > best_ov) {
        best_ov = v;
        best_o = static_cast<int>(i);
      }
    }
    if (best_o < 0) best_o = best_any;
    const double ao = scenario.actions[static_cast<std::size_t>(best_o)];
    u_ego.push_back(ae);
    u_opp.push_back(ao);
    cur.ego = ego_next;
    cur.opp = step_dynamics(cur.opp, ao, scenario.dt, scenario.opp_path);
    cur.t += 1;
  }
}

SolverOutcome mcts_solver(const JointState& x0, const PredictionSet* preds,
                          const Scenario& scenario, const RewardModel& rewards,
                          const SearchConfig& config) {
  const auto start = Clock::now();
  SearchOutcome out = search(x0, preds, scenario, rewards, config);
  PlanResult plan = extract_plan(*out.root, scenario);
  SolverOutcome result;
  result.ego_actions = std::move(plan.ego_actions);
  result.opp_actions = std::move(plan.opp_actions);
  complete_plan(x0, result.ego_actions, result.opp_actions, scenario, rewards);
  joint_rewards(x0, result.ego_actions, result.opp_actions, scenario, rewards,
                result.reward_ego, result.reward_opp);
  result.evals = config.max_iterations;
  result.max_depth = out.stats.max_depth;
  result.wall_ms = elapsed_ms(start);
  return result;
}

SolverOutcome general_mcts(const JointState& x0, const Scenario& scenario,
                           const RewardModel& rewards, const SearchConfig& config) {
  SearchConfig cfg = config;
  cfg.heuristic = false;
  cfg.rollout = RolloutPolicy::kUniform;
  return mcts_solver(x0, nullptr, scenario, rewards, cfg);
}

SolverOutcome alternating_best_response(const JointState& x0,
                                        const Scenario& scenario,
                                        const RewardModel& rewards,
                                        const AbrConfig& config) {
  const auto start = Clock::now();
  scenario.validate();
  const int n = scenario.horizon;
  const int base = static_cast<int>(scenario.actions.size());
  if (pow_checked(scenario.actions.size(), n, config.cap) < 0) {
    throw InfeasibleError("alternating_best_response: |A|^N exceeds the cap");
  }

  Rng rng(Rng::derive(config.seed, Rng::stream_id("abr-init", 0)));
  std::vector<int> ego(static_cast<std::size_t>(n)), opp(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    ego[static_cast<std::size_t>(k)] = rng.uniform_int(base);
    opp[static_cast<std::size_t>(k)] = rng.uniform_int(base);
  }

  SolverOutcome result;
  long long evals = 0;

  // Exhaustive best response of one agent holding the other fixed;
  // lowest-index sequence on ties.
  const auto best_response = [&](bool acting_is_ego, const std::vector<int>& fixed) {
    std::vector<int> digits(static_cast<std::size_t>(n), 0);
    std::vector<int> best = digits;
    double best_v = -1.0;
    const std::vector<double> u_fixed = to_actions(fixed, scenario.actions);
    do {
      const std::vector<double> u_act = to_actions(digits, scenario.actions);
      double re = 0.0, ro = 0.0;
      if (acting_is_ego) {
        joint_rewards(x0, u_act, u_fixed, scenario, rewards, re, ro);
      } else {
        joint_rewards(x0, u_fixed, u_act, scenario, rewards, re, ro);
      }
      ++evals;
      const double v = acting_is_ego ? re : ro;
      if (v > best_v) {
        best_v = v;
        best = digits;
      }
    } while (next_sequence(digits, base));
    return best;
  };

  // The follower responds first each round; the round ends with the ego's
  // response to it.
  result.converged = false;
  for (int round = 0; round < config.max_rounds; ++round) {
    const std::vector<int> opp_next = best_response(false, ego);
    const std::vector<int> ego_next = best_response(true, opp_next);
    const bool unchanged = ego_next == ego && opp_next == opp;
    ego = ego_next;
    opp = opp_next;
    if (unchanged) {
      result.converged = true;
      break;
    }
  }

  result.ego_actions = to_actions(ego, scenario.actions);
  result.opp_actions = to_actions(opp, scenario.actions);
  joint_rewards(x0, result.ego_actions, result.opp_actions, scenario, rewards,
                result.reward_ego, result.reward_opp);
  result.evals = evals;
  result.max_depth = 2 * n;
  result.wall_ms = elapsed_ms(start);
  return result;
}

SolverOutcome exhaustive_stackelberg(const JointState& x0, const Scenario& scenario,
                                     const RewardModel& rewards, long long cap) {
  const auto start = Clock::now();
  scenario.validate();
  const int n = scenario.horizon;
  const int base = static_cast<int>(scenario.actions.size());
  if (pow_checked(scenario.actions.size(), 2 * n, cap) < 0) {
    throw InfeasibleError("exhaustive_stackelberg: |A|^(2N) exceeds the cap");
  }

  SolverOutcome result;
  long long evals = 0;
  std::vector<int> ego(static_cast<std::size_t>(n), 0);
  bool have_best = false;
  double best_re = 0.0;
  do {
    const std::vector<double> u_ego = to_actions(ego, scenario.actions);
    // Follower best response, lowest index on ties.
    std::vector<int> opp(static_cast<std::size_t>(n), 0);
    std::vector<double> br;
    double br_ro = -1.0, br_re = 0.0;
    do {
      const std::vector<double> u_opp = to_actions(opp, scenario.actions);
      double re = 0.0, ro = 0.0;
      joint_rewards(x0, u_ego, u_opp, scenario, rewards, re, ro);
      ++evals;
      if (ro > br_ro) {
        br_ro = ro;
        br_re = re;
        br = u_opp;
      }
    } while (next_sequence(opp, base));
    if (!have_best || br_re > best_re) {
      have_best = true;
      best_re = br_re;
      result.ego_actions = u_ego;
      result.opp_actions = br;
      result.reward_ego = br_re;
      result.reward_opp = br_ro;
    }
  } while (next_sequence(ego, base));

  result.evals = evals;
  result.max_depth = 2 * n;
  result.wall_ms = elapsed_ms(start);
  return result;
}

}  // namespace gtplan
