#pragma once

#include <cstdint>
#include <vector>

#include "gtplan/search.hpp"

namespace gtplan {

/// Result of one comparison solver run. Sequences always span the full
/// horizon; for tree-search solvers a partial extraction is completed
/// greedily (own one-step egoism, collision-avoiding, lowest index on ties).
struct SolverOutcome {
  std::vector<double> ego_actions;
  std::vector<double> opp_actions;
  double reward_ego = 0.0;
  double reward_opp = 0.0;
  long long evals = 0;   // iterations or sequence evaluations spent
  double wall_ms = 0.0;
  bool converged = true;
  int max_depth = 0;
};

/// Joint rewards of full sequences with the collision convention: unsafe
/// trajectories score zero for both agents.
void joint_rewards(const JointState& x0, std::span<const double> u_ego,
                   std::span<const double> u_opp, const Scenario& scenario,
                   const RewardModel& rewards, double& r_ego, double& r_opp);

/// Deterministically extends a partial plan to the full horizon.
void complete_plan(const JointState& x0, std::vector<double>& u_ego,
                   std::vector<double>& u_opp, const Scenario& scenario,
                   const RewardModel& rewards);

/// Runs the tree search and packages the extracted plan as a SolverOutcome.
SolverOutcome mcts_solver(const JointState& x0, const PredictionSet* preds,
                          const Scenario& scenario, const RewardModel& rewards,
                          const SearchConfig& config);

/// The search engine with the prediction heuristic disabled and a uniform
/// roll-out policy.
SolverOutcome general_mcts(const JointState& x0, const Scenario& scenario,
                           const RewardModel& rewards, const SearchConfig& config);

struct AbrConfig {
  int max_rounds = 50;
  std::uint64_t seed = 1;
  long long cap = 1000000;  // |A|^N enumeration cap per response
};

/// Alternating best response: starting from random sequences, each agent in
/// turn replaces its sequence with the exhaustive best response to the
/// other's. Stops on a full round without change or at the round cap (then
/// flagged non-converged).
SolverOutcome alternating_best_response(const JointState& x0,
                                        const Scenario& scenario,
                                        const RewardModel& rewards,
                                        const AbrConfig& config);

/// Exact bilevel solution by enumeration: for every ego sequence the
/// opponent's best response (lowest index on ties), then the ego argmax over
/// induced outcomes. Throws InfeasibleError when |A|^(2N) exceeds the cap.
SolverOutcome exhaustive_stackelberg(const JointState& x0, const Scenario& scenario,
                                     const RewardModel& rewards,
                                     long long cap = 1000000);

}  // namespace gtplan
