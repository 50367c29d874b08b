#pragma once

#include <span>

#include "gtplan/scenario.hpp"

namespace gtplan {

enum class AgentId { kEgo, kOpp };

inline AgentId other(AgentId a) {
  return a == AgentId::kEgo ? AgentId::kOpp : AgentId::kEgo;
}

/// Behavior parameters of one agent. gamma blends own utility against the
/// other agent's: 1 is fully egoistic, 0 fully courteous.
struct RewardParams {
  double gamma = 1.0;
  double theta_comfort = 1.0;
  double theta_efficiency = 1.0;
  double alpha = 0.1;  // comfort shape [s^4/m^2]
  double beta = 0.1;   // efficiency shape [s^2/m^2]

  void validate() const;
  /// Upper bound of the egoism reward over `steps` steps; also bounds the
  /// social reward since it is a convex blend of two egoism rewards.
  double bound(int steps) const { return steps * (theta_comfort + theta_efficiency); }
};

struct RewardBreakdown {
  double egoism_ego = 0.0;
  double egoism_opp = 0.0;
  double courtesy = 0.0;  // the other agent's egoism term
  double total = 0.0;     // gamma * own egoism + (1 - gamma) * courtesy
};

/// Comfort/efficiency utility of one agent over the joint roll-out:
/// sum_t theta_c * exp(-alpha a_t^2) + theta_e * (1 - exp(-beta v_{t+1}^2)),
/// where a_t is the commanded acceleration and v_{t+1} the realized speed.
/// `u_self` belongs to `which`, `u_other` to the other agent.
double egoism_reward(const JointState& x0, std::span<const double> u_self,
                     std::span<const double> u_other, const RewardParams& params,
                     AgentId which, const Scenario& scenario);

/// gamma-blended social reward of `which` under the joint roll-out.
RewardBreakdown social_reward(const JointState& x0, std::span<const double> u_ego,
                              std::span<const double> u_opp,
                              const RewardParams& params, AgentId which,
                              const Scenario& scenario);

/// Per-agent behavior parameters used by a planner: how the planning agent
/// scores itself and how it models the other agent.
struct RewardModel {
  RewardParams ego;
  RewardParams opp;
};

}  // namespace gtplan
