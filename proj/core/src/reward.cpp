#include "gtplan/reward.hpp"

#include <cmath>
#include <stdexcept>

#include "gtplan/errors.hpp"

namespace gtplan {

void RewardParams::validate() const {
  if (gamma < 0.0 || gamma > 1.0) throw ParseError("gamma: must lie in [0, 1]");
  if (theta_comfort < 0.0 || theta_efficiency < 0.0) {
    throw ParseError("theta: weights must be >= 0");
  }
  if (alpha <= 0.0) throw ParseError("alpha: must be > 0");
  if (beta <= 0.0) throw ParseError("beta: must be > 0");
}

namespace {

/// Both agents' egoism terms over one joint roll-out.
void egoism_pair(const JointState& x0, std::span<const double> u_ego,
                 std::span<const double> u_opp, const RewardParams& params,
                 const Scenario& scenario, double& e_ego, double& e_opp) {
  if (u_ego.size() != u_opp.size()) {
    throw std::invalid_argument("egoism_reward: action sequence lengths differ");
  }
  e_ego = 0.0;
  e_opp = 0.0;
  JointState cur = x0;
  for (std::size_t k = 0; k < u_ego.size(); ++k) {
    cur.ego = step_dynamics(cur.ego, u_ego[k], scenario.dt, scenario.ego_path);
    cur.opp = step_dynamics(cur.opp, u_opp[k], scenario.dt, scenario.opp_path);
    e_ego += params.theta_comfort * std::exp(-params.alpha * u_ego[k] * u_ego[k]) +
             params.theta_efficiency *
                 (1.0 - std::exp(-params.beta * cur.ego.v * cur.ego.v));
    e_opp += params.theta_comfort * std::exp(-params.alpha * u_opp[k] * u_opp[k]) +
             params.theta_efficiency *
                 (1.0 - std::exp(-params.beta * cur.opp.v * cur.opp.v));
  }
}

}  // namespace

double egoism_reward(const JointState& x0, std::span<const double> u_self,
                     std::span<const double> u_other, const RewardParams& params,
                     AgentId which, const Scenario& scenario) {
  double e_ego = 0.0, e_opp = 0.0;
  if (which == AgentId::kEgo) {
    egoism_pair(x0, u_self, u_other, params, scenario, e_ego, e_opp);
    return e_ego;
  }
  egoism_pair(x0, u_other, u_self, params, scenario, e_ego, e_opp);
  return e_opp;
}

RewardBreakdown social_reward(const JointState& x0, std::span<const double> u_ego,
                              std::span<const double> u_opp,
                              const RewardParams& params, AgentId which,
                              const Scenario& scenario) {
  RewardBreakdown b;
  egoism_pair(x0, u_ego, u_opp, params, scenario, b.egoism_ego, b.egoism_opp);
  const double own = which == AgentId::kEgo ? b.egoism_ego : b.egoism_opp;
  b.courtesy = which == AgentId::kEgo ? b.egoism_opp : b.egoism_ego;
  b.total = params.gamma * own + (1.0 - params.gamma) * b.courtesy;
  return b;
}

}  // namespace gtplan
