#pragma once

#include <span>
#include <vector>

#include "gtplan/reward.hpp"
#include "gtplan/scenario.hpp"

namespace gtplan {

/// Discrete posterior over candidate courtesy parameters.
struct Belief {
  std::vector<double> samples;  // gamma candidates in [0, 1], distinct
  std::vector<double> weights;  // normalized posterior weights

  /// Uniform grid of m candidates on [0, 1] with a uniform prior.
  static Belief uniform_grid(int m);

  double mean() const;
  double entropy() const;
  void validate() const;
};

/// A window of r observed transitions at planning-step granularity, with
/// per-step accelerations reconstructed from speed differences and snapped
/// to the action set.
struct ObservationWindow {
  std::vector<JointState> states;   // r + 1 states
  std::vector<double> ego_actions;  // length r, snapped
  std::vector<double> opp_actions;  // length r, snapped

  int length() const { return static_cast<int>(ego_actions.size()); }
};

/// Builds a window from r+1 consecutive planning-step states.
ObservationWindow make_window(std::span<const JointState> states,
                              const Scenario& scenario);

/// Softmax probability of the observed opponent action sequence under the
/// candidate gamma: exp(R(U_hat)) / sum_U exp(R(U)) over all |A|^r opponent
/// sequences, where R is the opponent's social reward with the observed ego
/// actions held fixed. Throws InfeasibleError when |A|^r exceeds the cap.
double likelihood(const ObservationWindow& window, double gamma,
                  const RewardParams& opp_base, const Scenario& scenario,
                  long long cap = 100000);

struct BeliefUpdate {
  Belief belief;
  double gamma_hat = 0.0;  // posterior mean
  bool reset = false;      // weights underflowed and were reset to uniform
};

/// One Bayesian update: multiply each weight by the likelihood of its
/// candidate, renormalize, and report the posterior mean.
BeliefUpdate update_belief(const Belief& belief, const ObservationWindow& window,
                           const RewardParams& opp_base, const Scenario& scenario,
                           long long cap = 100000);

}  // namespace gtplan
