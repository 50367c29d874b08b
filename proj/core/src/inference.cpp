#include "gtplan/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "gtplan/errors.hpp"

namespace gtplan {

Belief Belief::uniform_grid(int m) {
  if (m < 2) throw std::invalid_argument("Belief: need at least 2 samples");
  Belief b;
  b.samples.resize(static_cast<std::size_t>(m));
  b.weights.assign(static_cast<std::size_t>(m), 1.0 / m);
  for (int i = 0; i < m; ++i) {
    b.samples[static_cast<std::size_t>(i)] = static_cast<double>(i) / (m - 1);
  }
  return b;
}

double Belief::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) m += samples[i] * weights[i];
  return m;
}

double Belief::entropy() const {
  double h = 0.0;
  for (double w : weights) {
    if (w > 0.0) h -= w * std::log(w);
  }
  return h;
}

void Belief::validate() const {
  if (samples.size() < 2) throw std::invalid_argument("Belief: need >= 2 samples");
  if (samples.size() != weights.size()) {
    throw std::invalid_argument("Belief: samples/weights size mismatch");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("Belief: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("Belief: weights must sum to 1");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      if (samples[i] == samples[j]) {
        throw std::invalid_argument("Belief: duplicate samples");
      }
    }
  }
}

ObservationWindow make_window(std::span<const JointState> states,
                              const Scenario& scenario) {
  if (states.size() < 2) {
    throw std::invalid_argument("make_window: need at least 2 states");
  }
  ObservationWindow w;
  w.states.assign(states.begin(), states.end());
  for (std::size_t k = 0; k + 1 < states.size(); ++k) {
    const double ae = (states[k + 1].ego.v - states[k].ego.v) / scenario.dt;
    const double ao = (states[k + 1].opp.v - states[k].opp.v) / scenario.dt;
    w.ego_actions.push_back(
        scenario.actions[static_cast<std::size_t>(scenario.actions.nearest_index(ae))]);
    w.opp_actions.push_back(
        scenario.actions[static_cast<std::size_t>(scenario.actions.nearest_index(ao))]);
  }
  return w;
}

namespace {

long long sequence_count(std::size_t base, int length, long long cap) {
  long long count = 1;
  for (int i = 0; i < length; ++i) {
    count *= static_cast<long long>(base);
    if (count > cap) {
      throw InfeasibleError(
          "likelihood: |A|^r exceeds the enumeration cap, use a smaller window");
    }
  }
  return count;
}

/// Advances a base-|A| odometer; the first step is the most significant
/// digit, so successive calls enumerate sequences in lexicographic order.
bool next_sequence(std::vector<int>& digits, int base) {
  for (int i = static_cast<int>(digits.size()) - 1; i >= 0; --i) {
    if (++digits[static_cast<std::size_t>(i)] < base) return true;
    digits[static_cast<std::size_t>(i)] = 0;
  }
  return false;
}

/// Opponent-egoism of every opponent action sequence of the window's length,
/// plus the fixed ego-egoism of the observed ego actions. The opponent's
/// social reward under candidate gamma is then
/// gamma * e_opp[i] + (1 - gamma) * e_ego.
struct WindowEnumeration {
  std::vector<double> e_opp;
  double e_ego = 0.0;
  long long observed_index = -1;
};

WindowEnumeration enumerate_window(const ObservationWindow& window,
                                   const RewardParams& opp_base,
                                   const Scenario& scenario, long long cap) {
  const int r = window.length();
  const int base = static_cast<int>(scenario.actions.size());
  const long long count = sequence_count(scenario.actions.size(), r, cap);

  WindowEnumeration out;
  out.e_opp.reserve(static_cast<std::size_t>(count));
  const JointState& x0 = window.states.front();
  out.e_ego = egoism_reward(x0, window.ego_actions, window.opp_actions, opp_base,
                            AgentId::kEgo, scenario);

  std::vector<int> observed(static_cast<std::size_t>(r));
  for (int k = 0; k < r; ++k) {
    observed[static_cast<std::size_t>(k)] =
        scenario.actions.nearest_index(window.opp_actions[static_cast<std::size_t>(k)]);
  }

  std::vector<int> digits(static_cast<std::size_t>(r), 0);
  std::vector<double> u(static_cast<std::size_t>(r), 0.0);
  long long index = 0;
  do {
    for (int k = 0; k < r; ++k) {
      u[static_cast<std::size_t>(k)] =
          scenario.actions[static_cast<std::size_t>(digits[static_cast<std::size_t>(k)])];
    }
    out.e_opp.push_back(egoism_reward(x0, u, window.ego_actions, opp_base,
                                      AgentId::kOpp, scenario));
    if (digits == observed) out.observed_index = index;
    ++index;
  } while (next_sequence(digits, base));
  return out;
}

double log_likelihood_at(const WindowEnumeration& e, double gamma) {
  double max_r = -1e300;
  for (double eo : e.e_opp) {
    max_r = std::max(max_r, gamma * eo + (1.0 - gamma) * e.e_ego);
  }
  double denom = 0.0;
  for (double eo : e.e_opp) {
    denom += std::exp(gamma * eo + (1.0 - gamma) * e.e_ego - max_r);
  }
  const double r_obs =
      gamma * e.e_opp[static_cast<std::size_t>(e.observed_index)] +
      (1.0 - gamma) * e.e_ego;
  return r_obs - max_r - std::log(denom);
}

}  // namespace

double likelihood(const ObservationWindow& window, double gamma,
                  const RewardParams& opp_base, const Scenario& scenario,
                  long long cap) {
  const WindowEnumeration e = enumerate_window(window, opp_base, scenario, cap);
  return std::exp(log_likelihood_at(e, gamma));
}

BeliefUpdate update_belief(const Belief& belief, const ObservationWindow& window,
                           const RewardParams& opp_base, const Scenario& scenario,
                           long long cap) {
  belief.validate();
  const WindowEnumeration e = enumerate_window(window, opp_base, scenario, cap);

  BeliefUpdate out;
  out.belief = belief;
  double sum = 0.0;
  for (std::size_t i = 0; i < belief.samples.size(); ++i) {
    out.belief.weights[i] =
        belief.weights[i] * std::exp(log_likelihood_at(e, belief.samples[i]));
    sum += out.belief.weights[i];
  }
  if (sum <= 0.0 || !std::isfinite(sum)) {
    std::fprintf(stderr,
                 "update_belief: weights underflowed, resetting to uniform\n");
    out.belief.weights.assign(belief.weights.size(), 1.0 / belief.weights.size());
    out.reset = true;
  } else {
    for (double& w : out.belief.weights) w /= sum;
  }
  out.gamma_hat = out.belief.mean();
  return out;
}

}  // namespace gtplan
