#include "gtplan/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gtplan/errors.hpp"

namespace gtplan {

void GameNode::action_prefix(std::vector<double>& u_ego, std::vector<double>& u_opp,
                             const ActionSet& actions) const {
  u_ego.clear();
  u_opp.clear();
  for (const GameNode* n = this; n->parent != nullptr; n = n->parent) {
    const double a = actions[static_cast<std::size_t>(n->action)];
    if (n->parent->is_ego_side()) {
      u_ego.push_back(a);
    } else {
      u_opp.push_back(a);
    }
  }
  std::reverse(u_ego.begin(), u_ego.end());
  std::reverse(u_opp.begin(), u_opp.end());
}

void SearchConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (exploration_c < 0.0) throw std::invalid_argument("exploration_c must be >= 0");
  if (stats_stride < 0) throw std::invalid_argument("stats_stride must be >= 0");
  if (rollout_retries < 0) throw std::invalid_argument("rollout_retries must be >= 0");
}

SearchEngine::SearchEngine(const Scenario& scenario, const PredictionSet* preds,
                           const RewardModel& rewards, const SearchConfig& config)
    : scenario_(scenario),
      preds_(preds),
      rewards_(rewards),
      config_(config),
      rng_(Rng::derive(config.seed, Rng::stream_id("search", 0))) {
  config_.validate();
  scenario_.validate();
  rewards_.ego.validate();
  rewards_.opp.validate();
  if (preds_ != nullptr) {
    try {
      preds_->validate(scenario_.horizon);
    } catch (const ParseError& e) {
      throw std::invalid_argument(e.what());
    }
  } else if (config_.heuristic || config_.rollout == RolloutPolicy::kHeuristic) {
    throw std::invalid_argument("prediction set required when the heuristic is on");
  }
}

double SearchEngine::node_conf_weight(const GameNode& node) const {
  if (preds_ == nullptr) return 1.0;
  const int t = node.step_index();
  if (t < 1 || t > scenario_.horizon) return 1.0;
  return confidence_weight(node.state.opp.s, t, *preds_);
}

std::unique_ptr<GameNode> SearchEngine::make_root(const JointState& x0) {
  auto root = std::make_unique<GameNode>();
  root->kind = NodeKind::kEgoDecision;
  root->depth = 0;
  root->state = x0;
  root->conf_weight = node_conf_weight(*root);
  root->children.resize(scenario_.actions.size());
  root->untried.resize(scenario_.actions.size());
  std::iota(root->untried.begin(), root->untried.end(), 0);
  rng_.shuffle(root->untried);
  return root;
}

std::unique_ptr<GameNode> SearchEngine::make_child(GameNode* parent,
                                                   int action_index) {
  auto child = std::make_unique<GameNode>();
  child->action = action_index;
  child->parent = parent;
  child->depth = parent->depth + 1;
  const double a = scenario_.actions[static_cast<std::size_t>(action_index)];
  if (parent->is_ego_side()) {
    // Ego commits its action; the joint state advances only after the
    // opponent answers.
    child->kind = NodeKind::kOppDecision;
    child->state = parent->state;
  } else {
    const double u_ego = scenario_.actions[static_cast<std::size_t>(parent->action)];
    child->state = parent->state;
    child->state.ego =
        step_dynamics(parent->state.ego, u_ego, scenario_.dt, scenario_.ego_path);
    child->state.opp =
        step_dynamics(parent->state.opp, a, scenario_.dt, scenario_.opp_path);
    child->state.t = parent->state.t + 1;
    child->kind = child->depth == 2 * scenario_.horizon ? NodeKind::kTerminal
                                                        : NodeKind::kEgoDecision;
  }
  child->conf_weight = node_conf_weight(*child);
  if (child->kind != NodeKind::kTerminal) {
    child->children.resize(scenario_.actions.size());
    child->untried.resize(scenario_.actions.size());
    std::iota(child->untried.begin(), child->untried.end(), 0);
    rng_.shuffle(child->untried);
  } else {
    std::vector<double> u_ego, u_opp;
    child->action_prefix(u_ego, u_opp, scenario_.actions);
    const GameNode* r = child.get();
    while (r->parent != nullptr) r = r->parent;
    const RewardBreakdown be = social_reward(r->state, u_ego, u_opp, rewards_.ego,
                                             AgentId::kEgo, scenario_);
    const RewardBreakdown bo = social_reward(r->state, u_ego, u_opp, rewards_.opp,
                                             AgentId::kOpp, scenario_);
    child->terminal_reward_ego = be.total;
    child->terminal_reward_opp = bo.total;
  }
  return child;
}

GameNode* SearchEngine::expand(GameNode* node) {
  while (!node->untried.empty()) {
    const int idx = node->untried.back();
    node->untried.pop_back();
    auto child = make_child(node, idx);
    if (unsafe_state(child->state, scenario_)) {
      continue;  // prune the unsafe expansion, the action stays consumed
    }
    GameNode* out = child.get();
    node->children[static_cast<std::size_t>(idx)] = std::move(child);
    return out;
  }
  return nullptr;
}

GameNode* SearchEngine::select_child_ucb(GameNode* node) const {
  const double ln_parent = std::log(static_cast<double>(std::max<long long>(node->visits, 1)));
  GameNode* best = nullptr;
  double best_value = 0.0;
  for (const std::unique_ptr<GameNode>& child : node->children) {
    if (!child || child->dead) continue;
    const double qs = node->kind == NodeKind::kEgoDecision ? child->qs_ego
                                                           : child->qs_opp;
    const double value =
        qs / static_cast<double>(child->visits) +
        config_.exploration_c *
            std::sqrt(2.0 * ln_parent / static_cast<double>(child->visits));
    if (best == nullptr || value > best_value) {
      best = child.get();
      best_value = value;
    }
  }
  return best;
}

GameNode* SearchEngine::select(GameNode* root) {
  GameNode* node = root;
  while (true) {
    if (node->kind == NodeKind::kTerminal) return node;
    if (!node->fully_expanded()) {
      if (GameNode* child = expand(node)) return child;
    }
    if (GameNode* next = select_child_ucb(node)) {
      node = next;
      continue;
    }
    // Every continuation is unsafe: exclude the node and resume above it.
    node->dead = true;
    if (node->parent == nullptr) {
      throw RefusePlanError("search: no safe action from the root");
    }
    node = node->parent;
  }
}

int SearchEngine::sample_jerk_feasible(double prev_accel, Rng& rng) const {
  int count = 0;
  for (double a : scenario_.actions.accelerations) {
    count += std::abs(a - prev_accel) <= scenario_.jerk_comfort;
  }
  if (count == 0) return scenario_.actions.nearest_index(prev_accel);
  int pick = rng.uniform_int(count);
  for (std::size_t i = 0; i < scenario_.actions.size(); ++i) {
    if (std::abs(scenario_.actions[i] - prev_accel) <= scenario_.jerk_comfort &&
        pick-- == 0) {
      return static_cast<int>(i);
    }
  }
  return scenario_.actions.nearest_index(prev_accel);
}

SearchEngine::RolloutResult SearchEngine::rollout(GameNode* leaf) {
  RolloutResult r;
  const GameNode* root = leaf;
  while (root->parent != nullptr) root = root->parent;

  leaf->action_prefix(r.u_ego, r.u_opp, scenario_.actions);
  if (leaf->kind == NodeKind::kTerminal) {
    r.trajectory = rollout_joint(root->state, r.u_ego, r.u_opp, scenario_);
    r.unsafe = false;  // in-tree terminals were safety-checked on expansion
    return r;
  }

  double prev_ego = r.u_ego.empty() ? config_.prev_accel_ego : r.u_ego.back();
  double prev_opp = r.u_opp.empty() ? config_.prev_accel_opp : r.u_opp.back();

  // The governing prediction: the highest-probability trajectory whose range
  // holds the leaf's opponent position. Roll-out opponent actions then stay
  // inside that same trajectory's ranges, retry budget permitting.
  int governing = -1;
  if (config_.rollout == RolloutPolicy::kHeuristic && preds_ != nullptr) {
    const int t = leaf->step_index();
    if (t >= 1 && t <= scenario_.horizon) {
      double best_p = -1.0;
      for (std::size_t i = 0; i < preds_->trajectories.size(); ++i) {
        const PredictedTrajectory& tr = preds_->trajectories[i];
        if (in_confidence_range(tr, t, leaf->state.opp.s, preds_->rho) &&
            tr.probability > best_p) {
          governing = static_cast<int>(i);
          best_p = tr.probability;
        }
      }
    }
  }

  JointState cur = leaf->state;
  const int n = scenario_.horizon;
  while (static_cast<int>(r.u_opp.size()) < n) {
    if (r.u_ego.size() == r.u_opp.size()) {
      const int idx = sample_jerk_feasible(prev_ego, rng_);
      prev_ego = scenario_.actions[static_cast<std::size_t>(idx)];
      r.u_ego.push_back(prev_ego);
    } else {
      const int t_next = static_cast<int>(r.u_opp.size()) + 1;
      int idx = sample_jerk_feasible(prev_opp, rng_);
      if (governing >= 0 && t_next <= n) {
        // Resample until the successor stays inside the governing range; the
        // final draw stands as the jerk-only fallback when the budget runs out.
        const PredictedTrajectory& tr =
            preds_->trajectories[static_cast<std::size_t>(governing)];
        for (int retry = 0; retry < config_.rollout_retries; ++retry) {
          const AgentState next = step_dynamics(
              cur.opp, scenario_.actions[static_cast<std::size_t>(idx)],
              scenario_.dt, scenario_.opp_path);
          if (in_confidence_range(tr, t_next, next.s, preds_->rho)) break;
          if (retry + 1 < config_.rollout_retries) {
            idx = sample_jerk_feasible(prev_opp, rng_);
          }
        }
      }
      prev_opp = scenario_.actions[static_cast<std::size_t>(idx)];
      r.u_opp.push_back(prev_opp);
      const std::size_t k = r.u_opp.size() - 1;
      cur.ego = step_dynamics(cur.ego, r.u_ego[k], scenario_.dt, scenario_.ego_path);
      cur.opp = step_dynamics(cur.opp, r.u_opp[k], scenario_.dt, scenario_.opp_path);
      cur.t += 1;
    }
  }

  r.trajectory = rollout_joint(root->state, r.u_ego, r.u_opp, scenario_);
  r.unsafe = is_unsafe(r.trajectory, scenario_);
  return r;
}

void SearchEngine::score(const RolloutResult& r, const JointState& x0,
                         double& q_ego, double& q_opp) const {
  if (r.unsafe) {
    q_ego = 0.0;
    q_opp = 0.0;
    return;
  }
  q_ego = social_reward(x0, r.u_ego, r.u_opp, rewards_.ego, AgentId::kEgo,
                        scenario_).total;
  q_opp = social_reward(x0, r.u_ego, r.u_opp, rewards_.opp, AgentId::kOpp,
                        scenario_).total;
}

void SearchEngine::backpropagate(GameNode* leaf, double q_ego, double q_opp) {
  for (GameNode* n = leaf; n != nullptr; n = n->parent) {
    n->visits += 1;
    n->q_ego += q_ego;
    n->q_opp += q_opp;
    double w = 1.0;
    if (config_.heuristic && (n->is_ego_side() || config_.weight_all_nodes)) {
      w = n->conf_weight;
    }
    n->qs_ego += w * q_ego;
    n->qs_opp += w * q_opp;
  }
}

std::unique_ptr<GameNode> SearchEngine::run(const JointState& x0) {
  if (unsafe_state(x0, scenario_)) {
    throw RefusePlanError("search: initial state is already unsafe");
  }
  std::unique_ptr<GameNode> root = make_root(x0);
  stats_ = SearchStats{};
  for (long long iter = 1; iter <= config_.max_iterations; ++iter) {
    GameNode* leaf = select(root.get());
    double q_ego = 0.0, q_opp = 0.0;
    if (leaf->kind == NodeKind::kTerminal) {
      q_ego = leaf->terminal_reward_ego;
      q_opp = leaf->terminal_reward_opp;
    } else {
      const RolloutResult r = rollout(leaf);
      score(r, x0, q_ego, q_opp);
    }
    backpropagate(leaf, q_ego, q_opp);
    if (config_.stats_stride > 0 &&
        (iter % config_.stats_stride == 0 || iter == config_.max_iterations)) {
      const PlanResult snap = extract_plan(*root, scenario_);
      stats_.curve.push_back({iter, snap.reward_ego, snap.reward_opp});
    }
  }
  return root;
}

PlanResult extract_plan(const GameNode& root, const Scenario& scenario) {
  PlanResult plan;
  const GameNode* node = &root;
  while (node->kind != NodeKind::kTerminal) {
    const GameNode* best = nullptr;
    double best_avg = 0.0;
    for (const std::unique_ptr<GameNode>& child : node->children) {
      if (!child) continue;
      const double q = node->kind == NodeKind::kEgoDecision ? child->q_ego
                                                            : child->q_opp;
      const double avg = q / static_cast<double>(child->visits);
      if (best == nullptr || avg > best_avg) {
        best = child.get();
        best_avg = avg;
      }
    }
    if (best == nullptr) break;
    const double a = scenario.actions[static_cast<std::size_t>(best->action)];
    if (node->kind == NodeKind::kEgoDecision) {
      plan.ego_actions.push_back(a);
    } else {
      plan.opp_actions.push_back(a);
    }
    node = best;
  }
  if (node == &root) {
    throw RefusePlanError("extract_plan: root has no visited children");
  }
  plan.reward_ego = node->q_ego / static_cast<double>(node->visits);
  plan.reward_opp = node->q_opp / static_cast<double>(node->visits);
  const std::size_t paired = plan.opp_actions.size();
  plan.trajectory = rollout_joint(
      root.state, std::span<const double>(plan.ego_actions).first(paired),
      std::span<const double>(plan.opp_actions), scenario);
  return plan;
}

SearchStats collect_stats(const GameNode& root) {
  SearchStats st;
  std::vector<const GameNode*> frontier = {&root};
  st.node_count = 0;
  while (!frontier.empty()) {
    std::vector<const GameNode*> next;
    for (const GameNode* n : frontier) {
      st.node_count += 1;
      if (n->depth > 0) {
        if (static_cast<int>(st.per_depth.size()) < n->depth) {
          st.per_depth.resize(static_cast<std::size_t>(n->depth));
        }
        DepthTally& tally = st.per_depth[static_cast<std::size_t>(n->depth - 1)];
        if (n->visits >= tally.v_max) {
          tally.v_other = tally.v_max;
          tally.v_max = n->visits;
        } else if (n->visits > tally.v_other) {
          tally.v_other = n->visits;
        }
        st.max_depth = std::max(st.max_depth, n->depth);
      }
      for (const std::unique_ptr<GameNode>& c : n->children) {
        if (c) next.push_back(c.get());
      }
    }
    frontier = std::move(next);
  }
  return st;
}

SearchOutcome search(const JointState& x0, const PredictionSet* preds,
                     const Scenario& scenario, const RewardModel& rewards,
                     const SearchConfig& config) {
  SearchEngine engine(scenario, preds, rewards, config);
  std::unique_ptr<GameNode> root = engine.run(x0);
  SearchStats stats = collect_stats(*root);
  stats.curve = engine.stats().curve;
  return SearchOutcome{std::move(root), std::move(stats)};
}

}  // namespace gtplan
