#pragma once

#include <memory>
#include <vector>

#include "gtplan/prediction.hpp"
#include "gtplan/reward.hpp"
#include "gtplan/rng.hpp"
#include "gtplan/scenario.hpp"

namespace gtplan {

enum class NodeKind { kEgoDecision, kOppDecision, kTerminal };

/// One node of the alternating game tree. Depth 2k holds the joint state
/// after k full steps and is the ego's decision point (the terminal at depth
/// 2N also sits on the ego side); depth 2k+1 keeps the same joint state with
/// the ego's step-k action pending and is the opponent's decision point.
struct GameNode {
  NodeKind kind = NodeKind::kEgoDecision;
  int depth = 0;
  JointState state;
  int action = -1;  // action index taken at the parent to reach this node
  GameNode* parent = nullptr;

  long long visits = 0;   // C
  double q_ego = 0.0;     // total reward, ego
  double q_opp = 0.0;     // total reward, opponent
  double qs_ego = 0.0;    // total searching (confidence-weighted) reward, ego
  double qs_opp = 0.0;    // total searching reward, opponent
  double conf_weight = 1.0;  // cached confidence weight of this node's state
  bool dead = false;  // all continuations unsafe; excluded from selection

  // Terminal nodes cache their (safe) full-trajectory rewards.
  double terminal_reward_ego = 0.0;
  double terminal_reward_opp = 0.0;

  std::vector<std::unique_ptr<GameNode>> children;  // indexed by action
  std::vector<int> untried;  // pre-shuffled expansion queue (back = next)

  bool fully_expanded() const { return untried.empty(); }
  bool is_ego_side() const { return depth % 2 == 0; }
  /// Joint step count already applied in `state`.
  int step_index() const { return depth / 2; }

  /// Action sequences accumulated from the root. At an ego node both have
  /// length k; at an opponent node the ego sequence is one longer.
  void action_prefix(std::vector<double>& u_ego, std::vector<double>& u_opp,
                     const ActionSet& actions) const;
};

enum class RolloutPolicy { kHeuristic, kUniform };

struct SearchConfig {
  long long max_iterations = 10000;
  double exploration_c = 2.0;
  std::uint64_t seed = 1;
  bool heuristic = true;               // confidence-weighted back-propagation
  RolloutPolicy rollout = RolloutPolicy::kHeuristic;
  int stats_stride = 100;   // snapshot cadence for the reward curve; 0 = off
  int rollout_retries = 16;  // resamples per step before jerk-only fallback
  double prev_accel_ego = 0.0;  // accel preceding the root, per agent
  double prev_accel_opp = 0.0;
  bool weight_all_nodes = false;  // ablation: weight opponent nodes too

  void validate() const;
};

struct DepthTally {
  long long v_max = 0;    // visits of the most-visited node at this depth
  long long v_other = 0;  // runner-up visits
};

struct CurvePoint {
  long long iteration = 0;
  double reward_ego = 0.0;
  double reward_opp = 0.0;
};

struct SearchStats {
  std::vector<DepthTally> per_depth;  // index 0 = depth 1 (root children)
  int max_depth = 0;
  std::size_t node_count = 0;
  std::vector<CurvePoint> curve;
};

struct PlanResult {
  std::vector<double> ego_actions;  // length <= N
  std::vector<double> opp_actions;  // length <= ego_actions length
  std::vector<JointState> trajectory;  // joint roll-out of the paired prefix
  // Unweighted average rewards at the deepest extracted node; exact plan
  // rewards once extraction reaches a terminal.
  double reward_ego = 0.0;
  double reward_opp = 0.0;
  SearchStats stats;
};

/// Greedy descent by unweighted average reward: Q_E/C at ego layers, Q_O/C at
/// opponent layers, ties to the lowest action index. Stops at a terminal or
/// childless node. Throws RefusePlanError when the root has no children.
PlanResult extract_plan(const GameNode& root, const Scenario& scenario);

/// Per-depth visit tallies, deepest reached depth and node count.
SearchStats collect_stats(const GameNode& root);

/// Monte Carlo tree search over the alternating game with optional
/// prediction-heuristic guidance. Exposes the individual phases so tests can
/// drive them; `run` executes exactly max_iterations select/roll-out/score/
/// back-propagate cycles.
class SearchEngine {
 public:
  /// `preds` may be null only when both the heuristic and the heuristic
  /// roll-out are disabled. Throws std::invalid_argument on horizon mismatch.
  SearchEngine(const Scenario& scenario, const PredictionSet* preds,
               const RewardModel& rewards, const SearchConfig& config);

  /// Builds the tree from x0. Throws RefusePlanError when x0 is already
  /// unsafe or every continuation is unsafe.
  std::unique_ptr<GameNode> run(const JointState& x0);

  const SearchStats& stats() const { return stats_; }

  std::unique_ptr<GameNode> make_root(const JointState& x0);

  /// Descends by the selection rule, expanding one untried action at the
  /// first not-fully-expanded node. Unsafe expansions are discarded; nodes
  /// whose expansions are all unsafe are marked dead and skipped.
  GameNode* select(GameNode* root);

  struct RolloutResult {
    std::vector<double> u_ego;  // full-horizon sequences, root to terminal
    std::vector<double> u_opp;
    std::vector<JointState> trajectory;  // x_1..x_N from the root state
    bool unsafe = false;
  };

  /// Completes the leaf's partial sequences to the horizon with the
  /// configured roll-out policy. A terminal leaf returns its stored
  /// sequences unchanged.
  RolloutResult rollout(GameNode* leaf);

  /// Scores a finished roll-out: zero for unsafe trajectories, social
  /// rewards of both agents otherwise.
  void score(const RolloutResult& r, const JointState& x0, double& q_ego,
             double& q_opp) const;

  /// Adds the sample to every node on the leaf-to-root path. The searching
  /// rewards are scaled by the node's confidence weight on the ego side
  /// (everywhere when weight_all_nodes is set, nowhere when the heuristic is
  /// off).
  void backpropagate(GameNode* leaf, double q_ego, double q_opp);

 private:
  GameNode* expand(GameNode* node);
  std::unique_ptr<GameNode> make_child(GameNode* parent, int action_index);
  GameNode* select_child_ucb(GameNode* node) const;
  double node_conf_weight(const GameNode& node) const;
  int sample_jerk_feasible(double prev_accel, Rng& rng) const;

  const Scenario& scenario_;
  const PredictionSet* preds_;
  const RewardModel& rewards_;
  SearchConfig config_;
  Rng rng_;
  SearchStats stats_;
};

struct SearchOutcome {
  std::unique_ptr<GameNode> root;
  SearchStats stats;
};

/// One-call wrapper: run the engine and collect stats.
SearchOutcome search(const JointState& x0, const PredictionSet* preds,
                     const Scenario& scenario, const RewardModel& rewards,
                     const SearchConfig& config);

}  // namespace gtplan
