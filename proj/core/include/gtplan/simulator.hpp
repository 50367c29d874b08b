#pragma once

#include <string>
#include <vector>

#include "gtplan/inference.hpp"
#include "gtplan/search.hpp"

namespace gtplan {

enum class InferenceMode { kOff, kEgo, kBoth };

struct SimConfig {
  Scenario scenario;
  double dt_sim = 0.1;      // must divide the planning step
  double duration = 8.0;    // seconds; 0 gives an empty trace
  int replan_stride = 1;    // sim steps between replans
  RewardParams ego_params;
  RewardParams opp_params;
  InferenceMode inference = InferenceMode::kEgo;
  int belief_samples = 21;
  int window = 5;            // observation window, planning steps
  long long softmax_cap = 100000;
  double pred_sigma = 0.4;   // synthetic prediction noise [m]
  int pred_count = 3;        // predicted trajectories per replan
  double pred_rho = 4.0;
  SearchConfig search;
  std::uint64_t seed = 1;

  void validate() const;
  int planning_stride() const;  // sim steps per planning step
};

struct SimStep {
  double time = 0.0;
  JointState state;   // state at `time`, before applying the accelerations
  double a_ego = 0.0;  // held until the next step
  double a_opp = 0.0;
  double gamma_hat = 0.0;  // ego's current estimate of the opponent's gamma
};

struct PlanSnapshot {
  int sim_index = 0;
  double time = 0.0;
  PlanResult plan;
  // Opponent positions of the planner's extracted branch (the plan seen from
  // the planning agent; for the ego's snapshots this is the inferred
  // opponent trajectory).
  std::vector<double> other_branch_s;
  // Representative noisy predicted positions handed to the planner.
  std::vector<double> predicted_other_s;
};

struct BeliefSample {
  double time = 0.0;
  double gamma_hat = 0.0;
  double entropy = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
};

struct SimTrace {
  std::vector<SimStep> steps;
  JointState final_state;
  std::vector<PlanSnapshot> ego_plans;
  std::vector<PlanSnapshot> opp_plans;
  std::vector<BeliefSample> belief;
  std::string failure;  // empty on a clean run

  bool empty() const { return steps.empty(); }
};

/// Closed-loop simulation: both agents replan from the shared state every
/// replan_stride sim steps and hold their first planned acceleration in
/// between. The ego models the opponent with the inferred gamma; the
/// opponent is given the ego's true parameters.
SimTrace run_closed_loop(const SimConfig& config);

/// Opponent branch of the ego's extracted plan at the given replan.
std::vector<double> inferred_opponent_trajectory(const SimTrace& trace,
                                                 int replan_index);

enum class CrossingOrder { kNone, kEgoFirst, kOppFirst };

struct SimMetrics {
  CrossingOrder order = CrossingOrder::kNone;
  double cross_time_ego = -1.0;  // first passage of the interaction point
  double cross_time_opp = -1.0;
  double min_gap = 0.0;  // summed clearance to the conflict intervals
  double cum_egoism_ego = 0.0;
  double cum_egoism_opp = 0.0;
  // First planning step with |gamma_hat - gamma*| <= 0.1; -1 if never.
  int gamma_convergence_step = -1;
  bool collision = false;
};

SimMetrics metrics(const SimTrace& trace, const SimConfig& config);

// --- file formats -----------------------------------------------------

/// Tab-separated trace: t s_ego v_ego a_ego s_opp v_opp a_opp gamma_hat.
/// The last row carries the final state with zero accelerations.
void write_trace(const SimTrace& trace, const std::string& path);

/// Planning-step states parsed back from a trace file.
std::vector<JointState> read_trace_states(const std::string& path,
                                          const Scenario& scenario,
                                          double dt_sim);

void write_belief_trace(const SimTrace& trace, const std::string& path);
std::string metrics_to_json(const SimMetrics& m, const SimTrace& trace);
void write_plan_snapshots(const SimTrace& trace, const std::string& path);

SimConfig sim_config_from_json(const std::string& text,
                               const std::string& base_dir);
SimConfig load_sim_config(const std::string& path);

/// Parses a {gamma, theta:[comfort, efficiency], alpha, beta} document.
RewardParams reward_params_from_json(const std::string& text);

/// Reads the optional {"rewards": {"ego": {...}, "opp": {...}}} block of a
/// scenario document; missing entries keep defaults.
RewardModel reward_model_from_scenario_json(const std::string& text);

}  // namespace gtplan
