#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gtplan {

/// Longitudinal state of one agent along its reference path.
struct AgentState {
  double s = 0.0;  // position along the path [m]
  double v = 0.0;  // speed [m/s]
};

/// Joint state of both agents at a planning step.
struct JointState {
  AgentState ego;
  AgentState opp;
  int t = 0;  // step index
};

/// Reference-path descriptor. The conflict interval [s_in, s_out] is the
/// stretch of this path that overlaps the other agent's path around the
/// interaction point.
struct PathDesc {
  double l_ref = 0.0;
  double v_max = 0.0;
  double s_in = 0.0;
  double s_out = 0.0;
};

/// Occupancy extent of a vehicle around its reference position.
struct VehicleGeom {
  double front_len = 2.0;
  double rear_len = 2.0;
};

/// Discrete longitudinal acceleration choices, strictly increasing,
/// containing zero.
struct ActionSet {
  std::vector<double> accelerations;

  std::size_t size() const { return accelerations.size(); }
  double operator[](std::size_t i) const { return accelerations[i]; }
  /// Index of the element closest to a; ties resolve to the lower index.
  int nearest_index(double a) const;
  void validate() const;
};

struct Scenario {
  int version = 1;
  double dt = 0.5;          // planning step [s]
  int horizon = 5;          // planning steps
  double jerk_comfort = 2.0;  // max |a_{t+1} - a_t| during roll-outs [m/s^2]
  ActionSet actions;
  PathDesc ego_path;
  PathDesc opp_path;
  VehicleGeom vehicle;
  JointState init;

  void validate() const;
};

/// One forward Euler step of the longitudinal kinematics. Total by clamping:
/// speed clamps to [0, v_max], position advances with the pre-clamp speed and
/// clamps to [s, l_ref] (no backward motion).
AgentState step_dynamics(const AgentState& state, double accel, double dt,
                         const PathDesc& path);

/// Rolls both agents forward simultaneously. Returns x_1..x_N for N input
/// actions per agent. Throws std::invalid_argument on length mismatch.
std::vector<JointState> rollout_joint(const JointState& x0,
                                      std::span<const double> u_ego,
                                      std::span<const double> u_opp,
                                      const Scenario& scenario);

/// True when the agent's occupancy [s - rear, s + front] overlaps the open
/// conflict interval of its own path.
bool agent_in_conflict(const AgentState& state, const PathDesc& path,
                       const VehicleGeom& vehicle);

/// True when both agents occupy their conflict intervals simultaneously or
/// either state lies outside its path bounds.
bool unsafe_state(const JointState& state, const Scenario& scenario);

/// True when any state of the trajectory is unsafe.
bool is_unsafe(std::span<const JointState> trajectory, const Scenario& scenario);

Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

/// Knobs for the synthetic scenario generator. Ranges are sampled uniformly.
struct SyntheticKnobs {
  double dt = 0.5;
  int horizon = 5;
  std::vector<double> actions = {-3.0, -2.0, -1.0, 0.0, 1.0, 2.0};
  double jerk_comfort = 2.0;
  double v_max_lo = 10.0, v_max_hi = 14.0;
  double init_speed_lo = 4.0, init_speed_hi = 9.0;
  double zone_half_lo = 2.5, zone_half_hi = 5.0;
  // Distance from the initial position to the conflict entry, as a fraction
  // of the distance covered at the initial speed over the full horizon.
  double approach_lo = 0.3, approach_hi = 1.2;
};

struct SyntheticScenario {
  Scenario scenario;
  std::vector<double> gt_opp_actions;   // feasible intent reaching the zone
  std::vector<AgentState> gt_opp_states;  // states after each intent action
};

/// Deterministic synthetic two-path crossing scenario plus a feasible
/// opponent ground-truth trajectory that reaches the conflict zone within
/// the horizon.
SyntheticScenario make_synthetic_scenario(std::uint64_t seed,
                                          const SyntheticKnobs& knobs = {});

}  // namespace gtplan
