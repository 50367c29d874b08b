#include "gtplan/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gtplan/errors.hpp"
#include "gtplan/rng.hpp"
#include "json_util.hpp"

namespace gtplan {

int ActionSet::nearest_index(double a) const {
  int best = 0;
  double best_d = std::abs(accelerations[0] - a);
  for (std::size_t i = 1; i < accelerations.size(); ++i) {
    const double d = std::abs(accelerations[i] - a);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

void ActionSet::validate() const {
  if (accelerations.empty()) throw ParseError("actions: must be non-empty");
  bool has_zero = false;
  for (std::size_t i = 0; i < accelerations.size(); ++i) {
    if (accelerations[i] == 0.0) has_zero = true;
    if (i > 0 && accelerations[i] <= accelerations[i - 1]) {
      throw ParseError("actions: must be strictly increasing");
    }
  }
  if (!has_zero) throw ParseError("actions: must contain 0");
}

namespace {

void validate_path(const PathDesc& p, const char* name) {
  if (p.l_ref <= 0.0) throw ParseError(std::string(name) + ".l_ref: must be > 0");
  if (p.v_max <= 0.0) throw ParseError(std::string(name) + ".v_max: must be > 0");
  if (!(0.0 <= p.s_in && p.s_in < p.s_out && p.s_out <= p.l_ref)) {
    throw ParseError(std::string(name) +
                     ".conflict: requires 0 <= s_in < s_out <= l_ref");
  }
}

void validate_agent(const AgentState& a, const PathDesc& p, const char* name) {
  if (a.s < 0.0 || a.s > p.l_ref) {
    throw ParseError(std::string(name) + ".s: outside [0, l_ref]");
  }
  if (a.v < 0.0 || a.v > p.v_max) {
    throw ParseError(std::string(name) + ".v: outside [0, v_max]");
  }
}

}  // namespace

void Scenario::validate() const {
  if (dt <= 0.0) throw ParseError("dt: must be > 0");
  if (horizon < 1) throw ParseError("horizon: must be >= 1");
  if (jerk_comfort <= 0.0) throw ParseError("jerk_comfort: must be > 0");
  actions.validate();
  validate_path(ego_path, "ego_path");
  validate_path(opp_path, "opp_path");
  if (vehicle.front_len < 0.0 || vehicle.rear_len < 0.0) {
    throw ParseError("vehicle: lengths must be >= 0");
  }
  validate_agent(init.ego, ego_path, "init.ego");
  validate_agent(init.opp, opp_path, "init.opp");
}

AgentState step_dynamics(const AgentState& state, double accel, double dt,
                         const PathDesc& path) {
  AgentState next;
  next.v = std::clamp(state.v + accel * dt, 0.0, path.v_max);
  const double s_kin = state.s + state.v * dt + 0.5 * accel * dt * dt;
  next.s = std::clamp(s_kin, state.s, path.l_ref);
  return next;
}

std::vector<JointState> rollout_joint(const JointState& x0,
                                      std::span<const double> u_ego,
                                      std::span<const double> u_opp,
                                      const Scenario& scenario) {
  if (u_ego.size() != u_opp.size()) {
    throw std::invalid_argument("rollout_joint: action sequence lengths differ");
  }
  std::vector<JointState> out;
  out.reserve(u_ego.size());
  JointState cur = x0;
  for (std::size_t k = 0; k < u_ego.size(); ++k) {
    cur.ego = step_dynamics(cur.ego, u_ego[k], scenario.dt, scenario.ego_path);
    cur.opp = step_dynamics(cur.opp, u_opp[k], scenario.dt, scenario.opp_path);
    cur.t += 1;
    out.push_back(cur);
  }
  return out;
}

bool agent_in_conflict(const AgentState& state, const PathDesc& path,
                       const VehicleGeom& vehicle) {
  // Open interval at both boundaries: touching the entry does not count.
  return state.s + vehicle.front_len > path.s_in &&
         state.s - vehicle.rear_len < path.s_out;
}

bool unsafe_state(const JointState& state, const Scenario& scenario) {
  const auto out_of_bounds = [](const AgentState& a, const PathDesc& p) {
    return a.s < 0.0 || a.s > p.l_ref || a.v < 0.0 || a.v > p.v_max;
  };
  if (out_of_bounds(state.ego, scenario.ego_path) ||
      out_of_bounds(state.opp, scenario.opp_path)) {
    return true;
  }
  return agent_in_conflict(state.ego, scenario.ego_path, scenario.vehicle) &&
         agent_in_conflict(state.opp, scenario.opp_path, scenario.vehicle);
}

bool is_unsafe(std::span<const JointState> trajectory, const Scenario& scenario) {
  for (const JointState& x : trajectory) {
    if (unsafe_state(x, scenario)) return true;
  }
  return false;
}

// --- JSON -------------------------------------------------------------

namespace {

PathDesc path_from_json(const json& j, const std::string& ctx) {
  PathDesc p;
  p.l_ref = get_num(j, "l_ref", ctx);
  p.v_max = get_num(j, "v_max", ctx);
  const json& c = get_field(j, "conflict", ctx);
  if (!c.is_array() || c.size() != 2) {
    throw ParseError(ctx + ".conflict: expected [s_in, s_out]");
  }
  p.s_in = c[0].get<double>();
  p.s_out = c[1].get<double>();
  return p;
}

json path_to_json(const PathDesc& p) {
  return json{{"l_ref", p.l_ref}, {"v_max", p.v_max}, {"conflict", {p.s_in, p.s_out}}};
}

AgentState agent_from_json(const json& j, const std::string& ctx) {
  AgentState a;
  a.s = get_num(j, "s", ctx);
  a.v = get_num(j, "v", ctx);
  return a;
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  const json j = parse_json(text, "scenario");
  Scenario sc;
  sc.version = static_cast<int>(get_num(j, "version", "scenario"));
  sc.dt = get_num(j, "dt", "scenario");
  sc.horizon = static_cast<int>(get_num(j, "horizon", "scenario"));
  sc.jerk_comfort = get_num(j, "jerk_comfort", "scenario");
  sc.actions.accelerations =
      get_field(j, "actions", "scenario").get<std::vector<double>>();
  sc.ego_path = path_from_json(get_field(j, "ego_path", "scenario"), "ego_path");
  sc.opp_path = path_from_json(get_field(j, "opp_path", "scenario"), "opp_path");
  if (j.contains("vehicle")) {
    sc.vehicle.front_len = get_num(j["vehicle"], "front_len", "vehicle");
    sc.vehicle.rear_len = get_num(j["vehicle"], "rear_len", "vehicle");
  }
  const json& init = get_field(j, "init", "scenario");
  sc.init.ego = agent_from_json(get_field(init, "ego", "init"), "init.ego");
  sc.init.opp = agent_from_json(get_field(init, "opp", "init"), "init.opp");
  sc.init.t = 0;
  sc.validate();
  return sc;
}

std::string scenario_to_json(const Scenario& sc) {
  ordered_json j;
  j["version"] = sc.version;
  j["dt"] = sc.dt;
  j["horizon"] = sc.horizon;
  j["jerk_comfort"] = sc.jerk_comfort;
  j["actions"] = sc.actions.accelerations;
  j["ego_path"] = path_to_json(sc.ego_path);
  j["opp_path"] = path_to_json(sc.opp_path);
  j["vehicle"] = {{"front_len", sc.vehicle.front_len}, {"rear_len", sc.vehicle.rear_len}};
  j["init"] = {{"ego", {{"s", sc.init.ego.s}, {"v", sc.init.ego.v}}},
               {"opp", {{"s", sc.init.opp.s}, {"v", sc.init.opp.v}}}};
  return j.dump(2) + "\n";
}

Scenario load_scenario(const std::string& path) {
  return scenario_from_json(read_file(path));
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  write_file(path, scenario_to_json(scenario));
}

// --- synthetic generator ----------------------------------------------

SyntheticScenario make_synthetic_scenario(std::uint64_t seed,
                                          const SyntheticKnobs& knobs) {
  Rng rng(Rng::derive(seed, Rng::stream_id("synthetic-scenario", 0)));
  SyntheticScenario out;
  Scenario& sc = out.scenario;
  sc.dt = knobs.dt;
  sc.horizon = knobs.horizon;
  sc.jerk_comfort = knobs.jerk_comfort;
  sc.actions.accelerations = knobs.actions;
  sc.actions.validate();

  const auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * rng.uniform_real();
  };

  const double a_max = sc.actions.accelerations.back();
  const double T = sc.dt * sc.horizon;

  const auto make_side = [&](PathDesc& path, AgentState& init) {
    path.v_max = uni(knobs.v_max_lo, knobs.v_max_hi);
    init.v = uni(knobs.init_speed_lo, std::min(knobs.init_speed_hi, path.v_max));
    init.s = 10.0;
    const double half = uni(knobs.zone_half_lo, knobs.zone_half_hi);
    const double nominal = std::max(init.v * T, 1.0);
    double approach = uni(knobs.approach_lo, knobs.approach_hi) * nominal;
    // Keep the entry reachable at full acceleration within the horizon.
    double reach = 0.0;
    AgentState probe = init;
    PathDesc wide = {1e9, path.v_max, 0.0, 1e9};
    for (int k = 0; k < sc.horizon; ++k) {
      probe = step_dynamics(probe, a_max, sc.dt, wide);
    }
    reach = probe.s - init.s;
    approach = std::min(approach, 0.9 * reach);
    path.s_in = init.s + sc.vehicle.front_len + approach;
    path.s_out = path.s_in + 2.0 * half;
    path.l_ref = path.s_out + std::max(40.0, init.v * T);
  };

  make_side(sc.ego_path, sc.init.ego);
  make_side(sc.opp_path, sc.init.opp);
  sc.init.t = 0;
  sc.validate();

  // Feasible opponent intent that reaches the conflict zone in-horizon:
  // sample jerk-bounded random sequences, fall back to full throttle.
  const auto reaches_zone = [&](const std::vector<double>& actions,
                                std::vector<AgentState>& states) {
    states.clear();
    AgentState cur = sc.init.opp;
    bool reached = false;
    for (double a : actions) {
      cur = step_dynamics(cur, a, sc.dt, sc.opp_path);
      states.push_back(cur);
      if (cur.s + sc.vehicle.front_len > sc.opp_path.s_in) reached = true;
    }
    return reached;
  };

  std::vector<double> actions(sc.horizon);
  std::vector<AgentState> states;
  bool ok = false;
  for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
    double prev = 0.0;
    for (int k = 0; k < sc.horizon; ++k) {
      std::vector<int> feasible;
      for (std::size_t i = 0; i < sc.actions.size(); ++i) {
        if (std::abs(sc.actions[i] - prev) <= sc.jerk_comfort) {
          feasible.push_back(static_cast<int>(i));
        }
      }
      const int pick = feasible[static_cast<std::size_t>(
          rng.uniform_int(static_cast<int>(feasible.size())))];
      actions[static_cast<std::size_t>(k)] = sc.actions[static_cast<std::size_t>(pick)];
      prev = sc.actions[static_cast<std::size_t>(pick)];
    }
    ok = reaches_zone(actions, states);
  }
  if (!ok) {
    std::fill(actions.begin(), actions.end(), a_max);
    reaches_zone(actions, states);
  }
  out.gt_opp_actions = actions;
  out.gt_opp_states = states;

  // Post-check: the intent alone, against a stationary ego, is collision
  // free (the ego starts outside its conflict interval).
  std::vector<JointState> paired;
  JointState x = sc.init;
  for (const AgentState& o : states) {
    x.opp = o;
    x.t += 1;
    paired.push_back(x);
  }
  if (is_unsafe(paired, sc)) {
    throw std::logic_error("synthetic generator produced an unsafe intent");
  }
  return out;
}

}  // namespace gtplan
