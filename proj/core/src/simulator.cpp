#include "gtplan/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "gtplan/errors.hpp"
#include "gtplan/rng.hpp"
#include "json_util.hpp"

namespace gtplan {

void SimConfig::validate() const {
  scenario.validate();
  if (dt_sim <= 0.0) throw ParseError("dt_sim: must be > 0");
  if (duration < 0.0) throw ParseError("duration: must be >= 0");
  if (replan_stride < 1) throw ParseError("replan_stride: must be >= 1");
  const double ratio = scenario.dt / dt_sim;
  if (std::abs(ratio - std::round(ratio)) > 1e-9) {
    throw ParseError("dt_sim: must divide the planning step");
  }
  if (belief_samples < 2) throw ParseError("belief.samples: must be >= 2");
  if (window < 1) throw ParseError("belief.window: must be >= 1");
  if (pred_sigma < 0.0) throw ParseError("prediction.sigma: must be >= 0");
  if (pred_count < 1) throw ParseError("prediction.count: must be >= 1");
  if (pred_rho <= 0.0) throw ParseError("prediction.rho: must be > 0");
  ego_params.validate();
  opp_params.validate();
  search.validate();
}

int SimConfig::planning_stride() const {
  return static_cast<int>(std::llround(scenario.dt / dt_sim));
}

namespace {

Scenario swap_roles(const Scenario& sc) {
  Scenario out = sc;
  std::swap(out.ego_path, out.opp_path);
  std::swap(out.init.ego, out.init.opp);
  return out;
}

JointState swap_state(const JointState& x) {
  JointState out = x;
  std::swap(out.ego, out.opp);
  return out;
}

/// Constant-speed intent: the agent holds its current velocity, clamped by
/// its path. Regenerated from the live state at every replan so predictions
/// track the actual behavior.
std::vector<double> intent_positions(const AgentState& state, const PathDesc& path,
                                     double dt, int horizon) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon));
  AgentState cur = state;
  for (int k = 0; k < horizon; ++k) {
    cur = step_dynamics(cur, 0.0, dt, path);
    out.push_back(cur.s);
  }
  return out;
}

bool cleared_exit(const AgentState& a, const PathDesc& p, const VehicleGeom& veh) {
  return a.s - veh.rear_len > p.s_out;
}

int argmax_probability(const PredictionSet& preds) {
  int best = 0;
  for (std::size_t i = 1; i < preds.trajectories.size(); ++i) {
    if (preds.trajectories[i].probability >
        preds.trajectories[static_cast<std::size_t>(best)].probability) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace

SimTrace run_closed_loop(const SimConfig& config) {
  config.validate();
  const Scenario& sc = config.scenario;
  const Scenario swapped = swap_roles(sc);
  const int pstride = config.planning_stride();
  const long long total = std::llround(config.duration / config.dt_sim);

  SimTrace trace;
  JointState cur = sc.init;
  cur.t = 0;
  double a_ego = 0.0, a_opp = 0.0;
  double prev_ego = config.search.prev_accel_ego;
  double prev_opp = config.search.prev_accel_opp;

  Belief ego_belief = Belief::uniform_grid(config.belief_samples);
  Belief opp_belief = Belief::uniform_grid(config.belief_samples);
  double gamma_hat = ego_belief.mean();
  double gamma_hat_of_ego = opp_belief.mean();

  std::vector<JointState> plan_states;
  plan_states.push_back(cur);

  for (long long k = 0; k < total; ++k) {
    if (k % config.replan_stride == 0) {
      // Ego plans with the inferred opponent preference.
      RewardModel ego_model{config.ego_params, config.opp_params};
      if (config.inference != InferenceMode::kOff) {
        ego_model.opp.gamma = gamma_hat;
      }
      SearchConfig ego_cfg = config.search;
      ego_cfg.seed = Rng::derive(config.seed, Rng::stream_id("sim-ego-search",
                                                             static_cast<std::uint64_t>(k)));
      ego_cfg.prev_accel_ego = prev_ego;
      ego_cfg.prev_accel_opp = prev_opp;
      ego_cfg.stats_stride = 0;
      const PredictionSet ego_preds = synthetic_predict(
          intent_positions(cur.opp, sc.opp_path, sc.dt, sc.horizon),
          config.pred_sigma, config.pred_count, {},
          Rng::derive(config.seed,
                      Rng::stream_id("sim-ego-preds", static_cast<std::uint64_t>(k))),
          config.pred_rho);

      // Opponent plans symmetrically with the ego's true parameters (or its
      // own estimate of them in symmetric-inference mode).
      RewardModel opp_model{config.opp_params, config.ego_params};
      if (config.inference == InferenceMode::kBoth) {
        opp_model.opp.gamma = gamma_hat_of_ego;
      }
      SearchConfig opp_cfg = config.search;
      opp_cfg.seed = Rng::derive(config.seed, Rng::stream_id("sim-opp-search",
                                                             static_cast<std::uint64_t>(k)));
      opp_cfg.prev_accel_ego = prev_opp;
      opp_cfg.prev_accel_opp = prev_ego;
      opp_cfg.stats_stride = 0;
      const PredictionSet opp_preds = synthetic_predict(
          intent_positions(cur.ego, sc.ego_path, sc.dt, sc.horizon),
          config.pred_sigma, config.pred_count, {},
          Rng::derive(config.seed,
                      Rng::stream_id("sim-opp-preds", static_cast<std::uint64_t>(k))),
          config.pred_rho);

      JointState x0 = cur;
      x0.t = 0;
      try {
        SearchOutcome ego_out = search(x0, &ego_preds, sc, ego_model, ego_cfg);
        PlanResult ego_plan = extract_plan(*ego_out.root, sc);

        SearchOutcome opp_out =
            search(swap_state(x0), &opp_preds, swapped, opp_model, opp_cfg);
        PlanResult opp_plan = extract_plan(*opp_out.root, swapped);

        a_ego = ego_plan.ego_actions.front();
        a_opp = opp_plan.ego_actions.front();

        PlanSnapshot es;
        es.sim_index = static_cast<int>(k);
        es.time = static_cast<double>(k) * config.dt_sim;
        for (const JointState& x : ego_plan.trajectory) {
          es.other_branch_s.push_back(x.opp.s);
        }
        es.predicted_other_s =
            ego_preds.trajectories[static_cast<std::size_t>(argmax_probability(ego_preds))]
                .points;
        es.plan = std::move(ego_plan);
        trace.ego_plans.push_back(std::move(es));

        PlanSnapshot os;
        os.sim_index = static_cast<int>(k);
        os.time = static_cast<double>(k) * config.dt_sim;
        for (const JointState& x : opp_plan.trajectory) {
          os.other_branch_s.push_back(x.opp.s);
        }
        os.predicted_other_s =
            opp_preds.trajectories[static_cast<std::size_t>(argmax_probability(opp_preds))]
                .points;
        os.plan = std::move(opp_plan);
        trace.opp_plans.push_back(std::move(os));
      } catch (const RefusePlanError& e) {
        trace.failure = e.what();
        break;
      }
      prev_ego = a_ego;
      prev_opp = a_opp;
    }

    trace.steps.push_back(
        {static_cast<double>(k) * config.dt_sim, cur, a_ego, a_opp, gamma_hat});
    cur.ego = step_dynamics(cur.ego, a_ego, config.dt_sim, sc.ego_path);
    cur.opp = step_dynamics(cur.opp, a_opp, config.dt_sim, sc.opp_path);
    cur.t += 1;

    if ((k + 1) % pstride == 0) {
      plan_states.push_back(cur);
      if (config.inference != InferenceMode::kOff &&
          static_cast<int>(plan_states.size()) >= config.window + 1) {
        const std::span<const JointState> tail(
            plan_states.data() + plan_states.size() - (config.window + 1),
            static_cast<std::size_t>(config.window + 1));
        const ObservationWindow w = make_window(tail, sc);
        const BeliefUpdate up =
            update_belief(ego_belief, w, config.opp_params, sc, config.softmax_cap);
        ego_belief = up.belief;
        gamma_hat = up.gamma_hat;
        const double now = static_cast<double>(k + 1) * config.dt_sim;
        trace.belief.push_back({now, gamma_hat, ego_belief.entropy(),
                                now - config.window * sc.dt, now});
        if (config.inference == InferenceMode::kBoth) {
          std::vector<JointState> swapped_tail(tail.begin(), tail.end());
          for (JointState& x : swapped_tail) x = swap_state(x);
          const ObservationWindow ws = make_window(swapped_tail, swapped);
          const BeliefUpdate ups = update_belief(opp_belief, ws, config.ego_params,
                                                 swapped, config.softmax_cap);
          opp_belief = ups.belief;
          gamma_hat_of_ego = ups.gamma_hat;
        }
      }
    }

    if (cleared_exit(cur.ego, sc.ego_path, sc.vehicle) &&
        cleared_exit(cur.opp, sc.opp_path, sc.vehicle)) {
      break;
    }
  }

  trace.final_state = cur;
  return trace;
}

std::vector<double> inferred_opponent_trajectory(const SimTrace& trace,
                                                 int replan_index) {
  if (replan_index < 0 ||
      replan_index >= static_cast<int>(trace.ego_plans.size())) {
    throw std::invalid_argument("inferred_opponent_trajectory: index out of range");
  }
  return trace.ego_plans[static_cast<std::size_t>(replan_index)].other_branch_s;
}

namespace {

double clearance(const AgentState& a, const PathDesc& p, const VehicleGeom& veh) {
  if (a.s + veh.front_len <= p.s_in) return p.s_in - (a.s + veh.front_len);
  if (a.s - veh.rear_len >= p.s_out) return (a.s - veh.rear_len) - p.s_out;
  return 0.0;
}

}  // namespace

SimMetrics metrics(const SimTrace& trace, const SimConfig& config) {
  SimMetrics m;
  if (trace.empty()) return m;
  const Scenario& sc = config.scenario;
  const double mid_ego = 0.5 * (sc.ego_path.s_in + sc.ego_path.s_out);
  const double mid_opp = 0.5 * (sc.opp_path.s_in + sc.opp_path.s_out);

  m.min_gap = 1e300;
  const auto consider = [&](const JointState& x, double time) {
    if (unsafe_state(x, sc)) m.collision = true;
    m.min_gap = std::min(m.min_gap, clearance(x.ego, sc.ego_path, sc.vehicle) +
                                        clearance(x.opp, sc.opp_path, sc.vehicle));
    if (m.cross_time_ego < 0.0 && x.ego.s > mid_ego) m.cross_time_ego = time;
    if (m.cross_time_opp < 0.0 && x.opp.s > mid_opp) m.cross_time_opp = time;
  };
  for (const SimStep& st : trace.steps) consider(st.state, st.time);
  consider(trace.final_state,
           trace.steps.back().time + config.dt_sim);

  if (m.cross_time_ego >= 0.0 &&
      (m.cross_time_opp < 0.0 || m.cross_time_ego <= m.cross_time_opp)) {
    m.order = CrossingOrder::kEgoFirst;
  } else if (m.cross_time_opp >= 0.0) {
    m.order = CrossingOrder::kOppFirst;
  }

  // Cumulative egoism at planning-step granularity, each agent under its own
  // true parameters.
  const int pstride = config.planning_stride();
  const auto state_at = [&](std::size_t idx) -> const JointState& {
    return idx < trace.steps.size() ? trace.steps[idx].state : trace.final_state;
  };
  for (std::size_t j = 0; j + pstride <= trace.steps.size();
       j += static_cast<std::size_t>(pstride)) {
    const JointState& a = state_at(j);
    const JointState& b = state_at(j + static_cast<std::size_t>(pstride));
    const double ae = (b.ego.v - a.ego.v) / sc.dt;
    const double ao = (b.opp.v - a.opp.v) / sc.dt;
    const RewardParams& pe = config.ego_params;
    const RewardParams& po = config.opp_params;
    m.cum_egoism_ego += pe.theta_comfort * std::exp(-pe.alpha * ae * ae) +
                        pe.theta_efficiency *
                            (1.0 - std::exp(-pe.beta * b.ego.v * b.ego.v));
    m.cum_egoism_opp += po.theta_comfort * std::exp(-po.alpha * ao * ao) +
                        po.theta_efficiency *
                            (1.0 - std::exp(-po.beta * b.opp.v * b.opp.v));
  }

  if (config.inference != InferenceMode::kOff) {
    for (const BeliefSample& b : trace.belief) {
      if (std::abs(b.gamma_hat - config.opp_params.gamma) <= 0.1) {
        m.gamma_convergence_step =
            static_cast<int>(std::llround(b.time / sc.dt));
        break;
      }
    }
  }
  return m;
}

// --- files --------------------------------------------------------------

void write_trace(const SimTrace& trace, const std::string& path) {
  std::ostringstream out;
  out << "t\ts_ego\tv_ego\ta_ego\ts_opp\tv_opp\ta_opp\tgamma_hat\n";
  const auto row = [&](double t, const JointState& x, double ae, double ao,
                       double gh) {
    out << format_double(t) << '\t' << format_double(x.ego.s) << '\t'
        << format_double(x.ego.v) << '\t' << format_double(ae) << '\t'
        << format_double(x.opp.s) << '\t' << format_double(x.opp.v) << '\t'
        << format_double(ao) << '\t' << format_double(gh) << '\n';
  };
  for (const SimStep& st : trace.steps) {
    row(st.time, st.state, st.a_ego, st.a_opp, st.gamma_hat);
  }
  if (!trace.steps.empty()) {
    row(trace.steps.back().time + (trace.steps.size() > 1
                                       ? trace.steps[1].time - trace.steps[0].time
                                       : 0.0),
        trace.final_state, 0.0, 0.0, trace.steps.back().gamma_hat);
  }
  write_file(path, out.str());
}

std::vector<JointState> read_trace_states(const std::string& path,
                                          const Scenario& scenario,
                                          double dt_sim) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("trace: empty file");
  std::vector<JointState> all;
  int t_index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    JointState x;
    double t = 0.0, ae = 0.0, ao = 0.0, gh = 0.0;
    if (std::sscanf(line.c_str(), "%lf %lf %lf %lf %lf %lf %lf %lf", &t, &x.ego.s,
                    &x.ego.v, &ae, &x.opp.s, &x.opp.v, &ao, &gh) != 8) {
      throw ParseError("trace: malformed row: " + line);
    }
    x.t = t_index++;
    all.push_back(x);
  }
  const int pstride =
      static_cast<int>(std::llround(scenario.dt / dt_sim));
  std::vector<JointState> out;
  for (std::size_t i = 0; i < all.size(); i += static_cast<std::size_t>(pstride)) {
    out.push_back(all[i]);
  }
  return out;
}

void write_belief_trace(const SimTrace& trace, const std::string& path) {
  std::ostringstream out;
  out << "sim_time\tgamma_hat\tweight_entropy\twindow_start\twindow_end\n";
  for (const BeliefSample& b : trace.belief) {
    out << format_double(b.time) << '\t' << format_double(b.gamma_hat) << '\t'
        << format_double(b.entropy) << '\t' << format_double(b.window_start)
        << '\t' << format_double(b.window_end) << '\n';
  }
  write_file(path, out.str());
}

std::string metrics_to_json(const SimMetrics& m, const SimTrace& trace) {
  ordered_json j;
  if (trace.empty()) {
    j["steps"] = 0;
    j["crossing_order"] = nullptr;
    j["cross_time_ego"] = nullptr;
    j["cross_time_opp"] = nullptr;
    j["min_gap"] = nullptr;
    j["cum_egoism_ego"] = nullptr;
    j["cum_egoism_opp"] = nullptr;
    j["gamma_convergence_step"] = nullptr;
    j["collision"] = nullptr;
    j["failure"] = trace.failure.empty() ? json() : json(trace.failure);
    return j.dump(2) + "\n";
  }
  j["steps"] = trace.steps.size();
  switch (m.order) {
    case CrossingOrder::kEgoFirst: j["crossing_order"] = "ego_first"; break;
    case CrossingOrder::kOppFirst: j["crossing_order"] = "opp_first"; break;
    case CrossingOrder::kNone: j["crossing_order"] = "none"; break;
  }
  j["cross_time_ego"] = m.cross_time_ego;
  j["cross_time_opp"] = m.cross_time_opp;
  j["min_gap"] = m.min_gap;
  j["cum_egoism_ego"] = m.cum_egoism_ego;
  j["cum_egoism_opp"] = m.cum_egoism_opp;
  j["gamma_convergence_step"] = m.gamma_convergence_step;
  j["collision"] = m.collision;
  j["failure"] = trace.failure.empty() ? json() : json(trace.failure);
  return j.dump(2) + "\n";
}

void write_plan_snapshots(const SimTrace& trace, const std::string& path) {
  std::ostringstream out;
  const auto dump = [&](const PlanSnapshot& p, const char* who) {
    ordered_json j;
    j["time"] = p.time;
    j["agent"] = who;
    j["u_self"] = p.plan.ego_actions;
    j["u_other"] = p.plan.opp_actions;
    j["reward_self"] = p.plan.reward_ego;
    j["reward_other"] = p.plan.reward_opp;
    j["other_branch_s"] = p.other_branch_s;
    j["predicted_other_s"] = p.predicted_other_s;
    out << j.dump() << '\n';
  };
  std::size_t ei = 0, oi = 0;
  while (ei < trace.ego_plans.size() || oi < trace.opp_plans.size()) {
    if (oi >= trace.opp_plans.size() ||
        (ei < trace.ego_plans.size() &&
         trace.ego_plans[ei].sim_index <= trace.opp_plans[oi].sim_index)) {
      dump(trace.ego_plans[ei++], "ego");
    } else {
      dump(trace.opp_plans[oi++], "opp");
    }
  }
  write_file(path, out.str());
}

// --- config -------------------------------------------------------------

namespace {

RewardParams reward_params_from_jobj(const json& j, const std::string& ctx) {
  RewardParams p;
  p.gamma = get_num(j, "gamma", ctx);
  const json& theta = get_field(j, "theta", ctx);
  if (!theta.is_array() || theta.size() != 2) {
    throw ParseError(ctx + ".theta: expected [comfort, efficiency]");
  }
  p.theta_comfort = theta[0].get<double>();
  p.theta_efficiency = theta[1].get<double>();
  p.alpha = get_num(j, "alpha", ctx);
  p.beta = get_num(j, "beta", ctx);
  p.validate();
  return p;
}

SearchConfig search_config_from_jobj(const json& j, const std::string& ctx) {
  SearchConfig c;
  c.max_iterations = static_cast<long long>(get_num(j, "iterations", ctx));
  if (j.contains("exploration_c")) c.exploration_c = get_num(j, "exploration_c", ctx);
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("heuristic")) {
    const std::string h = j["heuristic"].get<std::string>();
    if (h != "on" && h != "off") throw ParseError(ctx + ".heuristic: expected on|off");
    c.heuristic = h == "on";
  }
  if (j.contains("rollout")) {
    const std::string r = j["rollout"].get<std::string>();
    if (r == "heuristic") {
      c.rollout = RolloutPolicy::kHeuristic;
    } else if (r == "uniform") {
      c.rollout = RolloutPolicy::kUniform;
    } else {
      throw ParseError(ctx + ".rollout: expected heuristic|uniform");
    }
  } else if (!c.heuristic) {
    c.rollout = RolloutPolicy::kUniform;
  }
  if (j.contains("stats_stride")) {
    c.stats_stride = static_cast<int>(get_num(j, "stats_stride", ctx));
  }
  if (j.contains("rollout_retries")) {
    c.rollout_retries = static_cast<int>(get_num(j, "rollout_retries", ctx));
  }
  if (j.contains("weight_all_nodes")) {
    c.weight_all_nodes = j["weight_all_nodes"].get<bool>();
  }
  c.validate();
  return c;
}

}  // namespace

SimConfig sim_config_from_json(const std::string& text, const std::string& base_dir) {
  const json j = parse_json(text, "sim_config");
  SimConfig c;
  const json& sc = get_field(j, "scenario", "sim_config");
  if (sc.is_string()) {
    const std::filesystem::path p(sc.get<std::string>());
    const std::filesystem::path resolved =
        p.is_absolute() ? p : std::filesystem::path(base_dir) / p;
    c.scenario = load_scenario(resolved.string());
  } else {
    c.scenario = scenario_from_json(sc.dump());
  }
  c.dt_sim = get_num(j, "dt_sim", "sim_config");
  c.duration = get_num(j, "duration", "sim_config");
  if (j.contains("replan_stride")) {
    c.replan_stride = static_cast<int>(get_num(j, "replan_stride", "sim_config"));
  }
  c.ego_params = reward_params_from_jobj(get_field(j, "ego_params", "sim_config"),
                                         "ego_params");
  c.opp_params = reward_params_from_jobj(get_field(j, "opp_params", "sim_config"),
                                         "opp_params");
  if (j.contains("inference")) {
    const std::string mode = j["inference"].get<std::string>();
    if (mode == "off") {
      c.inference = InferenceMode::kOff;
    } else if (mode == "ego") {
      c.inference = InferenceMode::kEgo;
    } else if (mode == "both") {
      c.inference = InferenceMode::kBoth;
    } else {
      throw ParseError("sim_config.inference: expected off|ego|both");
    }
  }
  if (j.contains("belief")) {
    const json& b = j["belief"];
    if (b.contains("samples")) c.belief_samples = static_cast<int>(get_num(b, "samples", "belief"));
    if (b.contains("window")) c.window = static_cast<int>(get_num(b, "window", "belief"));
    if (b.contains("cap")) c.softmax_cap = static_cast<long long>(get_num(b, "cap", "belief"));
  }
  if (j.contains("prediction")) {
    const json& p = j["prediction"];
    if (p.contains("sigma")) c.pred_sigma = get_num(p, "sigma", "prediction");
    if (p.contains("count")) c.pred_count = static_cast<int>(get_num(p, "count", "prediction"));
    if (p.contains("rho")) c.pred_rho = get_num(p, "rho", "prediction");
  }
  c.search = search_config_from_jobj(get_field(j, "search", "sim_config"), "search");
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  c.validate();
  return c;
}

SimConfig load_sim_config(const std::string& path) {
  const std::filesystem::path p(path);
  return sim_config_from_json(read_file(path), p.parent_path().string());
}

RewardParams reward_params_from_json(const std::string& text) {
  return reward_params_from_jobj(parse_json(text, "reward_params"), "reward_params");
}

RewardModel reward_model_from_scenario_json(const std::string& text) {
  const json j = parse_json(text, "scenario");
  RewardModel rm;
  if (j.contains("rewards")) {
    const json& r = j["rewards"];
    if (r.contains("ego")) rm.ego = reward_params_from_jobj(r["ego"], "rewards.ego");
    if (r.contains("opp")) rm.opp = reward_params_from_jobj(r["opp"], "rewards.opp");
  }
  return rm;
}

}  // namespace gtplan
