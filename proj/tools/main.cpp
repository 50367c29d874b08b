#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gtplan/baselines.hpp"
#include "gtplan/errors.hpp"
#include "gtplan/inference.hpp"
#include "gtplan/prediction.hpp"
#include "gtplan/rng.hpp"
#include "gtplan/scenario.hpp"
#include "gtplan/search.hpp"
#include "gtplan/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 2 config error, 3 infeasible instance, 4 planner
// refusal.
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitRefusal = 4;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gtplan::ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t fnv64(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const ordered_json& config,
                    const std::vector<std::string>& outputs) {
  for (const std::string& o : outputs) {
    if (!fs::exists(out_dir / o)) {
      throw std::runtime_error("manifest output missing: " + o);
    }
  }
  ordered_json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["config"] = config;
  m["config_digest"] = hex64(fnv64(config.dump()));
  m["outputs"] = outputs;
  write_text(out_dir / "manifest.json", m.dump(2) + "\n");
}

/// Synthetic predictions over a constant-speed continuation of the agent the
/// planner predicts (the opponent of the planning agent).
gtplan::PredictionSet cli_predictions(const gtplan::Scenario& sc,
                                      const std::string& pred_file, double sigma,
                                      int count, double rho, std::uint64_t seed) {
  if (!pred_file.empty()) {
    return gtplan::load_predictions(pred_file, sc.horizon);
  }
  std::vector<double> intent;
  gtplan::AgentState cur = sc.init.opp;
  for (int k = 0; k < sc.horizon; ++k) {
    cur = gtplan::step_dynamics(cur, 0.0, sc.dt, sc.opp_path);
    intent.push_back(cur.s);
  }
  return gtplan::synthetic_predict(
      intent, sigma, count, {},
      gtplan::Rng::derive(seed, gtplan::Rng::stream_id("cli-preds", 0)), rho);
}

std::string depth_stats_tsv(const gtplan::SearchStats& st) {
  std::ostringstream out;
  out << "depth\tv_max\tv_other\n";
  for (std::size_t d = 0; d < st.per_depth.size(); ++d) {
    out << (d + 1) << '\t' << st.per_depth[d].v_max << '\t'
        << st.per_depth[d].v_other << '\n';
  }
  return out.str();
}

std::string curve_tsv(const gtplan::SearchStats& st) {
  std::ostringstream out;
  out << "iteration\textracted_reward_ego\textracted_reward_opp\n";
  for (const gtplan::CurvePoint& p : st.curve) {
    out << p.iteration << '\t' << fmt(p.reward_ego) << '\t' << fmt(p.reward_opp)
        << '\n';
  }
  return out.str();
}

std::string plan_json(const gtplan::PlanResult& plan,
                      const gtplan::SearchStats& st) {
  ordered_json j;
  j["ego_actions"] = plan.ego_actions;
  j["opp_actions"] = plan.opp_actions;
  j["reward_ego"] = plan.reward_ego;
  j["reward_opp"] = plan.reward_opp;
  j["max_depth"] = st.max_depth;
  j["node_count"] = st.node_count;
  j["trajectory"] = ordered_json::array();
  for (const gtplan::JointState& x : plan.trajectory) {
    j["trajectory"].push_back(ordered_json{{"t", x.t},
                                           {"s_ego", x.ego.s},
                                           {"v_ego", x.ego.v},
                                           {"s_opp", x.opp.s},
                                           {"v_opp", x.opp.v}});
  }
  return j.dump(2) + "\n";
}

// --- plan ----------------------------------------------------------------

struct PlanArgs {
  std::string scenario_file;
  std::string predictions_file;
  double synthetic_sigma = -1.0;
  int synthetic_count = 3;
  double rho = 4.0;
  long long iterations = 10000;
  double exploration_c = 2.0;
  std::uint64_t seed = 1;
  std::string heuristic = "on";
  std::string rollout;  // empty = follow the heuristic flag
  int stats_stride = 100;
  std::string out_dir = ".";
};

gtplan::SearchConfig to_search_config(const PlanArgs& a) {
  gtplan::SearchConfig cfg;
  cfg.max_iterations = a.iterations;
  cfg.exploration_c = a.exploration_c;
  cfg.seed = a.seed;
  if (a.heuristic != "on" && a.heuristic != "off") {
    throw gtplan::ParseError("--heuristic: expected on|off");
  }
  cfg.heuristic = a.heuristic == "on";
  if (a.rollout.empty()) {
    cfg.rollout = cfg.heuristic ? gtplan::RolloutPolicy::kHeuristic
                                : gtplan::RolloutPolicy::kUniform;
  } else if (a.rollout == "heuristic") {
    cfg.rollout = gtplan::RolloutPolicy::kHeuristic;
  } else if (a.rollout == "uniform") {
    cfg.rollout = gtplan::RolloutPolicy::kUniform;
  } else {
    throw gtplan::ParseError("--rollout: expected heuristic|uniform");
  }
  cfg.stats_stride = a.stats_stride;
  return cfg;
}

ordered_json plan_config_json(const PlanArgs& a) {
  ordered_json c;
  c["scenario"] = a.scenario_file;
  c["predictions"] = a.predictions_file;
  c["synthetic_sigma"] = a.synthetic_sigma;
  c["synthetic_count"] = a.synthetic_count;
  c["rho"] = a.rho;
  c["iterations"] = a.iterations;
  c["exploration_c"] = a.exploration_c;
  c["seed"] = a.seed;
  c["heuristic"] = a.heuristic;
  c["rollout"] = a.rollout;
  c["stats_stride"] = a.stats_stride;
  return c;
}

int cmd_plan(const PlanArgs& a) {
  const std::string text = slurp(a.scenario_file);
  const gtplan::Scenario sc = gtplan::scenario_from_json(text);
  const gtplan::RewardModel rewards = gtplan::reward_model_from_scenario_json(text);
  const gtplan::SearchConfig cfg = to_search_config(a);

  gtplan::PredictionSet preds;
  const gtplan::PredictionSet* preds_ptr = nullptr;
  if (cfg.heuristic || cfg.rollout == gtplan::RolloutPolicy::kHeuristic) {
    if (a.predictions_file.empty() && a.synthetic_sigma < 0.0) {
      throw gtplan::ParseError(
          "plan: --predictions or --synthetic-sigma required with the heuristic on");
    }
    preds = cli_predictions(sc, a.predictions_file, std::max(a.synthetic_sigma, 0.0),
                            a.synthetic_count, a.rho, a.seed);
    preds_ptr = &preds;
  }

  const gtplan::SearchOutcome out = gtplan::search(sc.init, preds_ptr, sc, rewards, cfg);
  const gtplan::PlanResult plan = gtplan::extract_plan(*out.root, sc);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  write_text(dir / "plan.json", plan_json(plan, out.stats));
  write_text(dir / "depth_stats.tsv", depth_stats_tsv(out.stats));
  write_text(dir / "curve.tsv", curve_tsv(out.stats));
  write_manifest(dir, "plan", plan_config_json(a),
                 {"plan.json", "depth_stats.tsv", "curve.tsv"});
  return 0;
}

// --- benchmark -------------------------------------------------------------

struct BenchArgs {
  std::vector<std::string> scenario_files;
  std::vector<std::string> solvers = {"proposed", "general"};
  std::string predictions_file;  // proposed solver; synthetic when empty
  std::string budgets = "2000,5000,10000";
  int seeds = 10;
  std::uint64_t seed_base = 1;
  int jobs = 1;
  double synthetic_sigma = 0.4;
  int synthetic_count = 3;
  double rho = 4.0;
  double exploration_c = 2.0;
  int abr_rounds = 50;
  long long oracle_cap = 1000000;
  std::string out_dir = ".";
};

struct BenchRun {
  std::string solver;
  long long budget = 0;
  std::string scenario;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  gtplan::SolverOutcome outcome;
};

int cmd_benchmark(const BenchArgs& a) {
  if (a.scenario_files.empty()) {
    throw gtplan::ParseError("benchmark: at least one --scenario required");
  }
  if (a.solvers.empty()) {
    throw gtplan::ParseError("benchmark: at least one --solver required");
  }
  std::vector<long long> budgets;
  {
    std::stringstream ss(a.budgets);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) budgets.push_back(std::stoll(tok));
    }
    if (budgets.empty()) throw gtplan::ParseError("benchmark: empty --budgets");
  }

  struct Instance {
    gtplan::Scenario scenario;
    gtplan::RewardModel rewards;
    std::string name;
  };
  std::vector<Instance> instances;
  for (const std::string& f : a.scenario_files) {
    const std::string text = slurp(f);
    instances.push_back({gtplan::scenario_from_json(text),
                         gtplan::reward_model_from_scenario_json(text), f});
  }

  std::vector<BenchRun> runs;
  for (const std::string& solver : a.solvers) {
    for (long long budget : budgets) {
      for (const Instance& inst : instances) {
        for (int s = 0; s < a.seeds; ++s) {
          BenchRun r;
          r.solver = solver;
          r.budget = budget;
          r.scenario = inst.name;
          r.seed = a.seed_base + static_cast<std::uint64_t>(s);
          runs.push_back(std::move(r));
        }
      }
    }
  }

  const auto find_instance = [&](const std::string& name) -> const Instance& {
    for (const Instance& i : instances) {
      if (i.name == name) return i;
    }
    throw std::logic_error("unknown instance");
  };

  const auto execute = [&](BenchRun& r) {
    const Instance& inst = find_instance(r.scenario);
    try {
      gtplan::SearchConfig cfg;
      cfg.max_iterations = r.budget;
      cfg.exploration_c = a.exploration_c;
      cfg.seed = r.seed;
      cfg.stats_stride = 0;
      if (r.solver == "proposed") {
        const gtplan::PredictionSet preds =
            cli_predictions(inst.scenario, a.predictions_file, a.synthetic_sigma,
                            a.synthetic_count, a.rho, r.seed);
        r.outcome = gtplan::mcts_solver(inst.scenario.init, &preds, inst.scenario,
                                        inst.rewards, cfg);
      } else if (r.solver == "general") {
        r.outcome = gtplan::general_mcts(inst.scenario.init, inst.scenario,
                                         inst.rewards, cfg);
      } else if (r.solver == "abr") {
        gtplan::AbrConfig ac;
        ac.max_rounds = a.abr_rounds;
        ac.seed = r.seed;
        r.outcome = gtplan::alternating_best_response(inst.scenario.init,
                                                      inst.scenario, inst.rewards, ac);
      } else if (r.solver == "oracle") {
        r.outcome = gtplan::exhaustive_stackelberg(inst.scenario.init, inst.scenario,
                                                   inst.rewards, a.oracle_cap);
      } else {
        throw gtplan::ParseError("benchmark: unknown solver '" + r.solver + "'");
      }
      r.ok = true;
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
    }
  };

  const int jobs = std::max(1, a.jobs);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (int t = 0; t < jobs; ++t) {
    workers.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= runs.size()) break;
        execute(runs[i]);
      }
    });
  }
  for (std::thread& t : workers) t.join();

  // Per-run detail.
  std::ostringstream detail;
  detail << "solver\tbudget\tscenario\tseed\treward_ego\treward_opp\twall_ms\t"
            "max_depth\tconverged\terror\n";
  for (const BenchRun& r : runs) {
    detail << r.solver << '\t' << r.budget << '\t' << r.scenario << '\t' << r.seed
           << '\t' << fmt(r.outcome.reward_ego) << '\t' << fmt(r.outcome.reward_opp)
           << '\t' << fmt(r.outcome.wall_ms) << '\t' << r.outcome.max_depth << '\t'
           << (r.outcome.converged ? 1 : 0) << '\t' << (r.ok ? "" : r.error) << '\n';
  }

  // One aggregated row per (solver, budget).
  std::ostringstream table;
  table << "solver\tbudget\truns\tfailures\tmean_reward_ego\tstd_reward_ego\t"
           "mean_reward_opp\tmean_wall_ms\tmean_max_depth\n";
  for (const std::string& solver : a.solvers) {
    for (long long budget : budgets) {
      std::vector<const BenchRun*> group;
      int failures = 0;
      for (const BenchRun& r : runs) {
        if (r.solver == solver && r.budget == budget) {
          if (r.ok) {
            group.push_back(&r);
          } else {
            ++failures;
          }
        }
      }
      double mean_e = 0.0, mean_o = 0.0, mean_w = 0.0, mean_d = 0.0;
      for (const BenchRun* r : group) {
        mean_e += r->outcome.reward_ego;
        mean_o += r->outcome.reward_opp;
        mean_w += r->outcome.wall_ms;
        mean_d += r->outcome.max_depth;
      }
      const double n = group.empty() ? 1.0 : static_cast<double>(group.size());
      mean_e /= n;
      mean_o /= n;
      mean_w /= n;
      mean_d /= n;
      double var = 0.0;
      for (const BenchRun* r : group) {
        var += (r->outcome.reward_ego - mean_e) * (r->outcome.reward_ego - mean_e);
      }
      const double sd = group.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
      table << solver << '\t' << budget << '\t' << group.size() << '\t' << failures
            << '\t' << fmt(mean_e) << '\t' << fmt(sd) << '\t' << fmt(mean_o) << '\t'
            << fmt(mean_w) << '\t' << fmt(mean_d) << '\n';
    }
  }

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  write_text(dir / "benchmark.tsv", table.str());
  write_text(dir / "runs.tsv", detail.str());

  ordered_json cfg;
  cfg["scenarios"] = a.scenario_files;
  cfg["solvers"] = a.solvers;
  cfg["budgets"] = a.budgets;
  cfg["seeds"] = a.seeds;
  cfg["seed_base"] = a.seed_base;
  cfg["jobs"] = a.jobs;
  cfg["synthetic_sigma"] = a.synthetic_sigma;
  cfg["synthetic_count"] = a.synthetic_count;
  cfg["rho"] = a.rho;
  cfg["exploration_c"] = a.exploration_c;
  write_manifest(dir, "benchmark", cfg, {"benchmark.tsv", "runs.tsv"});
  return 0;
}

// --- simulate ---------------------------------------------------------------

int cmd_simulate(const std::string& config_file, const std::string& out_dir,
                 std::int64_t seed_override) {
  gtplan::SimConfig cfg = gtplan::load_sim_config(config_file);
  if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
  const gtplan::SimTrace trace = gtplan::run_closed_loop(cfg);
  const gtplan::SimMetrics m = gtplan::metrics(trace, cfg);

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  gtplan::write_trace(trace, (dir / "trace.tsv").string());
  gtplan::write_belief_trace(trace, (dir / "belief.tsv").string());
  gtplan::write_plan_snapshots(trace, (dir / "plans.jsonl").string());
  write_text(dir / "metrics.json", gtplan::metrics_to_json(m, trace));

  ordered_json cj;
  cj["config_file"] = config_file;
  cj["config"] = ordered_json::parse(slurp(config_file));
  cj["seed"] = cfg.seed;
  write_manifest(dir, "simulate", cj,
                 {"trace.tsv", "belief.tsv", "plans.jsonl", "metrics.json"});
  return 0;
}

// --- infer -------------------------------------------------------------------

int cmd_infer(const std::string& trace_file, const std::string& scenario_file,
              const std::string& reward_file, int window, double dt_sim,
              int belief_samples, long long cap, const std::string& out_dir) {
  const gtplan::Scenario sc = gtplan::load_scenario(scenario_file);
  const gtplan::RewardParams opp_base =
      gtplan::reward_params_from_json(slurp(reward_file));
  const std::vector<gtplan::JointState> states =
      gtplan::read_trace_states(trace_file, sc, dt_sim);

  gtplan::Belief belief = gtplan::Belief::uniform_grid(belief_samples);
  std::ostringstream out;
  out << "sim_time\tgamma_hat\tweight_entropy\twindow_start\twindow_end\n";
  for (std::size_t end = static_cast<std::size_t>(window); end < states.size();
       ++end) {
    const std::span<const gtplan::JointState> tail(
        states.data() + end - static_cast<std::size_t>(window),
        static_cast<std::size_t>(window + 1));
    const gtplan::ObservationWindow w = gtplan::make_window(tail, sc);
    const gtplan::BeliefUpdate up = gtplan::update_belief(belief, w, opp_base, sc, cap);
    belief = up.belief;
    const double t_end = static_cast<double>(end) * sc.dt;
    out << fmt(t_end) << '\t' << fmt(up.gamma_hat) << '\t' << fmt(belief.entropy())
        << '\t' << fmt(t_end - window * sc.dt) << '\t' << fmt(t_end) << '\n';
  }

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_text(dir / "belief.tsv", out.str());

  ordered_json cj;
  cj["trace"] = trace_file;
  cj["scenario"] = scenario_file;
  cj["reward"] = reward_file;
  cj["window"] = window;
  cj["dt_sim"] = dt_sim;
  cj["belief_samples"] = belief_samples;
  cj["cap"] = cap;
  write_manifest(dir, "infer", cj, {"belief.tsv"});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Game-theoretic longitudinal trajectory planner"};
  app.require_subcommand(1);

  PlanArgs pa;
  CLI::App* plan = app.add_subcommand("plan", "Single-shot planning");
  plan->add_option("--scenario", pa.scenario_file, "Scenario JSON")->required();
  plan->add_option("--predictions", pa.predictions_file, "Prediction JSON");
  plan->add_option("--synthetic-sigma", pa.synthetic_sigma,
                   "Synthetic prediction noise std [m]");
  plan->add_option("--synthetic-count", pa.synthetic_count,
                   "Synthetic prediction trajectories");
  plan->add_option("--rho", pa.rho, "Confidence range threshold");
  plan->add_option("--iterations", pa.iterations, "Search iterations");
  plan->add_option("--exploration-c", pa.exploration_c, "UCB exploration constant");
  plan->add_option("--seed", pa.seed, "Root seed");
  plan->add_option("--heuristic", pa.heuristic, "on|off");
  plan->add_option("--rollout", pa.rollout, "heuristic|uniform");
  plan->add_option("--stats-stride", pa.stats_stride, "Reward curve cadence");
  plan->add_option("--out-dir", pa.out_dir, "Output directory");

  BenchArgs ba;
  CLI::App* bench = app.add_subcommand("benchmark", "Compare solvers");
  bench->add_option("--scenario", ba.scenario_files, "Scenario JSON (repeatable)")
      ->required();
  bench->add_option("--solver", ba.solvers,
                    "proposed|general|abr|oracle (repeatable)");
  bench->add_option("--predictions", ba.predictions_file,
                    "Prediction JSON for the proposed solver");
  bench->add_option("--budgets", ba.budgets, "Comma-separated iteration budgets");
  bench->add_option("--seeds", ba.seeds, "Seeds per row");
  bench->add_option("--seed-base", ba.seed_base, "First seed");
  bench->add_option("--jobs", ba.jobs, "Concurrent runs");
  bench->add_option("--synthetic-sigma", ba.synthetic_sigma,
                    "Synthetic prediction noise std [m]");
  bench->add_option("--synthetic-count", ba.synthetic_count,
                    "Synthetic prediction trajectories");
  bench->add_option("--rho", ba.rho, "Confidence range threshold");
  bench->add_option("--exploration-c", ba.exploration_c, "UCB exploration constant");
  bench->add_option("--abr-rounds", ba.abr_rounds, "Best-response round cap");
  bench->add_option("--oracle-cap", ba.oracle_cap, "Oracle enumeration cap");
  bench->add_option("--out-dir", ba.out_dir, "Output directory");

  std::string sim_config, sim_out = ".";
  std::int64_t sim_seed = -1;
  CLI::App* sim = app.add_subcommand("simulate", "Closed-loop simulation");
  sim->add_option("--config", sim_config, "Simulation config JSON")->required();
  sim->add_option("--out-dir", sim_out, "Output directory");
  sim->add_option("--seed", sim_seed, "Override the config seed");

  std::string inf_trace, inf_scenario, inf_reward, inf_out = ".";
  int inf_window = 5, inf_samples = 21;
  double inf_dt_sim = 0.1;
  long long inf_cap = 100000;
  CLI::App* infer = app.add_subcommand("infer", "Replay inference over a trace");
  infer->add_option("--trace", inf_trace, "Trace TSV")->required();
  infer->add_option("--scenario", inf_scenario, "Scenario JSON")->required();
  infer->add_option("--reward", inf_reward, "Opponent base reward params JSON")
      ->required();
  infer->add_option("--window", inf_window, "Observation window (planning steps)");
  infer->add_option("--dt-sim", inf_dt_sim, "Trace sampling step [s]");
  infer->add_option("--belief-samples", inf_samples, "Candidate grid size");
  infer->add_option("--cap", inf_cap, "Softmax enumeration cap");
  infer->add_option("--out-dir", inf_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (plan->parsed()) return cmd_plan(pa);
    if (bench->parsed()) return cmd_benchmark(ba);
    if (sim->parsed()) return cmd_simulate(sim_config, sim_out, sim_seed);
    if (infer->parsed()) {
      return cmd_infer(inf_trace, inf_scenario, inf_reward, inf_window, inf_dt_sim,
                       inf_samples, inf_cap, inf_out);
    }
  } catch (const gtplan::RefusePlanError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRefusal;
  } catch (const gtplan::InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const gtplan::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
