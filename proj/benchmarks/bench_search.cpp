#include <benchmark/benchmark.h>

#include "gtplan/baselines.hpp"
#include "gtplan/inference.hpp"
#include "gtplan/prediction.hpp"
#include "gtplan/scenario.hpp"
#include "gtplan/search.hpp"

namespace {

using namespace gtplan;

Scenario reference() {
  return load_scenario(std::string(GTPLAN_CONFIG_DIR) + "/reference_scenario.json");
}

PredictionSet reference_predictions(const Scenario& sc) {
  return load_predictions(
      std::string(GTPLAN_CONFIG_DIR) + "/reference_predictions.json", sc.horizon);
}

void BM_SearchProposed(benchmark::State& state) {
  const Scenario sc = reference();
  const PredictionSet preds = reference_predictions(sc);
  RewardModel rm;
  rm.ego.gamma = 0.9;
  rm.opp.gamma = 0.9;
  SearchConfig cfg;
  cfg.max_iterations = state.range(0);
  cfg.exploration_c = 5.0;
  cfg.stats_stride = 0;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    cfg.seed = ++seed;
    benchmark::DoNotOptimize(search(sc.init, &preds, sc, rm, cfg).root);
  }
  state.SetItemsProcessed(state.iterations() * cfg.max_iterations);
}
BENCHMARK(BM_SearchProposed)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SearchGeneral(benchmark::State& state) {
  const Scenario sc = reference();
  RewardModel rm;
  rm.ego.gamma = 0.9;
  rm.opp.gamma = 0.9;
  SearchConfig cfg;
  cfg.max_iterations = state.range(0);
  cfg.exploration_c = 5.0;
  cfg.heuristic = false;
  cfg.rollout = RolloutPolicy::kUniform;
  cfg.stats_stride = 0;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    cfg.seed = ++seed;
    benchmark::DoNotOptimize(general_mcts(sc.init, sc, rm, cfg));
  }
  state.SetItemsProcessed(state.iterations() * cfg.max_iterations);
}
BENCHMARK(BM_SearchGeneral)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_JointRollout(benchmark::State& state) {
  const Scenario sc = reference();
  RewardModel rm;
  const std::vector<double> u(static_cast<std::size_t>(sc.horizon), 1.0);
  for (auto _ : state) {
    double re, ro;
    joint_rewards(sc.init, u, u, sc, rm, re, ro);
    benchmark::DoNotOptimize(re);
  }
}
BENCHMARK(BM_JointRollout);

void BM_BeliefUpdate(benchmark::State& state) {
  Scenario sc = reference();
  sc.init.ego = {6.0, 6.0};
  sc.init.opp = {4.0, 6.5};
  const RewardParams base;
  Belief belief = Belief::uniform_grid(21);
  std::vector<JointState> states{sc.init};
  const std::vector<double> u(5, 0.0);
  const auto traj = rollout_joint(sc.init, u, u, sc);
  states.insert(states.end(), traj.begin(), traj.end());
  const ObservationWindow w = make_window(states, sc);
  for (auto _ : state) {
    benchmark::DoNotOptimize(update_belief(belief, w, base, sc));
  }
}
BENCHMARK(BM_BeliefUpdate)->Unit(benchmark::kMillisecond);

void BM_ExhaustiveOracle(benchmark::State& state) {
  SyntheticKnobs knobs;
  knobs.horizon = 2;
  knobs.actions = {-2.0, 0.0, 2.0};
  const SyntheticScenario syn = make_synthetic_scenario(7, knobs);
  RewardModel rm;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        exhaustive_stackelberg(syn.scenario.init, syn.scenario, rm));
  }
}
BENCHMARK(BM_ExhaustiveOracle);

}  // namespace

BENCHMARK_MAIN();
