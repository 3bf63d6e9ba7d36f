#include <benchmark/benchmark.h>

#include <vector>

#include "scout/featurize.hpp"
#include "scout/pairmodel.hpp"
#include "scout/perfdb.hpp"
#include "scout/searchers.hpp"
#include "scout/synthgen.hpp"

namespace {

scout::GenParams bench_params(std::size_t n) {
  scout::GenParams p;
  p.n_workloads = n;
  p.master_seed = 11;
  p.ranges.noise_sigma = {0.0, 0.05};
  return p;
}

const scout::PerfDatabase& shared_db() {
  static const scout::PerfDatabase db =
      scout::generate_database(bench_params(20), scout::default_space());
  return db;
}

const scout::PairwiseModel& shared_model() {
  static const scout::PairwiseModel model = [] {
    const auto& db = shared_db();
    auto samples = scout::build_training_set(db, db.workloads().front(),
                                             scout::Objective::kTime, 300, 3);
    return scout::train(samples, scout::ModelParams{});
  }();
  return model;
}

void BM_GenerateDatabase(benchmark::State& state) {
  const auto space = scout::default_space();
  const auto params = bench_params(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(scout::generate_database(params, space));
  }
}
BENCHMARK(BM_GenerateDatabase)->Arg(10)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_Train(benchmark::State& state) {
  const auto& db = shared_db();
  auto samples = scout::build_training_set(db, db.workloads().front(), scout::Objective::kTime,
                                           static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(scout::train(samples, scout::ModelParams{}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(samples.size()));
}
BENCHMARK(BM_Train)->Arg(50)->Arg(300)->Unit(benchmark::kMillisecond)->Iterations(2);

void BM_Predict(benchmark::State& state) {
  const auto& db = shared_db();
  const auto& model = shared_model();
  auto samples = scout::build_training_set(db, "", scout::Objective::kTime, 20, 5);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.predict_distribution(samples[i].features));
    i = (i + 1) % samples.size();
  }
}
BENCHMARK(BM_Predict);

void BM_ScoutSearch(benchmark::State& state) {
  const auto& db = shared_db();
  const auto& model = shared_model();
  const auto& w = db.workloads().front();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        scout::scout_search(model, db, w, scout::Objective::kTime, scout::ScoutParams{}));
  }
}
BENCHMARK(BM_ScoutSearch)->Unit(benchmark::kMicrosecond);

void BM_BoSearch(benchmark::State& state) {
  const auto& db = shared_db();
  const auto& w = db.workloads().front();
  for (auto _ : state) {
    benchmark::DoNotOptimize(scout::bo_search(db, w, scout::Objective::kTime, scout::BoParams{}));
  }
}
BENCHMARK(BM_BoSearch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
