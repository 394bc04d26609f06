#include <benchmark/benchmark.h>

#include "chemid/decision_tree.hpp"
#include "chemid/lookup_engine.hpp"
#include "chemid/neural_net.hpp"
#include "chemid/ssx_matrix.hpp"
#include "chemid/victim_sim.hpp"

namespace {

using namespace chemid;

const ChemicalDatabase& db() {
  static const ChemicalDatabase d = generate_synthetic_database(311, 79, 0.5, 1);
  return d;
}

const std::vector<VictimRecord>& victims() {
  static const std::vector<VictimRecord> v = [] {
    PerturbationSpec spec;
    spec.mode = BernoulliToggle{0.05};
    spec.replicas_per_chemical = 10;
    return simulate_victims(db(), spec);
  }();
  return v;
}

void BM_Lookup(benchmark::State& state) {
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lookup_indices(db(), victims()[i++ % victims().size()].observed));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Lookup);

void BM_TrainTree(benchmark::State& state) {
  TreeTrainConfig cfg;
  cfg.replication_factor = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(train_tree(db(), cfg));
}
BENCHMARK(BM_TrainTree)->Arg(1)->Arg(312)->Unit(benchmark::kMillisecond);

void BM_PredictTree(benchmark::State& state) {
  const auto tree = train_tree(db());
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_tree(tree, victims()[i++ % victims().size()].observed));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PredictTree);

void BM_PredictAnnBatch(benchmark::State& state) {
  const auto w = NetworkWeights::random(79, static_cast<std::size_t>(state.range(0)), 311, 1);
  std::vector<SymptomProfile> profiles;
  for (const auto& v : victims()) profiles.push_back(v.observed);
  for (auto _ : state) benchmark::DoNotOptimize(predict_ann_batch(w, profiles));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(profiles.size()));
}
BENCHMARK(BM_PredictAnnBatch)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_AnnEpoch(benchmark::State& state) {
  AnnTrainConfig cfg;
  cfg.hidden_dim = static_cast<std::size_t>(state.range(0));
  cfg.max_epochs = 10;
  for (auto _ : state) benchmark::DoNotOptimize(train_ann(db(), cfg));
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_AnnEpoch)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_SimulateVictims(benchmark::State& state) {
  PerturbationSpec spec;
  spec.mode = BernoulliToggle{0.05};
  spec.replicas_per_chemical = 100;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_victims(db(), spec));
}
BENCHMARK(BM_SimulateVictims)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
