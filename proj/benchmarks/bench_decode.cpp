#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "wltls/arow.hpp"
#include "wltls/assignment.hpp"
#include "wltls/dataset.hpp"
#include "wltls/decoder.hpp"
#include "wltls/loss.hpp"
#include "wltls/synthetic.hpp"
#include "wltls/trellis.hpp"

using namespace wltls;

namespace {

std::vector<double> random_margins(std::size_t n, uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> margins(n);
  for (double& m : margins) m = dist(gen);
  return margins;
}

void bm_trellis_build(benchmark::State& state) {
  const auto k = static_cast<uint32_t>(state.range(0));
  const auto b = static_cast<uint32_t>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(TrellisGraph::build(k, b));
  }
}

void bm_decode(benchmark::State& state) {
  const auto k = static_cast<uint32_t>(state.range(0));
  const auto b = static_cast<uint32_t>(state.range(1));
  const TrellisGraph g = TrellisGraph::build(k, b);
  const ClassAssignment assignment = ClassAssignment::random(k, 1);
  const std::vector<double> margins = random_margins(g.edge_count(), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode(g, assignment, margins, LossKind::exponential));
  }
}

void bm_decode_exhaustive(benchmark::State& state) {
  const auto k = static_cast<uint32_t>(state.range(0));
  const auto b = static_cast<uint32_t>(state.range(1));
  const TrellisGraph g = TrellisGraph::build(k, b);
  const ClassAssignment assignment = ClassAssignment::random(k, 1);
  const std::vector<double> margins = random_margins(g.edge_count(), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        decode_exhaustive(g, assignment, margins, LossKind::exponential));
  }
}

void bm_edge_weights(benchmark::State& state) {
  const auto k = static_cast<uint32_t>(state.range(0));
  const TrellisGraph g = TrellisGraph::build(k, 2);
  const std::vector<double> margins = random_margins(g.edge_count(), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(edge_weights(g, margins, LossKind::exponential));
  }
}

void bm_arow_epoch(benchmark::State& state) {
  SyntheticConfig config;
  config.classes = 32;
  config.features = 2000;
  config.samples = 2000;
  config.seed = 5;
  const Dataset data = make_synthetic(config);
  const TrellisGraph g = TrellisGraph::build(32, 2);
  const ClassAssignment assignment = ClassAssignment::random(32, 1);
  TrainConfig train;
  train.epochs = 1;
  train.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_all(data, g, assignment, train));
  }
}

}  // namespace

BENCHMARK(bm_trellis_build)->Args({1000, 2})->Args({100000, 2})->Args({100000, 16});
BENCHMARK(bm_decode)
    ->Args({1000, 2})
    ->Args({10000, 2})
    ->Args({10000, 8})
    ->Args({100000, 2});
BENCHMARK(bm_decode_exhaustive)->Args({1000, 2})->Args({10000, 2});
BENCHMARK(bm_edge_weights)->Arg(10000)->Arg(100000);
BENCHMARK(bm_arow_epoch)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
