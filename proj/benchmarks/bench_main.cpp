#include <benchmark/benchmark.h>

#include <memory>

#include "cqroute/cq_table.hpp"
#include "cqroute/engine.hpp"
#include "cqroute/policy.hpp"
#include "cqroute/rng.hpp"

using namespace cqroute;

namespace {

PolicyWeights random_net(Rng& rng) {
  PolicyWeights w;
  w.k_neighbors = 4;
  w.layer_sizes = {18, 16, 16, 8, 8, 4, 2};
  for (std::size_t l = 0; l + 1 < w.layer_sizes.size(); ++l) {
    DenseLayer layer;
    layer.inputs = w.layer_sizes[l];
    layer.outputs = w.layer_sizes[l + 1];
    for (int i = 0; i < layer.inputs * layer.outputs; ++i)
      layer.weights.push_back(rng.normal(0.0, 0.3));
    layer.bias.assign(static_cast<std::size_t>(layer.outputs), 0.0);
    layer.activation = l + 2 == w.layer_sizes.size() ? Activation::kLinear : Activation::kTanh;
    w.layers.push_back(layer);
  }
  return w;
}

}  // namespace

static void BM_TableUpdateOnAck(benchmark::State& state) {
  CqTable table(0, 50, CqConfig{}, 32.0);
  Rng rng(1);
  NodeId j = 1;
  for (auto _ : state) {
    table.update_on_ack(j, 49, {rng.uniform(), 1.0 + rng.uniform(0.0, 10.0)});
    j = j == 48 ? 1 : j + 1;
  }
  benchmark::DoNotOptimize(table.c(1, 49));
}
BENCHMARK(BM_TableUpdateOnAck);

static void BM_TopK(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  CqTable table(0, n, CqConfig{}, 32.0);
  Rng rng(2);
  for (NodeId j = 1; j < n - 1; ++j) table.set_entry(j, n - 1, rng.uniform(), 1 + rng.uniform(0, 9));
  for (auto _ : state) benchmark::DoNotOptimize(table.top_k(n - 1, 4));
}
BENCHMARK(BM_TopK)->Arg(12)->Arg(50);

static void BM_ForwardPass(benchmark::State& state) {
  Rng rng(3);
  const auto w = random_net(rng);
  std::vector<double> x(18);
  for (auto& v : x) v = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(forward(w, x));
}
BENCHMARK(BM_ForwardPass);

static void BM_EpisodeSlots(benchmark::State& state) {
  auto cfg = benchmark_config();
  cfg.node_count = static_cast<int>(state.range(0));
  cfg.flows = make_flows(cfg.node_count, 1, 1.0);
  cfg.traffic_slots = 1000;
  std::int64_t slots = 0;
  for (auto _ : state) {
    const auto m = run_episode(cfg);
    slots += m.slots;
  }
  state.counters["slots/s"] = benchmark::Counter(static_cast<double>(slots), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_EpisodeSlots)->Arg(12)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_NeuralEpisodeSlots(benchmark::State& state) {
  auto cfg = benchmark_config();
  cfg.traffic_slots = 1000;
  Rng rng(4);
  cfg.policy.kind = PolicyKind::kNeural;
  cfg.policy.weights = std::make_shared<const PolicyWeights>(random_net(rng));
  std::int64_t slots = 0;
  for (auto _ : state) slots += run_episode(cfg).slots;
  state.counters["slots/s"] = benchmark::Counter(static_cast<double>(slots), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_NeuralEpisodeSlots)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
