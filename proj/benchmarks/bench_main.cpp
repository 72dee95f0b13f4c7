#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pporpe/policy.hpp"
#include "pporpe/surrogate.hpp"
#include "pporpe/tensor_net.hpp"
#include "pporpe/trainer.hpp"

namespace {

using namespace pporpe;

Mlp make_net(int hidden) {
  std::mt19937_64 rng(0);
  Mlp net({4, hidden, hidden, 2});
  net.initialize(rng);
  return net;
}

Matrix batch_inputs(int n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Matrix x(4, n);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  return x;
}

void BM_ForwardBatch(benchmark::State& state) {
  const Mlp net = make_net(static_cast<int>(state.range(0)));
  const Matrix x = batch_inputs(100);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward_batch(x));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_ForwardBatch)->Arg(32)->Arg(64)->Arg(128);

void BM_ForwardBackwardBatch(benchmark::State& state) {
  const Mlp net = make_net(static_cast<int>(state.range(0)));
  const Matrix x = batch_inputs(100);
  const Matrix cot = Matrix::Ones(2, 100);
  GradBuffer g(net);
  ForwardCache cache;
  for (auto _ : state) {
    net.forward_batch(x, cache);
    net.backward_batch(cache, cot, g);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_ForwardBackwardBatch)->Arg(32)->Arg(64)->Arg(128);

void BM_SurrogateCoefficient(benchmark::State& state) {
  SurrogateConfig cfg;
  cfg.method = static_cast<Method>(state.range(0));
  cfg.eta = 0.3;
  std::vector<RatioPoint> points;
  for (int i = 0; i < 1024; ++i) points.push_back(RatioPoint::make(0.2 + 0.002 * i, i % 2 ? 0.7 : -1.1, 0.5));
  for (auto _ : state) {
    double acc = 0.0;
    for (const auto& p : points) acc += surrogate_coefficient(p, cfg, 0.2);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * 1024);
  state.SetLabel(std::string(to_string(cfg.method)));
}
BENCHMARK(BM_SurrogateCoefficient)->DenseRange(0, 3);

void BM_TrainEpisode(benchmark::State& state) {
  TrainerConfig cfg;
  cfg.env = "double-integrator";
  cfg.steps_per_update = static_cast<int>(state.range(0));
  cfg.hidden_layers = {32, 32};
  cfg.episodes = 1000000;
  Trainer trainer(cfg);
  trainer.run_episode();  // fill the replay past one batch
  for (auto _ : state) benchmark::DoNotOptimize(trainer.run_episode());
}
BENCHMARK(BM_TrainEpisode)->Arg(4)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
