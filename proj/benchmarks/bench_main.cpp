// Hot-path benchmarks: score decomposition, stochastic prediction, one
// training epoch, and dataset synthesis.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "fairal/acquisition.hpp"
#include "fairal/datagen.hpp"
#include "fairal/model.hpp"
#include "fairal/rng.hpp"

namespace {

fairal::McPredictions random_table(std::size_t T, std::size_t N,
                                   std::size_t C) {
  fairal::RngStream rng(1);
  fairal::McPredictions preds;
  preds.passes = T;
  preds.samples = N;
  preds.classes = C;
  preds.p.resize(T * N * C);
  for (std::size_t row = 0; row < T * N; ++row) {
    double sum = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      double v = 0.05 + rng.uniform01();
      preds.p[row * C + c] = v;
      sum += v;
    }
    for (std::size_t c = 0; c < C; ++c) preds.p[row * C + c] /= sum;
  }
  return preds;
}

struct TrainingFixture {
  fairal::Dataset data;
  fairal::ModelConfig config;

  TrainingFixture() {
    fairal::DatasetSpec spec;
    spec.n_train = 1000;
    spec.n_test = 200;
    data = fairal::generate(spec);
    config.input_dim = spec.feature_dim;
    config.epochs = 1;
  }
};

void bm_bald_scores(benchmark::State& state) {
  auto preds = random_table(20, static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fairal::bald_scores(preds));
  }
}
BENCHMARK(bm_bald_scores)->Arg(500)->Arg(4000);

void bm_mc_predict(benchmark::State& state) {
  TrainingFixture fx;
  fairal::RngStream init = fairal::RngStream::named(0, "init");
  fairal::Model model(fx.config, init);
  for (auto _ : state) {
    fairal::RngStream mc = fairal::RngStream::named(0, "mc_eval");
    benchmark::DoNotOptimize(
        model.mc_predict(fx.data.features, static_cast<std::size_t>(state.range(0)), mc));
  }
}
BENCHMARK(bm_mc_predict)->Arg(5)->Arg(20);

void bm_train_epoch(benchmark::State& state) {
  TrainingFixture fx;
  fairal::RngStream init = fairal::RngStream::named(0, "init");
  fairal::Model model(fx.config, init);
  for (auto _ : state) {
    model.reset_weights();
    fairal::RngStream shuffle = fairal::RngStream::named(0, "shuffle");
    fairal::RngStream dropout = fairal::RngStream::named(0, "dropout");
    benchmark::DoNotOptimize(
        model.train(fx.data.features, fx.data.labels, fx.data.groups, shuffle,
                    dropout));
  }
}
BENCHMARK(bm_train_epoch);

void bm_generate(benchmark::State& state) {
  fairal::DatasetSpec spec;
  spec.n_train = static_cast<std::size_t>(state.range(0));
  spec.n_test = 1000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fairal::generate(spec));
  }
}
BENCHMARK(bm_generate)->Arg(4000);

}  // namespace

BENCHMARK_MAIN();
