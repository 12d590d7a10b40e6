#include <benchmark/benchmark.h>

#include "airink/cnn.hpp"
#include "airink/corpus.hpp"
#include "airink/generator.hpp"
#include "airink/imaging.hpp"
#include "airink/layers.hpp"
#include "airink/rng.hpp"

using namespace airink;

namespace {

AccelSeries noise_series(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed);
  AccelSeries s;
  for (std::size_t i = 0; i < n; ++i) {
    s.ax.push_back(rng.normal());
    s.ay.push_back(rng.normal());
  }
  return s;
}

std::vector<GrayImage> images(std::size_t n) {
  std::vector<GrayImage> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(series_to_image(noise_series(300, i)));
  return out;
}

void BM_SeriesToImage(benchmark::State& state) {
  const auto s = noise_series(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(series_to_image(s));
}
BENCHMARK(BM_SeriesToImage)->Arg(150)->Arg(1000)->Arg(5000);

void BM_LanczosResize(benchmark::State& state) {
  const auto side = static_cast<Eigen::Index>(state.range(0));
  RowMatrix m = RowMatrix::Random(side, side);
  for (auto _ : state) benchmark::DoNotOptimize(lanczos_resize(m));
}
BENCHMARK(BM_LanczosResize)->Arg(18)->Arg(64)->Arg(100);

void BM_Conv3x3Forward(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  const ops::Geometry g{c, 32, 32};
  ops::Matrix x = ops::Matrix::Random(c * 32 * 32, 5);
  const Tensor w({static_cast<std::size_t>(c), static_cast<std::size_t>(c), 3, 3},
                 std::vector<double>(static_cast<std::size_t>(c * c * 9), 0.01));
  const Tensor b({static_cast<std::size_t>(c)});
  ops::Matrix y;
  for (auto _ : state) {
    ops::conv3x3_forward(w, b, g, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_Conv3x3Forward)->Arg(32)->Arg(64);

void BM_CnnProbability(benchmark::State& state) {
  const Cnn model(1);
  const auto imgs = images(1);
  for (auto _ : state) benchmark::DoNotOptimize(model.probability(imgs[0]));
}
BENCHMARK(BM_CnnProbability)->Unit(benchmark::kMillisecond);

void BM_CnnTrainStep(benchmark::State& state) {
  const Cnn model(1);
  const auto imgs = images(5);
  const auto batch = image_batch(imgs);
  const std::vector<double> targets{1, 0, 1, 0, 1};
  auto grads = model.parameters().zeros_like();
  for (auto _ : state) {
    grads.set_zero();
    benchmark::DoNotOptimize(model.loss(batch, targets, &grads));
  }
  state.SetItemsProcessed(state.iterations() * 5);
}
BENCHMARK(BM_CnnTrainStep)->Unit(benchmark::kMillisecond);

void BM_GeneratorWindowLoss(benchmark::State& state) {
  GeneratorConfig cfg;
  cfg.hidden_size = static_cast<std::size_t>(state.range(0));
  const GeneratorModel model(cfg, Label::ad);
  std::vector<AccelSeries> windows;
  for (std::size_t i = 0; i < cfg.batch_size; ++i) windows.push_back(noise_series(cfg.sequence_length, i));
  auto grads = model.parameters().zeros_like();
  for (auto _ : state) {
    grads.set_zero();
    benchmark::DoNotOptimize(model.sequence_loss(windows, &grads));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(windows.size()));
}
BENCHMARK(BM_GeneratorWindowLoss)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_GeneratorSample(benchmark::State& state) {
  GeneratorConfig cfg;
  const GeneratorModel model(cfg, Label::ad);
  std::vector<std::uint64_t> seeds(16);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i;
  for (auto _ : state) benchmark::DoNotOptimize(model.sample(seeds));
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_GeneratorSample)->Unit(benchmark::kMillisecond);

void BM_FixtureCorpus(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(make_fixture_corpus(1, 20, 13, 2.0));
}
BENCHMARK(BM_FixtureCorpus)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
