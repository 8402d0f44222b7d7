#include <benchmark/benchmark.h>

#include "vitprobe/classifier.hpp"
#include "vitprobe/dct.hpp"
#include "vitprobe/embed_store.hpp"
#include "vitprobe/inference.hpp"
#include "vitprobe/random.hpp"
#include "vitprobe/synthetic.hpp"

using namespace vitprobe;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

void BM_CompressPatchGrid(benchmark::State& state) {
  const Matrix grid = random_matrix(256, 768, 1);
  for (auto _ : state) benchmark::DoNotOptimize(compress_patch_grid(grid));
}
BENCHMARK(BM_CompressPatchGrid)->Unit(benchmark::kMicrosecond);

void BM_Dct2(benchmark::State& state) {
  const auto n = state.range(0);
  const Matrix x = random_matrix(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(dct2(x));
}
BENCHMARK(BM_Dct2)->Arg(8)->Arg(64)->Arg(256);

void BM_TrainEpoch(benchmark::State& state) {
  SyntheticSpec spec;
  spec.seed = 3;
  const auto fx = make_synthetic_fixture(spec);
  const auto map = build_class_index_map(fx.manifest);
  TrainConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train(fx.features, fx.manifest, map, cfg));
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

void BM_PredictObservations(benchmark::State& state) {
  SyntheticSpec spec;
  spec.seed = 4;
  const auto fx = make_synthetic_fixture(spec);
  const auto map = build_class_index_map(fx.manifest);
  const auto model = LinearModel::initialized(map.size(), spec.dim, 5);
  for (auto _ : state) benchmark::DoNotOptimize(predict_observations(model, fx.features, fx.manifest, map));
}
BENCHMARK(BM_PredictObservations)->Unit(benchmark::kMicrosecond);

void BM_VectorStoreRoundTrip(benchmark::State& state) {
  SyntheticSpec spec;
  spec.seed = 6;
  const auto fx = make_synthetic_fixture(spec);
  for (auto _ : state) benchmark::DoNotOptimize(read_vectors(write_vectors(fx.features)));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(write_vectors(fx.features).size()));
}
BENCHMARK(BM_VectorStoreRoundTrip)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
