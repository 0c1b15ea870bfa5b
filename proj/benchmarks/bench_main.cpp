#include <benchmark/benchmark.h>

#include <gem/algebra.hpp>
#include <gem/geometry.hpp>
#include <gem/layers.hpp>
#include <gem/mesh.hpp>
#include <gem/random.hpp>

namespace {

using namespace gem;

Mesh bench_grid(int side) {
  GridOptions o;
  o.rows = side;
  o.cols = side;
  o.displace = true;
  o.smoothing_sigma = 1.0;
  o.seed = 1;
  return grid_mesh(o);
}

FeatureField noise(const ReprType& type, const GaugeAtlas& atlas, std::uint64_t seed) {
  Rng rng(seed);
  FeatureField f{type, FieldValues(static_cast<Eigen::Index>(atlas.size()), type.dim()), atlas.id()};
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values.data()[i] = rng.normal();
  return f;
}

void BM_BuildAtlas(benchmark::State& state) {
  const Mesh mesh = bench_grid(static_cast<int>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(build_atlas(mesh, ReferencePolicy::smallest_id(), threads));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mesh.vertex_count()));
}
BENCHMARK(BM_BuildAtlas)->Args({32, 1})->Args({64, 1})->Args({64, 4})->UseRealTime();

void BM_GemConv(benchmark::State& state) {
  const GaugeAtlas atlas = build_atlas(bench_grid(static_cast<int>(state.range(0))));
  const ReprType type = ReprType::regular(4, 2);
  const LayerWeights w = init_weights(type, type, 3);
  const FeatureField f = noise(type, atlas, 4);
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(gem_conv(atlas, w, f, threads));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(atlas.size()));
}
BENCHMARK(BM_GemConv)->Args({32, 1})->Args({64, 1})->Args({64, 4})->UseRealTime();

void BM_RegularNonlinearity(benchmark::State& state) {
  const GaugeAtlas atlas = build_atlas(bench_grid(32));
  const int samples = static_cast<int>(state.range(0));
  const FeatureField f = noise(ReprType::regular(4, 2), atlas, 5);
  const RegularNonlinSpec spec{2, samples, Pointwise::kRelu};
  for (auto _ : state) benchmark::DoNotOptimize(regular_nonlinearity(spec, f));
}
BENCHMARK(BM_RegularNonlinearity)->Arg(7)->Arg(101);

void BM_AssembleKernels(benchmark::State& state) {
  const LayerWeights w = init_weights(ReprType::regular(4, 2), ReprType::regular(4, 2), 6);
  double theta = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_kernels(w, theta));
    theta += 0.1;
  }
}
BENCHMARK(BM_AssembleKernels);

}  // namespace

BENCHMARK_MAIN();
