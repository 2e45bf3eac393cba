#include <benchmark/benchmark.h>

#include "safemut/ad/differentiate.hpp"
#include "safemut/ad/forward.hpp"
#include "safemut/domains/maze.hpp"
#include "safemut/domains/parity.hpp"
#include "safemut/mutation/operators.hpp"
#include "safemut/net/architectures.hpp"
#include "safemut/net/init.hpp"

#ifndef SAFEMUT_DATA_DIR
#define SAFEMUT_DATA_DIR "data"
#endif

using namespace safemut;

namespace {

const domains::MazeWorld& world() {
  static const auto w = domains::load_maze(std::string(SAFEMUT_DATA_DIR) + "/maps/hard_maze.txt");
  return w;
}

struct MazeFixture {
  ad::ArchitectureSpec arch = net::build_maze_net();
  ad::ParamVector params;
  mutation::ExperienceArchive archive;

  MazeFixture() {
    Rng rng(1);
    params = net::xavier_init(arch, rng);
    archive = domains::maze_eval(world(), arch, params, {}).archive;
  }
};

const MazeFixture& maze() {
  static const MazeFixture f;
  return f;
}

void BM_ForwardMazeArchive(benchmark::State& state) {
  const auto& f = maze();
  for (auto _ : state) benchmark::DoNotOptimize(ad::forward(f.arch, f.params, f.archive.inputs));
  state.SetItemsProcessed(state.iterations() * f.archive.size());
}
BENCHMARK(BM_ForwardMazeArchive)->Unit(benchmark::kMicrosecond);

void BM_VjpMazeArchive(benchmark::State& state) {
  const auto& f = maze();
  const auto fwd = ad::forward(f.arch, f.params, f.archive.inputs);
  auto seed = fwd.outputs;
  for (auto _ : state) benchmark::DoNotOptimize(ad::vjp(fwd.tape, seed));
}
BENCHMARK(BM_VjpMazeArchive)->Unit(benchmark::kMicrosecond);

void BM_MazeEpisode(benchmark::State& state) {
  const auto& f = maze();
  for (auto _ : state) benchmark::DoNotOptimize(domains::maze_eval(world(), f.arch, f.params, {}));
}
BENCHMARK(BM_MazeEpisode)->Unit(benchmark::kMillisecond);

void BM_ParityEval(benchmark::State& state) {
  const auto arch = net::build_parity_net();
  Rng rng(2);
  const auto params = net::xavier_init(arch, rng);
  for (auto _ : state) benchmark::DoNotOptimize(domains::parity_eval(arch, params));
}
BENCHMARK(BM_ParityEval)->Unit(benchmark::kMicrosecond);

// One offspring per iteration on the maze archive, by method.
void BM_MutateMaze(benchmark::State& state) {
  const auto& f = maze();
  mutation::MutationConfig cfg;
  cfg.method = static_cast<mutation::Method>(state.range(0));
  cfg.strength = cfg.method == mutation::Method::kSmR ? 0.005 : 0.01;
  cfg.measure_divergence = false;
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(mutation::mutate(f.arch, f.params, f.archive, cfg, rng));
  state.SetLabel(std::string(mutation::to_string(cfg.method)));
}
BENCHMARK(BM_MutateMaze)
    ->Arg(static_cast<int>(mutation::Method::kControl))
    ->Arg(static_cast<int>(mutation::Method::kSmR))
    ->Arg(static_cast<int>(mutation::Method::kSmgAbs))
    ->Arg(static_cast<int>(mutation::Method::kSmgSum))
    ->Arg(static_cast<int>(mutation::Method::kSmgSo))
    ->Unit(benchmark::kMillisecond);

void BM_DivergenceHvpResidual(benchmark::State& state) {
  const auto arch = net::build_residual_net(static_cast<std::size_t>(state.range(0)));
  Rng rng(4);
  const auto params = net::xavier_init(arch, rng);
  const auto archive = mutation::subsample(domains::maze_eval(world(), arch, params, {}).archive, 100);
  const auto v = gaussian_vector(params.size(), 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mutation::divergence_hvp(arch, params, archive, v));
  state.counters["params"] = static_cast<double>(params.size());
}
BENCHMARK(BM_DivergenceHvpResidual)->Arg(32)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_DistanceField(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(domains::astar_distance_field(world()));
}
BENCHMARK(BM_DistanceField)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
