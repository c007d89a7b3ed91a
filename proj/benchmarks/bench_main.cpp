#include <benchmark/benchmark.h>

#include <vector>

#include "boltz/carleman.hpp"
#include "boltz/collision.hpp"
#include "boltz/dynamics.hpp"
#include "boltz/weights.hpp"

using namespace boltz;

namespace {

Distribution bimodal(int N) {
  Grid g{2, N, 8.0};
  std::vector<double> a{-2.0, 0.0}, b{2.0, 0.0};
  auto f = maxwellian(g, 0.5, a, 0.5);
  const auto f2 = maxwellian(g, 0.5, b, 0.5);
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] += f2.values[i];
  return f;
}

void BM_OperatorApply(benchmark::State& state) {
  const auto f = bimodal(static_cast<int>(state.range(0)));
  const CollisionParams params{};
  const CollisionOperator op(f.grid, params, SplitConfig{}, CollisionQuad::for_grid(f.grid));
  std::vector<double> out;
  for (auto _ : state) {
    op.apply(f, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["nodes"] = static_cast<double>(f.grid.size());
}
BENCHMARK(BM_OperatorApply)->Arg(24)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_OperatorSetup(benchmark::State& state) {
  const Grid g{2, static_cast<int>(state.range(0)), 8.0};
  const CollisionParams params{};
  const auto quad = CollisionQuad::for_grid(g);
  for (auto _ : state) {
    CollisionOperator op(g, params, SplitConfig{}, quad);
    benchmark::DoNotOptimize(op.cb());
  }
}
BENCHMARK(BM_OperatorSetup)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_KfHyperplane(benchmark::State& state) {
  const auto f = bimodal(48);
  const CollisionParams params{};
  const auto quad = CollisionQuad::for_grid(f.grid).hyper;
  const std::vector<double> v{0.5, -0.25}, vp{1.75, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(kf_hyperplane(f, v, vp, params, quad));
}
BENCHMARK(BM_KfHyperplane)->Unit(benchmark::kMicrosecond);

void BM_Step(benchmark::State& state) {
  const auto f = bimodal(32);
  const CollisionParams params{};
  const Stepper st(f.grid, params, SplitConfig{}, CollisionQuad::for_grid(f.grid));
  const Method m = state.range(0) == 0 ? Method::Euler : Method::RK4;
  for (auto _ : state) {
    auto g = st.step(f, 1e-3, m);
    benchmark::DoNotOptimize(g.values.data());
  }
  state.SetLabel(to_string(m));
}
BENCHMARK(BM_Step)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MittagLefflerLogWeight(benchmark::State& state) {
  const Weight w = Weight::mittag_leffler(0.5, 1.5);
  double s = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_weight(w, s));
    s = s < 30.0 ? s + 0.37 : 0.0;
  }
}
BENCHMARK(BM_MittagLefflerLogWeight);

}  // namespace

BENCHMARK_MAIN();
