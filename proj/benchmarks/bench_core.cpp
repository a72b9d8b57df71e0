#include <benchmark/benchmark.h>

#include <filesystem>

#include "cirm/calibration.hpp"
#include "cirm/gram_charlier.hpp"
#include "cirm/market_data.hpp"
#include "cirm/simulation.hpp"

using namespace cirm;

namespace {

const std::filesystem::path kSample = CIRM_SAMPLE_DIR;

const DiscountCurve& curve() {
  static const DiscountCurve c = load_curve(kSample / "curve.csv");
  return c;
}

const ModelParams kParams({0.109, 0.0846, 1.99, 0.584, 0.597, 1.26, 0.00017, 0.0021});

void BM_GcPrice(benchmark::State& state) {
  const ShiftedModel model(kParams, curve());
  const int tenor = static_cast<int>(state.range(0));
  const std::vector<int> orders{static_cast<int>(state.range(1))};
  const SwapSpec spec{Schedule::annual(5.0, tenor), 0.001, SwapType::Payer};
  for (auto _ : state) benchmark::DoNotOptimize(gc_price(model, spec, orders));
}
BENCHMARK(BM_GcPrice)->Args({5, 3})->Args({5, 7})->Args({10, 7});

void BM_Objective(benchmark::State& state) {
  const auto surface = load_surface(kSample / "surface_payer.csv", SwapType::Payer, &curve());
  const auto target = select_column(surface, 5.0, 5.0, 15.0, {3, 5, 7});
  for (auto _ : state) benchmark::DoNotOptimize(objective(kParams.vector(), target, curve()));
}
BENCHMARK(BM_Objective)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const ShiftedModel model(kParams, curve());
  SimulationConfig c;
  c.paths = static_cast<std::size_t>(state.range(0));
  c.steps_per_year = 256;
  c.horizon = 10.0;
  c.observation_times = {5.0, 10.0};
  for (auto _ : state) benchmark::DoNotOptimize(simulate(model, c));
}
BENCHMARK(BM_Simulate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
