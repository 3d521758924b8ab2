#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pura/analytic.hpp"
#include "pura/planner.hpp"
#include "pura/sim.hpp"

namespace {

struct Input {
  pura::DeviceField field;
  std::vector<pura::DeviceState> states;
};

Input make_input(std::size_t devices, const pura::SchedulerConfig& c) {
  std::mt19937_64 rng(devices);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> off(1, c.sigma);
  std::vector<pura::Point> pos(devices);
  std::vector<int> offsets(devices);
  std::vector<pura::DeviceState> states(devices);
  for (std::size_t i = 0; i < devices; ++i) {
    const double r = c.radius() * std::sqrt(u(rng));
    const double th = 2 * std::numbers::pi * u(rng);
    pos[i] = {r * std::cos(th), r * std::sin(th)};
    offsets[i] = off(rng);
    states[i].next_sr_opportunity = 1000 + off(rng) - 1;
  }
  return {pura::DeviceField(std::move(pos), std::move(offsets), 0, c.sigma), std::move(states)};
}

void BM_ClusterPlan(benchmark::State& state) {
  const pura::SchedulerConfig c;
  const auto input = make_input(static_cast<std::size_t>(state.range(0)), c);
  for (auto _ : state) {
    const auto partition = pura::cluster(input.field, c.ring_width(), c.ring_count());
    auto p = pura::plan(partition, c, 1000, input.states);
    benchmark::DoNotOptimize(p);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ClusterPlan)->RangeMultiplier(2)->Range(1 << 12, 1 << 17)->Complexity(benchmark::oN);

void BM_RegionMetrics(benchmark::State& state) {
  pura::SchedulerConfig c;
  c.tau0 = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto m = pura::analytic::region_metrics(c);
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(BM_RegionMetrics)->Arg(1)->Arg(10)->Arg(40);

void BM_Episode(benchmark::State& state) {
  pura::SchedulerConfig c;
  c.lambda = 0.005;
  const auto policy = static_cast<pura::sim::Policy>(state.range(0));
  pura::sim::Rng rng(7);
  const auto field = pura::sim::sample_field(c.lambda, c.radius(), c.sigma, rng);
  for (auto _ : state) {
    auto out = pura::sim::run_episode(field, c, policy, rng);
    benchmark::DoNotOptimize(out);
  }
  state.SetLabel(std::string(pura::sim::to_string(policy)));
}
BENCHMARK(BM_Episode)->DenseRange(0, 2);

}  // namespace
BENCHMARK_MAIN();
