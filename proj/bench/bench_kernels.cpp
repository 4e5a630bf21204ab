// OpenMP kernels against their serial references.

#include <vector>

#include <benchmark/benchmark.h>

#include "dcqe/feasibility.hpp"
#include "dcqe/optics.hpp"
#include "dcqe/sampling.hpp"

namespace {

const dcqe::JointDistribution& kim() {
  static const auto j = dcqe::optics::build_kim(dcqe::optics::FringeModel());
  return j;
}

void BM_SampleParallel(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dcqe::sample_events(kim(), n, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SampleSerial(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dcqe::sample_events_serial(kim(), n, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EstimateParallel(benchmark::State& state) {
  const auto log = dcqe::sample_events(kim(), static_cast<std::uint64_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(dcqe::estimate_from_events(log));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EstimateSerial(benchmark::State& state) {
  const auto log = dcqe::sample_events(kim(), static_cast<std::uint64_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(dcqe::estimate_from_events_serial(log));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<double> rates() {
  std::vector<double> p;
  for (int k = 0; k <= 32; ++k) p.push_back(0.5 * k / 32.0);
  return p;
}

dcqe::feasibility::LossFeasibilityProblem sweep_problem(benchmark::State& state) {
  dcqe::feasibility::LossFeasibilityProblem prob;
  prob.n_x = static_cast<std::size_t>(state.range(0));
  return prob;
}

void BM_SweepParallel(benchmark::State& state) {
  const auto prob = sweep_problem(state);
  const auto p = rates();
  for (auto _ : state) benchmark::DoNotOptimize(dcqe::feasibility::feasibility_sweep(prob, p));
}

void BM_SweepSerial(benchmark::State& state) {
  const auto prob = sweep_problem(state);
  const auto p = rates();
  for (auto _ : state) benchmark::DoNotOptimize(dcqe::feasibility::feasibility_sweep_serial(prob, p));
}

}  // namespace

BENCHMARK(BM_SampleParallel)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleSerial)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateParallel)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateSerial)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
