#include <benchmark/benchmark.h>

#include "cohres/bounds.hpp"
#include "cohres/measurement.hpp"
#include "cohres/oracle.hpp"

namespace {

cohres::ParamPoint bench_point() {
  cohres::ParamPoint p;
  p.s = 0.5;
  p.q = 0.3;
  p.gamma_r = 0.25;
  p.gamma_i = 0.15;
  return p;
}

void BM_ClosedQfiMatrix(benchmark::State& state) {
  const cohres::ParamPoint p = bench_point();
  const cohres::OpticalConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(cohres::qfi_state_matrix(p, cfg));
}
BENCHMARK(BM_ClosedQfiMatrix);

void BM_OracleQfiMatrix(benchmark::State& state) {
  const cohres::ParamPoint p = bench_point();
  const cohres::OpticalConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(cohres::numeric_qfi(p, cfg));
}
BENCHMARK(BM_OracleQfiMatrix);

void BM_VanTreesSs(benchmark::State& state) {
  const cohres::ParamPoint p = bench_point();
  const cohres::OpticalConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(cohres::van_trees_ss(p, cfg));
}
BENCHMARK(BM_VanTreesSs);

void BM_SimulateDetections(benchmark::State& state) {
  const cohres::ParamPoint p = bench_point();
  const cohres::OpticalConfig cfg;
  const cohres::BinaryPOVM povm =
      cohres::make_binary_povm(cohres::PovmKind::projector_v, p, cfg);
  const std::int64_t slots = state.range(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        cohres::simulate_detections(p, cfg, povm, slots, 42));
  state.SetItemsProcessed(state.iterations() * slots);
}
BENCHMARK(BM_SimulateDetections)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
