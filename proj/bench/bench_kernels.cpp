// Parallel kernels against their serial references on random leaf data.
// Arguments: dimension, depth, and 1 for the parallel path or 0 for serial.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "dtl/aggregate.hpp"
#include "dtl/constants.hpp"
#include "dtl/norms.hpp"
#include "dtl/operators.hpp"

namespace {

dtl::LeafField random_field(dtl::RootSpec root, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  std::vector<double> v(std::uint64_t{1} << (root.dim * root.depth));
  for (auto& x : v) x = u(rng);
  return dtl::LeafField::ingest(root, std::move(v));
}

struct Setup {
  explicit Setup(const benchmark::State& state)
      : root{static_cast<int>(state.range(0)), static_cast<int>(state.range(1))},
        exec(state.range(2) != 0 ? dtl::Exec::parallel : dtl::Exec::serial) {
    fields = {random_field(root, 1), random_field(root, 2)};
    for (const auto& f : fields) aggs.push_back(dtl::TreeAggregate::of(f));
    state_label = state.range(2) != 0 ? "parallel" : "serial";
  }
  dtl::RootSpec root;
  dtl::Exec exec;
  std::vector<dtl::LeafField> fields;
  std::vector<dtl::TreeAggregate> aggs;
  const char* state_label;
};

void BM_DyadicIntegral(benchmark::State& state) {
  Setup s(state);
  const auto k = dtl::KernelWeight::canonical(1.0, 2, s.root.dim);
  for (auto _ : state) benchmark::DoNotOptimize(dtl::dyadic_integral_operator(s.aggs, k, s.exec));
  state.SetLabel(s.state_label);
}

void BM_MultilinearMaximal(benchmark::State& state) {
  Setup s(state);
  for (auto _ : state) benchmark::DoNotOptimize(dtl::multilinear_maximal(s.aggs, 1.0, s.exec));
  state.SetLabel(s.state_label);
}

void BM_FractionalMaximal(benchmark::State& state) {
  Setup s(state);
  for (auto _ : state) benchmark::DoNotOptimize(dtl::fractional_maximal(s.aggs[0], 0.5, {}, s.exec));
  state.SetLabel(s.state_label);
}

void BM_ModifiedMorrey(benchmark::State& state) {
  Setup s(state);
  for (auto _ : state) benchmark::DoNotOptimize(dtl::modified_morrey_norm(s.fields[0], 2.0, 0.5, s.exec));
  state.SetLabel(s.state_label);
}

void BM_KermanSawyer(benchmark::State& state) {
  Setup s(state);
  for (auto _ : state) benchmark::DoNotOptimize(dtl::ks_testing_constant(s.aggs[0], 0.5, 2.0, s.exec));
  state.SetLabel(s.state_label);
}

void BM_DiscretizationMajorant(benchmark::State& state) {
  Setup s(state);
  for (auto _ : state) benchmark::DoNotOptimize(dtl::discretization_majorant(s.fields, 1.0, s.exec));
  state.SetLabel(s.state_label);
}

void grid_args(benchmark::internal::Benchmark* b) {
  for (const int par : {0, 1}) {
    b->Args({1, 12, par});
    b->Args({2, 6, par});
  }
}

void small_grid_args(benchmark::internal::Benchmark* b) {
  for (const int par : {0, 1}) {
    b->Args({1, 8, par});
    b->Args({2, 4, par});
  }
}

}  // namespace

BENCHMARK(BM_DyadicIntegral)->Apply(grid_args);
BENCHMARK(BM_MultilinearMaximal)->Apply(grid_args);
BENCHMARK(BM_FractionalMaximal)->Apply(grid_args);
BENCHMARK(BM_DiscretizationMajorant)->Apply(small_grid_args);
BENCHMARK(BM_ModifiedMorrey)->Apply(small_grid_args);
BENCHMARK(BM_KermanSawyer)->Apply(small_grid_args);

BENCHMARK_MAIN();
