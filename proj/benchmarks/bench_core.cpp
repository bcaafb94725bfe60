#include <benchmark/benchmark.h>

#include "bnsens/admissible.hpp"
#include "bnsens/engine.hpp"
#include "bnsens/oracle.hpp"
#include "bnsens/sensitivity.hpp"

namespace {

using namespace bnsens;

Network bench_network() {
  oracle::RandomNetworkOptions options;
  options.min_variables = options.max_variables = 15;
  options.max_cardinality = 3;
  options.max_joint_states = std::uint64_t{1} << 18;
  return oracle::random_network(40, options);
}

void BM_query(benchmark::State& state) {
  const Network net = bench_network();
  const Evidence e{{{3, 0}, {7, 1}}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(query(net, 14, e));
  }
}
BENCHMARK(BM_query);

void BM_enumerate_query(benchmark::State& state) {
  oracle::RandomNetworkOptions options;
  options.min_variables = options.max_variables = 10;
  options.max_joint_states = std::uint64_t{1} << 14;
  const Network net = oracle::random_network(7, options);
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle::enumerate_query(net, 9, {}));
  }
}
BENCHMARK(BM_enumerate_query);

void BM_fit_bundle(benchmark::State& state) {
  const Network net = bench_network();
  const ParameterRef p = all_parameters(net)[10];
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_bundle(net, p, 14, {}));
  }
}
BENCHMARK(BM_fit_bundle);

void BM_admissible_deviation(benchmark::State& state) {
  const Network net = bench_network();
  const FunctionBundle bundle = fit_bundle(net, all_parameters(net)[10], 14, {});
  for (auto _ : state) {
    benchmark::DoNotOptimize(admissible_deviation(bundle));
  }
}
BENCHMARK(BM_admissible_deviation);

void BM_full_parameter_analysis(benchmark::State& state) {
  const Network net = bench_network();
  const auto params = all_parameters(net);
  for (auto _ : state) {
    for (std::size_t i = 0; i < params.size(); i += 16) {
      benchmark::DoNotOptimize(fit_bundle(net, params[i], 14, {}));
    }
  }
}
BENCHMARK(BM_full_parameter_analysis);

}  // namespace

BENCHMARK_MAIN();
