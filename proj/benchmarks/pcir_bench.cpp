#include <benchmark/benchmark.h>

#include "excir/pcir.hpp"
#include "excir/rng.hpp"

namespace {

void BM_Eta(benchmark::State& state) {
  excir::CounterRng rng(2);
  std::vector<double> f(static_cast<std::size_t>(state.range(0))), y(f.size());
  for (auto& x : f) x = rng.uniform();
  for (auto& x : y) x = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(excir::pcir::eta(f, y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Eta)->Arg(1000)->Arg(100000);

}  // namespace
