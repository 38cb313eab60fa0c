#include <benchmark/benchmark.h>

#include "attrq/io.hpp"
#include "attrq/metrics.hpp"
#include "attrq/rng.hpp"

namespace {

using namespace attrq;

LabelMatrix random_labels(std::size_t n, std::size_t l, std::uint64_t seed) {
  Rng rng(seed);
  LabelMatrix m(n, l);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < l; ++j) m.set(i, j, rng.uniform() < 0.3 ? 1 : 0);
  return m;
}

void BM_Metrics1000x35(benchmark::State& state) {
  const auto truth = random_labels(1000, 35, 1);
  const auto pred = random_labels(1000, 35, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_metrics(truth, pred));
  }
}
BENCHMARK(BM_Metrics1000x35);

void BM_Synth500x16(benchmark::State& state) {
  SynthSpec spec;
  spec.n = 500;
  spec.feature_dim = 16;
  spec.attr_count = 8;
  spec.rates.assign(8, 0.4);
  spec.snr = 2.0;
  spec.seed = 9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_synthetic(spec));
  }
}
BENCHMARK(BM_Synth500x16);

}  // namespace
