#include <benchmark/benchmark.h>

#include "attrq/replay.hpp"

namespace {

using namespace attrq;

Transition make_transition(int d_in, double tag) {
  Transition t;
  t.state = Eigen::VectorXd::Constant(d_in, tag);
  t.next_state = Eigen::VectorXd::Constant(d_in, tag + 1.0);
  t.reward = tag;
  return t;
}

void BM_ReplayPush(benchmark::State& state) {
  ReplayMemory mem(2000);
  const Transition t = make_transition(40, 1.0);
  for (auto _ : state) {
    mem.push(t);
    benchmark::DoNotOptimize(mem.size());
  }
}
BENCHMARK(BM_ReplayPush);

void BM_ReplaySample64(benchmark::State& state) {
  ReplayMemory mem(2000);
  for (int i = 0; i < 2000; ++i) mem.push(make_transition(40, i));
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mem.sample(64, rng));
  }
}
BENCHMARK(BM_ReplaySample64);

}  // namespace
