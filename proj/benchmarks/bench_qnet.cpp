#include <benchmark/benchmark.h>

#include <Eigen/Core>
#include <vector>

#include "attrq/qnet.hpp"
#include "attrq/rng.hpp"

namespace {

using namespace attrq;

// Input width of the paper-scale configuration on small synthetic features:
// F=16 features plus 3L context with L=8.
constexpr int kDIn = 40;

Eigen::MatrixXd random_states(int d_in, int batch, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(d_in, batch);
  for (int r = 0; r < d_in; ++r)
    for (int c = 0; c < batch; ++c) m(r, c) = rng.normal();
  return m;
}

void BM_ForwardSingle(benchmark::State& state) {
  auto net = init_network(kDIn, 1);
  const Eigen::MatrixXd states = random_states(kDIn, 1, 2);
  const Eigen::VectorXd x = states.col(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(net, x));
  }
}
BENCHMARK(BM_ForwardSingle);

void BM_ForwardBatch64(benchmark::State& state) {
  auto net = init_network(kDIn, 1);
  const Eigen::MatrixXd states = random_states(kDIn, 64, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward_batch(net, states));
  }
}
BENCHMARK(BM_ForwardBatch64);

void BM_TrainStep(benchmark::State& state) {
  auto net = init_network(kDIn, 1);
  auto opt = AdamState::fresh(net);
  const Eigen::MatrixXd states = random_states(kDIn, 64, 2);
  Rng rng(3);
  std::vector<int> actions;
  Eigen::VectorXd y(64);
  for (int j = 0; j < 64; ++j) {
    actions.push_back(static_cast<int>(rng.below(2)));
    y[j] = rng.normal();
  }
  for (auto _ : state) {
    auto [loss, grads] = td_loss_and_gradients(net, states, actions, y);
    adam_step(net, grads, opt);
    benchmark::DoNotOptimize(loss);
  }
}
BENCHMARK(BM_TrainStep);

void BM_CheckpointRoundtrip(benchmark::State& state) {
  auto net = init_network(kDIn, 1);
  auto opt = AdamState::fresh(net);
  CheckpointMeta meta;
  for (auto _ : state) {
    auto bytes = save_checkpoint(net, opt, meta);
    auto ck = load_checkpoint(bytes);
    benchmark::DoNotOptimize(ck.net.b3[0]);
  }
}
BENCHMARK(BM_CheckpointRoundtrip);

}  // namespace
