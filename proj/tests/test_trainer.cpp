#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <vector>

#include "attrq/errors.hpp"
#include "attrq/io.hpp"
#include "attrq/trainer.hpp"

using namespace attrq;

namespace {

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.replay_capacity = 500;
  cfg.target_update = 25;
  cfg.batch_size = 16;
  cfg.learning_rate = 3e-4;
  cfg.seed = 42;
  cfg.hidden1 = 32;
  cfg.hidden2 = 16;
  return cfg;
}

// Four distinct feature points, three attributes, labels drawn from strong
// per-(feature, attribute) majorities. Enumerable by counting.
Dataset enumerable_dataset(std::size_t n, std::uint64_t seed) {
  Dataset ds;
  ds.schema = AttributeSchema::from_names({"a0", "a1", "a2"});
  ds.feature_dim = 4;
  ds.split = "train";
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.id = "e" + std::to_string(i);
    const int fidx = static_cast<int>(i % 4);
    s.features = Eigen::VectorXd::Zero(4);
    s.features[fidx] = 2.0;
    s.labels.resize(3);
    for (int a = 0; a < 3; ++a) {
      const double p = ((fidx + a) % 2 == 0) ? 0.9 : 0.1;
      s.labels[static_cast<std::size_t>(a)] = rng.uniform() < p ? 1 : 0;
    }
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

QNetwork zero_net(int d_in, double q0, double q1) {
  QNetwork net;
  net.w1 = Eigen::MatrixXd::Zero(4, d_in);
  net.w2 = Eigen::MatrixXd::Zero(3, 4);
  net.w3 = Eigen::MatrixXd::Zero(2, 3);
  net.b1 = Eigen::VectorXd::Zero(4);
  net.b2 = Eigen::VectorXd::Zero(3);
  net.b3.resize(2);
  net.b3 << q0, q1;
  return net;
}

}  // namespace

TEST_CASE("epsilon schedule is linear with exact endpoints") {
  TrainConfig cfg;
  CHECK(epsilon_at(0, 1000, cfg) == 0.9);
  CHECK(epsilon_at(1000, 1000, cfg) == 0.05);
  CHECK(epsilon_at(500, 1000, cfg) == doctest::Approx(0.475).epsilon(1e-15));
  // Clamped outside the schedule and non-increasing inside it.
  CHECK(epsilon_at(2000, 1000, cfg) == 0.05);
  double prev = 1.0;
  for (int s = 0; s <= 100; ++s) {
    double e = epsilon_at(s, 100, cfg);
    CHECK(e <= prev);
    prev = e;
  }
  CHECK_THROWS_AS(epsilon_at(0, 0, cfg), ValidationError);
}

TEST_CASE("action selection: greedy, tie-break and exploration frequency") {
  Rng rng(5);
  QNetwork net = zero_net(3, 0.2, 0.7);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  CHECK(select_action(net, x, 0.0, rng) == Action::present);
  CHECK(greedy_action(net, x) == Action::present);

  QNetwork tie = zero_net(3, 0.5, 0.5);
  CHECK(select_action(tie, x, 0.0, rng) == Action::absent);
  CHECK(greedy_action(tie, x) == Action::absent);

  // Fully exploratory: empirical frequency about half, within 5 sigma.
  int ones = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i)
    ones += action_value(select_action(net, x, 1.0, rng));
  const double sigma = std::sqrt(draws * 0.25);
  CHECK(std::abs(ones - draws / 2) <= 5.0 * sigma);

  CHECK_THROWS_AS(select_action(net, x, 1.5, rng), ValidationError);
}

TEST_CASE("td target covers terminal and bootstrap branches") {
  CHECK(td_target(1.0, true, std::nullopt, 0.9) == 1.0);
  Eigen::Vector2d qn(0.5, 0.3);
  CHECK(td_target(-1.0, false, qn, 0.9) == doctest::Approx(-0.55).epsilon(1e-15));
  Eigen::Vector2d zeros(0.0, 0.0);
  CHECK(td_target(0.25, false, zeros, 0.9) == 0.25);
  CHECK_THROWS_AS(td_target(1.0, true, qn, 0.9), ValidationError);
  CHECK_THROWS_AS(td_target(1.0, false, std::nullopt, 0.9), ValidationError);
}

TEST_CASE("prediction scatters group actions back to schema positions") {
  auto schema = AttributeSchema::from_names({"x", "y", "z"});
  auto groups = load_group_config("g0: z, x\ng1: y\n", schema);
  const int d_in = 2 + 9;  // F=2, L=3

  // Agent 0 answers "present" exactly when the current attribute is z
  // (schema index 2): the current-attribute one-hot block starts at F.
  QNetwork net0;
  net0.w1 = Eigen::MatrixXd::Zero(2, d_in);
  net0.w1(0, 2 + 2) = 1.0;
  net0.w2 = Eigen::MatrixXd::Zero(2, 2);
  net0.w2(0, 0) = 1.0;
  net0.w3 = Eigen::MatrixXd::Zero(2, 2);
  net0.w3(1, 0) = 2.0;
  net0.b1 = Eigen::VectorXd::Zero(2);
  net0.b2 = Eigen::VectorXd::Zero(2);
  net0.b3.resize(2);
  net0.b3 << 0.0, -0.5;

  // Agent 1 always answers "present".
  QNetwork net1 = zero_net(d_in, 0.0, 1.0);

  std::vector<GroupAgent> agents;
  agents.push_back(GroupAgent::for_inference(0, net0));
  agents.push_back(GroupAgent::for_inference(1, net1));

  Eigen::VectorXd feat = Eigen::VectorXd::Zero(2);
  auto bits = predict_image(agents, feat, groups);
  // Actions [1, 0] on group [z, x] and [1] on [y] -> label vector [0, 1, 1].
  CHECK(bits == std::vector<std::uint8_t>{0, 1, 1});

  // Two calls agree (prediction is deterministic).
  CHECK(predict_image(agents, feat, groups) == bits);

  // Always Q = [1, 0]: all-zeros prediction.
  std::vector<GroupAgent> nay;
  nay.push_back(GroupAgent::for_inference(0, zero_net(d_in, 1.0, 0.0)));
  nay.push_back(GroupAgent::for_inference(1, zero_net(d_in, 1.0, 0.0)));
  CHECK(predict_image(nay, feat, groups) == std::vector<std::uint8_t>{0, 0, 0});

  // Missing agent for a group.
  std::vector<GroupAgent> missing;
  missing.push_back(GroupAgent::for_inference(0, net0));
  CHECK_THROWS_AS(predict_image(missing, feat, groups), ValidationError);
}

TEST_CASE("train with zero epochs yields untrained agents and an empty report") {
  auto ds = enumerable_dataset(12, 1);
  auto groups = GroupConfig::single_group(ds.schema);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 0;
  auto result = train(ds, groups, cfg);
  REQUIRE(result.agents.size() == 1);
  CHECK(result.report.records.empty());
  CHECK(result.agents[0].env_steps == 0);
  CHECK(result.agents[0].opt_steps == 0);
  // Prediction still works on the untrained policy.
  auto pred = predict_dataset(result.agents, ds, result.norm, groups);
  CHECK(pred.rows() == ds.size());
}

TEST_CASE("episode accounting: env steps, optimizer steps and sync cadence") {
  auto ds = enumerable_dataset(20, 2);
  auto groups = load_group_config("g0: a0, a2\ng1: a1\n", ds.schema);
  TrainConfig cfg = tiny_config();
  auto result = train(ds, groups, cfg);
  REQUIRE(result.agents.size() == 2);

  // One episode per (image, group) per epoch, T transitions each.
  const std::int64_t env0 = 3LL * 20 * 2;
  const std::int64_t env1 = 3LL * 20 * 1;
  CHECK(result.agents[0].env_steps == env0);
  CHECK(result.agents[1].env_steps == env1);
  // One optimizer step per env step once the replay holds a full batch.
  CHECK(result.agents[0].opt_steps == env0 - (cfg.batch_size - 1));
  CHECK(result.agents[1].opt_steps == env1 - (cfg.batch_size - 1));
  for (const auto& agent : result.agents)
    CHECK(agent.target_syncs == agent.opt_steps / cfg.target_update);
  CHECK(result.report.total_env_steps == env0 + env1);

  // Records sorted by (group, epoch), one per epoch per group.
  REQUIRE(result.report.records.size() == 6);
  CHECK(result.report.records[0].group == 0);
  CHECK(result.report.records[0].epoch == 1);
  CHECK(result.report.records[3].group == 1);

  // Per-episode basic reward per step lies in [-1, 1].
  for (const auto& r : result.report.records) {
    CHECK(r.mean_reward >= -1.0);
    CHECK(r.mean_reward <= 1.0);
  }
}

TEST_CASE("training is deterministic per seed, and rho=1 gor equals basic") {
  auto ds = enumerable_dataset(24, 3);
  auto groups = GroupConfig::single_group(ds.schema);
  TrainConfig cfg = tiny_config();

  auto a = train(ds, groups, cfg);
  auto b = train(ds, groups, cfg);
  CHECK(a.report.to_summary_text(cfg) == b.report.to_summary_text(cfg));
  CheckpointMeta meta;
  CHECK(save_checkpoint(a.agents[0].policy, a.agents[0].adam, meta) ==
        save_checkpoint(b.agents[0].policy, b.agents[0].adam, meta));

  TrainConfig gor = cfg;
  gor.reward_mode = RewardMode::gor;
  gor.rho_override = 1.0;
  auto c = train(ds, groups, gor);
  CHECK(c.report.to_log_text() == a.report.to_log_text());
  CHECK(save_checkpoint(c.agents[0].policy, c.agents[0].adam, meta) ==
        save_checkpoint(a.agents[0].policy, a.agents[0].adam, meta));

  TrainConfig other = cfg;
  other.seed = 43;
  auto d = train(ds, groups, other);
  CHECK(d.report.to_log_text() != a.report.to_log_text());
}

TEST_CASE("parallel group training matches sequential per group") {
  auto ds = enumerable_dataset(16, 4);
  auto groups = load_group_config("g0: a1\ng1: a0, a2\n", ds.schema);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 2;

  auto seq = train(ds, groups, cfg);
  TrainConfig par = cfg;
  par.parallel_groups = true;
  auto p = train(ds, groups, par);

  REQUIRE(seq.agents.size() == p.agents.size());
  CheckpointMeta meta;
  for (std::size_t g = 0; g < seq.agents.size(); ++g) {
    CHECK(save_checkpoint(seq.agents[g].policy, seq.agents[g].adam, meta) ==
          save_checkpoint(p.agents[g].policy, p.agents[g].adam, meta));
  }
  CHECK(seq.report.to_log_text() == p.report.to_log_text());
  CHECK(seq.report.train_metrics.mean_acc == p.report.train_metrics.mean_acc);
}

TEST_CASE("gor mode derives rho from group statistics unless overridden") {
  SynthSpec spec;
  spec.n = 40;
  spec.feature_dim = 5;
  spec.attr_count = 3;
  spec.rates = {0.2, 0.3, 0.1};
  spec.snr = 2.0;
  spec.seed = 5;
  auto ds = generate_synthetic(spec);
  auto groups = GroupConfig::single_group(ds.schema);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 1;
  cfg.reward_mode = RewardMode::gor;

  auto result = train(ds, groups, cfg);
  REQUIRE(result.agents[0].stats.has_value());
  auto stats = compute_group_stats(ds.labels(), groups.group(0).attributes);
  CHECK(result.agents[0].rho == stats.rho);

  cfg.rho_override = 0.4;
  auto forced = train(ds, groups, cfg);
  CHECK(forced.agents[0].rho == 0.4);
  CHECK_FALSE(forced.agents[0].stats.has_value());
}

TEST_CASE("trained greedy policy matches the counting oracle on the tiny instance") {
  auto ds = enumerable_dataset(160, 6);
  auto groups = GroupConfig::single_group(ds.schema);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 6;
  auto result = train(ds, groups, cfg);

  // Counting oracle: majority label per (feature point, attribute).
  int counts[4][3] = {};
  int totals[4] = {};
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int fidx = static_cast<int>(i % 4);
    ++totals[fidx];
    for (int a = 0; a < 3; ++a) counts[fidx][a] += ds.samples[i].labels[static_cast<std::size_t>(a)];
  }

  const Eigen::MatrixXd cols = normalized_feature_columns(ds, result.norm);
  int agree = 0;
  for (int fidx = 0; fidx < 4; ++fidx) {
    // The first occurrence of this feature point in the dataset.
    const auto bits = predict_image(result.agents, cols.col(fidx), groups);
    for (int a = 0; a < 3; ++a) {
      const int majority = 2 * counts[fidx][a] >= totals[fidx] ? 1 : 0;
      if (bits[static_cast<std::size_t>(a)] == majority) ++agree;
    }
  }
  CHECK(agree >= 11);  // at least 95% of the 12 (feature, attribute) pairs

  // Train-set metrics populated.
  CHECK(result.report.train_metrics.mean_acc > 0.5);
}

TEST_CASE("config validation rejects malformed settings") {
  TrainConfig cfg;
  cfg.epochs = -1;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = TrainConfig{};
  cfg.eps_end = 0.95;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = TrainConfig{};
  cfg.gamma = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = TrainConfig{};
  cfg.rho_override = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);

  // Mismatched schema and group config.
  auto ds = enumerable_dataset(8, 7);
  auto other = AttributeSchema::from_names({"p", "q"});
  auto wrong_groups = GroupConfig::single_group(other);
  CHECK_THROWS_AS(train(ds, wrong_groups, TrainConfig{}), ValidationError);
}
