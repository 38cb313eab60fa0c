#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "attrq/io.hpp"
#include "attrq/metrics.hpp"
#include "attrq/qnet.hpp"
#include "attrq/replay.hpp"
#include "attrq/schema.hpp"

namespace attrq {

enum class RewardMode { basic, gor };

const char* reward_mode_name(RewardMode m);
RewardMode reward_mode_from(const std::string& name);

struct TrainConfig {
  int epochs = 15;
  std::size_t replay_capacity = 2000;
  int target_update = 100;  // C, counted in optimizer steps
  int batch_size = 64;
  double gamma = 0.9;
  double eps_start = 0.9;
  double eps_end = 0.05;
  double learning_rate = 1e-4;
  RewardMode reward_mode = RewardMode::basic;
  std::uint64_t seed = 0;
  /// Forces one reward magnitude for every group (used by the rho sweep);
  /// when absent, gor mode derives rho from each group's imbalance.
  std::optional<double> rho_override;
  bool parallel_groups = false;
  int hidden1 = 512;
  int hidden2 = 128;

  void validate() const;
};

/// One agent per attribute group: policy/target networks, optimizer state
/// and a private replay memory.
struct GroupAgent {
  int group_index = 0;
  QNetwork policy;
  QNetwork target;
  AdamState adam;
  ReplayMemory replay{1};
  double rho = 1.0;                 // reward magnitude used in gor mode
  std::optional<GroupStats> stats;  // absent when overridden or in basic mode
  std::int64_t env_steps = 0;
  std::int64_t opt_steps = 0;
  std::int64_t target_syncs = 0;

  static GroupAgent for_inference(int group_index, QNetwork net);
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  int group = 0;
  double mean_loss = 0.0;    // over optimizer steps this epoch
  double mean_reward = 0.0;  // over environment steps this epoch
  double bit_accuracy = 0.0; // greedy accuracy on this group's train bits
  std::int64_t opt_steps = 0;  // cumulative after this epoch
};

struct TrainingReport {
  std::vector<EpochRecord> records;  // sorted by (group, epoch)
  MetricsReport train_metrics;       // greedy predictions on the train split
  std::int64_t total_env_steps = 0;
  std::int64_t total_opt_steps = 0;
  std::int64_t total_target_syncs = 0;

  std::string to_log_text() const;
  std::string to_summary_text(const TrainConfig& cfg) const;
};

struct TrainResult {
  std::vector<GroupAgent> agents;
  TrainingReport report;
  NormStats norm;
};

/// Exploration probability after `global_step` of `total_steps` environment
/// steps: linear from eps_start down to eps_end, clamped at the endpoints.
double epsilon_at(std::int64_t global_step, std::int64_t total_steps,
                  const TrainConfig& cfg);

/// Epsilon-greedy: explore uniformly with probability epsilon, otherwise the
/// argmax Q action with ties resolved to "absent".
Action select_action(const QNetwork& net, const Eigen::VectorXd& state_vec,
                     double epsilon, Rng& rng);

/// Greedy action without randomness (test-time policy, epsilon = 0).
Action greedy_action(const QNetwork& net, const Eigen::VectorXd& state_vec);

/// TD target: r for terminal transitions, else r + gamma * max_a' Q_target.
double td_target(double reward, bool done,
                 const std::optional<Eigen::Vector2d>& target_q_next,
                 double gamma);

/// Runs the full Q-learning procedure: per epoch, per image, per group, one
/// episode over the group's attributes with epsilon-greedy actions, replay
/// storage, minibatch TD updates and periodic target sync. Deterministic for
/// a given seed; groups train on independent derived streams, so the
/// parallel mode is step-for-step identical to the sequential one.
TrainResult train(const Dataset& dataset, const GroupConfig& groups,
                  const TrainConfig& cfg);

/// Greedy per-group episodes for one image; actions scatter back to schema
/// positions. `features_norm` must already be standardized.
std::vector<std::uint8_t> predict_image(const std::vector<GroupAgent>& agents,
                                        const Eigen::VectorXd& features_norm,
                                        const GroupConfig& groups);

LabelMatrix predict_dataset(const std::vector<GroupAgent>& agents,
                            const Dataset& dataset, const NormStats& norm,
                            const GroupConfig& groups);

}  // namespace attrq
