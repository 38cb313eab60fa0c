#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace attrq {

/// Three fully connected layers; hidden widths default to 512 and 128 and the
/// output is one Q-value per action. Rectified-linear after the two hidden
/// layers, linear output. Value semantics: copying a network deep-copies the
/// parameters.
struct QNetwork {
  Eigen::MatrixXd w1, w2, w3;
  Eigen::VectorXd b1, b2, b3;

  int input_dim() const { return static_cast<int>(w1.cols()); }
  int hidden1() const { return static_cast<int>(w1.rows()); }
  int hidden2() const { return static_cast<int>(w2.rows()); }
  std::size_t parameter_count() const;
};

/// Parameter-shaped gradient (or moment) storage.
struct Gradients {
  Eigen::MatrixXd w1, w2, w3;
  Eigen::VectorXd b1, b2, b3;

  static Gradients zeros_like(const QNetwork& net);
};

struct AdamState {
  Gradients m, v;
  std::int64_t step = 0;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState fresh(const QNetwork& net, double learning_rate = 1e-4);
};

/// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases,
/// deterministic for a given seed.
QNetwork init_network(int input_dim, std::uint64_t seed, int hidden1 = 512,
                      int hidden2 = 128);

Eigen::Vector2d forward(const QNetwork& net, const Eigen::VectorXd& state_vec);

/// Batched forward over column-stacked states (input_dim x batch).
Eigen::Matrix2Xd forward_batch(const QNetwork& net, const Eigen::MatrixXd& states);

/// Mean squared TD error over the batch and its exact parameter gradient.
/// Only the Q-value of the taken action carries error; the other head
/// contributes zero gradient.
std::pair<double, Gradients> td_loss_and_gradients(
    const QNetwork& net, const Eigen::MatrixXd& states,
    const std::vector<int>& actions, const Eigen::VectorXd& targets);

/// One Adam update with bias correction; increments the step counter.
void adam_step(QNetwork& net, const Gradients& grads, AdamState& opt);

/// Deep parameter copy for the target network.
QNetwork sync_target(const QNetwork& policy);

struct CheckpointMeta {
  std::uint32_t feature_dim = 0;   // F
  std::uint32_t attr_count = 0;    // L
  std::uint32_t group_index = 0;
  std::uint64_t schema_hash = 0;
  std::int64_t train_step = 0;
};

struct Checkpoint {
  QNetwork net;
  AdamState opt;
  CheckpointMeta meta;
};

/// Binary layout (all little-endian): magic "GRLQ", u16 version, u16 flags,
/// u32 F, u32 L, u32 D_in, u32 H1, u32 H2, u32 group, u64 schema hash,
/// i64 train step, i64 adam step, f64 adam hyperparameters (lr, beta1,
/// beta2, eps), then parameters W1 b1 W2 b2 W3 b3 (matrices row-major),
/// Adam first moments in the same order, Adam second moments, and a
/// trailing fnv1a-64 checksum of every preceding byte.
std::string save_checkpoint(const QNetwork& net, const AdamState& opt,
                            const CheckpointMeta& meta);
void save_checkpoint(const std::filesystem::path& path, const QNetwork& net,
                     const AdamState& opt, const CheckpointMeta& meta);

Checkpoint load_checkpoint(const std::string& bytes);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace attrq
