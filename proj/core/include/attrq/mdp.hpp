#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>

namespace attrq {

/// Binary decision: does the attribute under consideration exist.
enum class Action : int { absent = 0, present = 1 };

inline int action_value(Action a) { return static_cast<int>(a); }
Action action_from(int v);

/// The decision-process state: the image feature vector paired with a
/// context vector encoding the attribute examined now and at the previous
/// two steps. One episode walks one group's attributes in order.
struct MdpState {
  Eigen::VectorXd features;  // f, dimension F
  Eigen::VectorXd context;   // v, dimension 3*L (stacked one-hot blocks)
  int step = 0;              // t, 0-based position within the episode
  int group = 0;
  int sample_index = 0;
  int episode_length = 0;    // T, the group's attribute count

  /// Network input [f; v] of dimension F + 3L.
  Eigen::VectorXd net_input() const;
};

struct StepOutcome {
  std::optional<MdpState> next_state;  // absent when the episode ends
  double reward = 0.0;                 // filled by the caller
  bool done = false;
};

/// Context vector for step t: [one_hot(attr_t), one_hot(attr_{t-1}),
/// one_hot(attr_{t-2})], with zero blocks where the step does not exist.
Eigen::VectorXd encode_attribute_context(std::span<const int> group_attrs,
                                         int step, int attr_count);

MdpState init_episode(const Eigen::VectorXd& features, int group_index,
                      std::span<const int> group_attrs, int attr_count,
                      int sample_index);

/// Deterministic transition: same features, step advanced, context
/// re-encoded. The action never influences the successor state.
StepOutcome transition(const MdpState& state, Action action,
                       std::span<const int> group_attrs, int attr_count);

/// +1 when the action matches the label, -1 otherwise.
double basic_reward(Action action, int label);

/// Group-optimized reward: full +-1 feedback on positive labels, scaled
/// +-rho feedback on negative labels.
double gor_reward(Action action, int label, double rho);

}  // namespace attrq
