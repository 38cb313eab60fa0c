#include "attrq/mdp.hpp"

#include <string>

#include "attrq/errors.hpp"

namespace attrq {

namespace {

void check_group(std::span<const int> group_attrs, int attr_count) {
  if (group_attrs.empty())
    throw ValidationError("mdp: group has no attributes");
  for (int a : group_attrs) {
    if (a < 0 || a >= attr_count)
      throw ValidationError("mdp: attribute index " + std::to_string(a) +
                            " out of range for L=" + std::to_string(attr_count));
  }
}

void check_label(int label) {
  if (label != 0 && label != 1)
    throw ValidationError("mdp: label must be 0 or 1, got " +
                          std::to_string(label));
}

}  // namespace

Action action_from(int v) {
  if (v != 0 && v != 1)
    throw ValidationError("mdp: action must be 0 or 1, got " + std::to_string(v));
  return static_cast<Action>(v);
}

Eigen::VectorXd MdpState::net_input() const {
  Eigen::VectorXd x(features.size() + context.size());
  x << features, context;
  return x;
}

Eigen::VectorXd encode_attribute_context(std::span<const int> group_attrs,
                                         int step, int attr_count) {
  check_group(group_attrs, attr_count);
  if (step < 0 || static_cast<std::size_t>(step) >= group_attrs.size())
    throw ValidationError("mdp: step " + std::to_string(step) +
                          " outside episode of length " +
                          std::to_string(group_attrs.size()));
  Eigen::VectorXd v = Eigen::VectorXd::Zero(3 * attr_count);
  for (int back = 0; back < 3; ++back) {
    int t = step - back;
    if (t < 0) break;
    v[back * attr_count + group_attrs[t]] = 1.0;
  }
  return v;
}

MdpState init_episode(const Eigen::VectorXd& features, int group_index,
                      std::span<const int> group_attrs, int attr_count,
                      int sample_index) {
  check_group(group_attrs, attr_count);
  MdpState s;
  s.features = features;
  s.context = encode_attribute_context(group_attrs, 0, attr_count);
  s.step = 0;
  s.group = group_index;
  s.sample_index = sample_index;
  s.episode_length = static_cast<int>(group_attrs.size());
  return s;
}

StepOutcome transition(const MdpState& state, Action /*action*/,
                       std::span<const int> group_attrs, int attr_count) {
  check_group(group_attrs, attr_count);
  StepOutcome out;
  if (state.step + 1 >= state.episode_length) {
    out.done = true;
    return out;
  }
  MdpState next;
  next.features = state.features;
  next.context = encode_attribute_context(group_attrs, state.step + 1, attr_count);
  next.step = state.step + 1;
  next.group = state.group;
  next.sample_index = state.sample_index;
  next.episode_length = state.episode_length;
  out.next_state = std::move(next);
  out.done = false;
  return out;
}

double basic_reward(Action action, int label) {
  check_label(label);
  return action_value(action) == label ? 1.0 : -1.0;
}

double gor_reward(Action action, int label, double rho) {
  check_label(label);
  if (!(rho > 0.0) || rho > 1.0)
    throw ValidationError("mdp: reward magnitude rho must lie in (0, 1], got " +
                          std::to_string(rho));
  if (label == 1) return action == Action::present ? 1.0 : -1.0;
  return action == Action::present ? -rho : rho;
}

}  // namespace attrq
