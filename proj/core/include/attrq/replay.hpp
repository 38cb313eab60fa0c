#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "attrq/mdp.hpp"
#include "attrq/rng.hpp"

namespace attrq {

/// One stored experience (s, a, r, s'). next_state is absent exactly when
/// the transition ended its episode.
struct Transition {
  Eigen::VectorXd state;
  Action action = Action::absent;
  double reward = 0.0;
  std::optional<Eigen::VectorXd> next_state;
  bool done = false;
};

/// Fixed-capacity ring of transitions with FIFO eviction and uniform
/// without-replacement minibatch sampling.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void push(Transition t);

  std::size_t size() const { return ring_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t total_pushed() const { return pushed_; }

  /// i-th oldest transition currently held (0 = next to be evicted).
  const Transition& oldest(std::size_t i) const;

  /// k distinct transitions drawn uniformly; deterministic given the rng
  /// state. Throws when fewer than k are stored.
  std::vector<const Transition*> sample(std::size_t k, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> ring_;
  std::size_t head_ = 0;  // slot holding the oldest entry once full
  std::uint64_t pushed_ = 0;
};

}  // namespace attrq
