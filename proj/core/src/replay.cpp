#include "attrq/replay.hpp"

#include <string>

#include "attrq/errors.hpp"

namespace attrq {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0)
    throw ValidationError("replay: capacity must be positive");
  ring_.reserve(capacity_);
}

void ReplayMemory::push(Transition t) {
  if (t.done == t.next_state.has_value())
    throw ValidationError("replay: done flag inconsistent with next state");
  if (ring_.size() < capacity_) {
    ring_.push_back(std::move(t));
  } else {
    ring_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
  }
  ++pushed_;
}

const Transition& ReplayMemory::oldest(std::size_t i) const {
  if (i >= ring_.size())
    throw ValidationError("replay: index " + std::to_string(i) +
                          " out of range");
  return ring_[(head_ + i) % ring_.size()];
}

std::vector<const Transition*> ReplayMemory::sample(std::size_t k,
                                                    Rng& rng) const {
  if (k > ring_.size())
    throw ValidationError("replay: requested " + std::to_string(k) +
                          " transitions but only " +
                          std::to_string(ring_.size()) + " stored");
  std::vector<const Transition*> out;
  out.reserve(k);
  for (std::size_t idx : rng.sample_indices(ring_.size(), k))
    out.push_back(&ring_[idx]);
  return out;
}

}  // namespace attrq
