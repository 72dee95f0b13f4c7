#pragma once

#include <cstddef>
#include <deque>
#include <random>
#include <vector>

#include "pporpe/tensor_net.hpp"

namespace pporpe {

struct Transition {
  Vector state;
  Vector action;
  double reward = 0.0;
  Vector next_state;
  bool terminal = false;         // true only when the episode ended by failure
  double behavior_log_prob = 0;  // log b(a|s) at collection time, diagnostics only
};

/// Bounded FIFO of transitions with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::uint64_t seed);

  void push(Transition t);
  std::vector<Transition> sample(std::size_t n);

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return storage_.empty(); }
  const Transition& operator[](std::size_t i) const { return storage_[i]; }

 private:
  std::size_t capacity_;
  std::deque<Transition> storage_;
  std::mt19937_64 rng_;
};

}  // namespace pporpe
