#pragma once

#include <span>

#include "pporpe/replay.hpp"
#include "pporpe/tensor_net.hpp"

namespace pporpe {

/// State-value network and its Polyak-averaged target copy.
struct CriticPair {
  Mlp value_net;
  Mlp target_net;
  double polyak_rate = 0.01;
  double discount = 0.99;

  CriticPair() = default;
  CriticPair(Mlp value, double rate, double gamma);
};

/// TD-error advantage r + gamma V_target(s') - V(s), no bootstrap on terminal.
double advantage(const CriticPair& pair, const Transition& t);

/// Advantages for a whole batch, evaluated in one forward pass per network.
Vector advantages(const CriticPair& pair, std::span<const Transition> batch);

/// One optimizer step on 0.5 * mean(TD^2) with the target net supplying V(s').
/// Returns the loss before the step.
double critic_step(CriticPair& pair, std::span<const Transition> batch, AdamState& optimizer);

void update_target(CriticPair& pair);

}  // namespace pporpe
