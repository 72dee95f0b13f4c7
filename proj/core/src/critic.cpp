#include "pporpe/critic.hpp"

#include <cmath>

#include "pporpe/errors.hpp"

namespace pporpe {

CriticPair::CriticPair(Mlp value, double rate, double gamma)
    : value_net(std::move(value)), target_net(value_net), polyak_rate(rate), discount(gamma) {
  if (value_net.output_size() != 1) throw ContractError("value network must have one output");
  if (!(rate > 0.0 && rate <= 1.0)) throw ConfigError("critic polyak rate must lie in (0, 1]");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("discount must lie in [0, 1)");
}

double advantage(const CriticPair& pair, const Transition& t) {
  const double bootstrap = t.terminal ? 0.0 : pair.target_net.forward(t.next_state)[0];
  return t.reward + pair.discount * bootstrap - pair.value_net.forward(t.state)[0];
}

namespace {

struct BatchMatrices {
  Matrix states;
  Matrix next_states;
  Vector rewards;
  Vector continues;  // 0 for terminal transitions
};

BatchMatrices stack(std::span<const Transition> batch) {
  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index ds = batch.front().state.size();
  BatchMatrices m{Matrix(ds, n), Matrix(ds, n), Vector(n), Vector(n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const Transition& t = batch[static_cast<std::size_t>(j)];
    m.states.col(j) = t.state;
    m.next_states.col(j) = t.next_state;
    m.rewards[j] = t.reward;
    m.continues[j] = t.terminal ? 0.0 : 1.0;
  }
  return m;
}

Vector td_targets(const CriticPair& pair, const BatchMatrices& m) {
  const Vector next_v = pair.target_net.forward_batch(m.next_states).row(0).transpose();
  return m.rewards + pair.discount * m.continues.cwiseProduct(next_v);
}

}  // namespace

Vector advantages(const CriticPair& pair, std::span<const Transition> batch) {
  if (batch.empty()) return Vector();
  const BatchMatrices m = stack(batch);
  const Vector v = pair.value_net.forward_batch(m.states).row(0).transpose();
  return td_targets(pair, m) - v;
}

double critic_step(CriticPair& pair, std::span<const Transition> batch, AdamState& optimizer) {
  if (batch.empty()) throw ContractError("critic_step: empty batch");
  const BatchMatrices m = stack(batch);
  const Vector targets = td_targets(pair, m);
  ForwardCache cache;
  const Vector v = pair.value_net.forward_batch(m.states, cache).row(0).transpose();
  const Vector td = targets - v;
  const double n = static_cast<double>(batch.size());
  const double loss = 0.5 * td.squaredNorm() / n;
  if (!std::isfinite(loss)) throw NumericError("critic loss is not finite");

  // dL/dV(s_j) = -td_j / n
  GradBuffer grads(pair.value_net);
  pair.value_net.backward_batch(cache, (-td / n).transpose(), grads);
  optimize_step(pair.value_net, grads, optimizer);
  return loss;
}

void update_target(CriticPair& pair) {
  polyak_update(pair.target_net, pair.value_net, pair.polyak_rate);
}

}  // namespace pporpe
