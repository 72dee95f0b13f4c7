#include "pporpe/tensor_net.hpp"

#include <cmath>
#include <string>

#include "pporpe/errors.hpp"

namespace pporpe {

namespace {

Matrix activate(const Matrix& z, Activation a) {
  if (a == Activation::tanh) return z.array().tanh().matrix();
  // swish: z * sigmoid(z)
  return (z.array() / (1.0 + (-z.array()).exp())).matrix();
}

Matrix activation_derivative(const Matrix& z, Activation a) {
  if (a == Activation::tanh) {
    const Eigen::ArrayXXd t = z.array().tanh();
    return (1.0 - t * t).matrix();
  }
  const Eigen::ArrayXXd s = 1.0 / (1.0 + (-z.array()).exp());
  return (s + z.array() * s * (1.0 - s)).matrix();
}

}  // namespace

std::string_view to_string(Activation a) {
  return a == Activation::tanh ? "tanh" : "swish";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "swish") return Activation::swish;
  throw ConfigError("unknown activation '" + std::string(name) + "' (expected tanh or swish)");
}

Mlp::Mlp(std::vector<int> layer_sizes, Activation activation)
    : layer_sizes_(std::move(layer_sizes)), activation_(activation) {
  if (layer_sizes_.size() < 2) throw ContractError("Mlp needs at least input and output sizes");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    const int in = layer_sizes_[l];
    const int out = layer_sizes_[l + 1];
    if (in <= 0 || out <= 0) throw ContractError("Mlp layer sizes must be positive");
    offsets_.push_back(total);
    total += static_cast<std::size_t>(in) * out + out;
  }
  params_ = Vector::Zero(static_cast<Eigen::Index>(total));
}

void Mlp::initialize(std::mt19937_64& rng) {
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const int in = layer_sizes_[l];
    const int out = layer_sizes_[l + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    auto w = weight(l);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
    bias(l).setZero();
  }
}

Mlp::WeightMap Mlp::weight(std::size_t layer) {
  return WeightMap(params_.data() + offsets_[layer], layer_sizes_[layer + 1], layer_sizes_[layer]);
}

Mlp::ConstWeightMap Mlp::weight(std::size_t layer) const {
  return ConstWeightMap(params_.data() + offsets_[layer], layer_sizes_[layer + 1],
                        layer_sizes_[layer]);
}

Eigen::Map<Vector> Mlp::bias(std::size_t layer) {
  const std::size_t start =
      offsets_[layer] + static_cast<std::size_t>(layer_sizes_[layer]) * layer_sizes_[layer + 1];
  return Eigen::Map<Vector>(params_.data() + start, layer_sizes_[layer + 1]);
}

Eigen::Map<const Vector> Mlp::bias(std::size_t layer) const {
  const std::size_t start =
      offsets_[layer] + static_cast<std::size_t>(layer_sizes_[layer]) * layer_sizes_[layer + 1];
  return Eigen::Map<const Vector>(params_.data() + start, layer_sizes_[layer + 1]);
}

Vector Mlp::forward(const Vector& input) const {
  if (input.size() != input_size())
    throw ContractError("Mlp::forward: input has " + std::to_string(input.size()) +
                        " entries, expected " + std::to_string(input_size()));
  Vector h = input;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    Vector z = weight(l) * h + bias(l);
    h = (l + 1 < num_layers()) ? Vector(activate(z, activation_)) : z;
  }
  return h;
}

Matrix Mlp::forward_batch(const Matrix& inputs) const {
  ForwardCache unused;
  return forward_batch(inputs, unused);
}

Matrix Mlp::forward_batch(const Matrix& inputs, ForwardCache& cache) const {
  if (inputs.rows() != input_size())
    throw ContractError("Mlp::forward_batch: input rows " + std::to_string(inputs.rows()) +
                        " != " + std::to_string(input_size()));
  cache.inputs.resize(num_layers());
  cache.pre_activations.resize(num_layers());
  Matrix h = inputs;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    cache.inputs[l] = h;
    Matrix z = weight(l) * h;
    z.colwise() += bias(l);
    if (l + 1 < num_layers()) {
      h = activate(z, activation_);
      cache.pre_activations[l] = std::move(z);
    } else {
      h = std::move(z);
    }
  }
  return h;
}

void Mlp::backward(const Vector& input, const Vector& output_cotangent, GradBuffer& grads) const {
  if (output_cotangent.size() != output_size())
    throw ContractError("Mlp::backward: cotangent length mismatch");
  ForwardCache cache;
  forward_batch(Matrix(input), cache);
  backward_batch(cache, Matrix(output_cotangent), grads);
}

void Mlp::backward_batch(const ForwardCache& cache, const Matrix& output_cotangents,
                         GradBuffer& grads) const {
  if (grads.size() != parameter_count())
    throw ContractError("Mlp::backward: gradient buffer has a different layout");
  if (cache.inputs.size() != num_layers() || output_cotangents.rows() != output_size() ||
      output_cotangents.cols() != cache.inputs.front().cols())
    throw ContractError("Mlp::backward: cotangent shape does not match the forward cache");

  Matrix delta = output_cotangents;
  for (std::size_t l = num_layers(); l-- > 0;) {
    const int in = layer_sizes_[l];
    const int out = layer_sizes_[l + 1];
    WeightMap gw(grads.values().data() + offsets_[l], out, in);
    Eigen::Map<Vector> gb(grads.values().data() + offsets_[l] + static_cast<std::size_t>(in) * out,
                          out);
    gw.noalias() += delta * cache.inputs[l].transpose();
    gb += delta.rowwise().sum();
    if (l > 0) {
      Matrix upstream = weight(l).transpose() * delta;
      delta = upstream.cwiseProduct(activation_derivative(cache.pre_activations[l - 1], activation_));
    }
  }
}

AdamState::AdamState(const Mlp& net, AdamOptions options)
    : options_(options),
      m_(Vector::Zero(static_cast<Eigen::Index>(net.parameter_count()))),
      v_(Vector::Zero(static_cast<Eigen::Index>(net.parameter_count()))) {
  if (!(options.learning_rate >= 0.0)) throw ConfigError("learning rate must be nonnegative");
  if (!(options.beta1 > 0.0 && options.beta1 < 1.0 && options.beta2 > 0.0 && options.beta2 < 1.0))
    throw ConfigError("moment decay rates must lie in (0, 1)");
  if (!(options.epsilon > 0.0)) throw ConfigError("stabilizer must be positive");
}

void optimize_step(Mlp& net, const GradBuffer& grads, AdamState& state) {
  if (grads.size() != net.parameter_count() ||
      static_cast<std::size_t>(state.m_.size()) != net.parameter_count())
    throw ContractError("optimize_step: misaligned layouts");
  if (!grads.values().allFinite()) throw NumericError("optimize_step: non-finite gradient");

  const auto& o = state.options_;
  const Vector& g = grads.values();
  state.step_count_ += 1;
  state.m_ = o.beta1 * state.m_ + (1.0 - o.beta1) * g;
  state.v_ = o.beta2 * state.v_ + (1.0 - o.beta2) * g.cwiseProduct(g);
  const double t = static_cast<double>(state.step_count_);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  net.parameters().array() -=
      o.learning_rate * (state.m_.array() / c1) / ((state.v_.array() / c2).sqrt() + o.epsilon);
}

double clip_grad_norm(GradBuffer& grads, double max_norm) {
  const double norm = grads.values().norm();
  if (max_norm > 0.0 && norm > max_norm) grads.values() *= max_norm / norm;
  return norm;
}

void polyak_update(Mlp& target, const Mlp& source, double rate) {
  if (!target.same_shape(source)) throw ContractError("polyak_update: shape mismatch");
  if (!(rate > 0.0 && rate <= 1.0)) throw ConfigError("polyak rate must lie in (0, 1]");
  if (rate == 1.0) {
    target.parameters() = source.parameters();
    return;
  }
  // Incremental form keeps target bit-identical when it already equals source.
  target.parameters() += rate * (source.parameters() - target.parameters());
}

}  // namespace pporpe
