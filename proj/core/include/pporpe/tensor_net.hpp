#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace pporpe {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Activation { tanh, swish };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

class GradBuffer;

// Activations recorded by Mlp::forward_batch for a later backward pass.
// Column j of every matrix belongs to sample j.
struct ForwardCache {
  std::vector<Matrix> inputs;       // input to each layer
  std::vector<Matrix> pre_activations;
};

/// Dense feed-forward network. Hidden layers apply the activation, the last
/// layer is linear. All parameters live in one contiguous vector laid out
/// layer by layer as [W (row-major out x in), b (out)], which is also the
/// layout of GradBuffer and the optimizer moments.
class Mlp {
 public:
  Mlp() = default;
  /// `layer_sizes` includes the input and output widths, e.g. {4, 64, 64, 2}.
  /// Parameters start at zero; call `initialize` for random weights.
  explicit Mlp(std::vector<int> layer_sizes, Activation activation = Activation::swish);

  /// Uniform in +-sqrt(6 / (fan_in + fan_out)) for weights, zero biases.
  void initialize(std::mt19937_64& rng);

  Vector forward(const Vector& input) const;
  Matrix forward_batch(const Matrix& inputs) const;
  Matrix forward_batch(const Matrix& inputs, ForwardCache& cache) const;

  /// Accumulates d(cotangent . output)/d(theta) into `grads`.
  void backward(const Vector& input, const Vector& output_cotangent, GradBuffer& grads) const;
  /// Batched form: column j of `output_cotangents` pairs with sample j in `cache`.
  void backward_batch(const ForwardCache& cache, const Matrix& output_cotangents,
                      GradBuffer& grads) const;

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  Activation activation() const { return activation_; }
  int input_size() const { return layer_sizes_.front(); }
  int output_size() const { return layer_sizes_.back(); }
  std::size_t num_layers() const { return layer_sizes_.size() - 1; }
  std::size_t parameter_count() const { return static_cast<std::size_t>(params_.size()); }

  Vector& parameters() { return params_; }
  const Vector& parameters() const { return params_; }

  using WeightMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using ConstWeightMap =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

  WeightMap weight(std::size_t layer);
  ConstWeightMap weight(std::size_t layer) const;
  Eigen::Map<Vector> bias(std::size_t layer);
  Eigen::Map<const Vector> bias(std::size_t layer) const;

  bool same_shape(const Mlp& other) const {
    return layer_sizes_ == other.layer_sizes_;
  }

 private:
  std::vector<int> layer_sizes_;
  std::vector<std::size_t> offsets_;  // start of W for each layer
  Activation activation_ = Activation::swish;
  Vector params_;
};

/// Gradient accumulator with the parameter layout of one Mlp.
class GradBuffer {
 public:
  GradBuffer() = default;
  explicit GradBuffer(const Mlp& net) : values_(Vector::Zero(net.parameter_count())) {}

  void zero() { values_.setZero(); }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  Vector& values() { return values_; }
  const Vector& values() const { return values_; }

 private:
  Vector values_;
};

struct AdamOptions {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected adaptive-moment state for one network.
class AdamState {
 public:
  AdamState() = default;
  AdamState(const Mlp& net, AdamOptions options);

  const AdamOptions& options() const { return options_; }
  std::int64_t step_count() const { return step_count_; }
  const Vector& first_moment() const { return m_; }
  const Vector& second_moment() const { return v_; }

 private:
  friend void optimize_step(Mlp&, const GradBuffer&, AdamState&);
  AdamOptions options_;
  std::int64_t step_count_ = 0;
  Vector m_;
  Vector v_;
};

/// theta <- theta - lr * mhat / (sqrt(vhat) + eps). Throws NumericError and
/// leaves both the net and the state untouched if any gradient is non-finite.
void optimize_step(Mlp& net, const GradBuffer& grads, AdamState& state);

/// Rescales grads so their Euclidean norm is at most `max_norm`; returns the
/// norm before scaling. max_norm <= 0 disables clipping.
double clip_grad_norm(GradBuffer& grads, double max_norm);

/// target <- (1 - rate) * target + rate * source, elementwise.
void polyak_update(Mlp& target, const Mlp& source, double rate);

}  // namespace pporpe
