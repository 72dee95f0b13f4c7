#pragma once

#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "pporpe/tensor_net.hpp"

namespace pporpe {

struct EnvSpec {
  std::string name;
  int state_dim = 0;
  int action_dim = 0;
  int max_steps = 0;
  Vector action_low;
  Vector action_high;
};

struct StepResult {
  Vector observation;
  double reward = 0.0;
  bool terminal = false;   // episode over, by failure or by the step limit
  bool truncated = false;  // ended only because the step limit was reached
};

inline constexpr double kEnvTimeStep = 0.02;

/// Episodic control task integrated with semi-implicit Euler at kEnvTimeStep.
class Env {
 public:
  virtual ~Env() = default;

  const EnvSpec& spec() const { return spec_; }
  int step_count() const { return step_count_; }
  bool done() const { return done_; }

  Vector reset(std::mt19937_64& rng);
  /// Clamps the action to the spec bounds. Throws EpisodeError once done.
  StepResult step(const Vector& action);

  virtual Vector observation() const = 0;

 protected:
  explicit Env(EnvSpec spec) : spec_(std::move(spec)) {}

  virtual void reset_state(std::mt19937_64& rng) = 0;
  /// Advances the physics one step; returns {reward, failed}.
  virtual std::pair<double, bool> advance(const Vector& clamped_action) = 0;

 private:
  EnvSpec spec_;
  int step_count_ = 0;
  bool done_ = true;
};

/// Cart with a hinged pole, balanced from near upright. Force = 10 N * action.
/// State (x, x_dot, theta, theta_dot), theta = 0 upright; reward +1 per step;
/// fails at |theta| > 0.21 rad or |x| > 2.4.
class CartPole final : public Env {
 public:
  static constexpr double kGravity = 9.8;
  static constexpr double kCartMass = 1.0;
  static constexpr double kPoleMass = 0.1;
  static constexpr double kHalfLength = 0.5;
  static constexpr double kForceScale = 10.0;
  static constexpr double kThetaLimit = 0.21;
  static constexpr double kXLimit = 2.4;
  static constexpr double kInitRange = 0.05;

  CartPole();
  Vector observation() const override;
  void set_state(double x, double x_dot, double theta, double theta_dot);

 private:
  void reset_state(std::mt19937_64& rng) override;
  std::pair<double, bool> advance(const Vector& a) override;

  double x_ = 0, x_dot_ = 0, theta_ = 0, theta_dot_ = 0;
};

/// Torque-limited pendulum starting anywhere, rewarded for standing up.
/// theta = 0 is upright; observation (cos theta, sin theta, theta_dot);
/// reward cos(theta) - 0.01 u^2; never fails, runs the full 200 steps.
class PendulumSwingup final : public Env {
 public:
  static constexpr double kGravity = 9.81;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;
  static constexpr double kMaxTorque = 2.0;
  static constexpr double kMaxSpeed = 8.0;
  // Euler substeps per control step; one step alone drifts the energy of
  // large swings by a few percent.
  static constexpr int kSubsteps = 10;

  PendulumSwingup();
  Vector observation() const override;
  void set_state(double theta, double theta_dot);
  double theta() const { return theta_; }
  double theta_dot() const { return theta_dot_; }
  /// 0.5 m l^2 theta_dot^2 + m g l cos(theta)
  double energy() const;

 private:
  void reset_state(std::mt19937_64& rng) override;
  std::pair<double, bool> advance(const Vector& a) override;

  double theta_ = 0, theta_dot_ = 0;
};

/// Unit point mass driven by a bounded force toward the origin.
/// Reward -(x^2 + 0.1 x_dot^2 + 0.01 u^2); 100 steps.
class DoubleIntegrator final : public Env {
 public:
  static constexpr double kMaxForce = 4.0;
  static constexpr double kInitPosition = 1.0;
  static constexpr double kInitVelocity = 0.5;

  DoubleIntegrator();
  Vector observation() const override;
  void set_state(double x, double x_dot);

 private:
  void reset_state(std::mt19937_64& rng) override;
  std::pair<double, bool> advance(const Vector& a) override;

  double x_ = 0, x_dot_ = 0;
};

/// "cartpole", "pendulum-swingup" or "double-integrator".
std::unique_ptr<Env> make_env(std::string_view name);
const std::vector<std::string>& env_names();

}  // namespace pporpe
