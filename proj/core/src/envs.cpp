#include "pporpe/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pporpe/errors.hpp"

namespace pporpe {

namespace {

EnvSpec make_spec(std::string name, int ds, int da, int max_steps, double bound) {
  return {std::move(name), ds, da, max_steps, Vector::Constant(da, -bound),
          Vector::Constant(da, bound)};
}

// Maps an angle onto (-pi, pi].
double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(theta + std::numbers::pi, two_pi);
  if (w < 0.0) w += two_pi;
  w -= std::numbers::pi;
  return w == -std::numbers::pi ? std::numbers::pi : w;
}

}  // namespace

Vector Env::reset(std::mt19937_64& rng) {
  reset_state(rng);
  step_count_ = 0;
  done_ = false;
  return observation();
}

StepResult Env::step(const Vector& action) {
  if (done_) throw EpisodeError(spec_.name + ": step called after the episode ended");
  if (action.size() != spec_.action_dim)
    throw ContractError(spec_.name + ": action dimension mismatch");
  const Vector clamped = action.cwiseMax(spec_.action_low).cwiseMin(spec_.action_high);
  auto [reward, failed] = advance(clamped);
  ++step_count_;
  const bool out_of_time = step_count_ >= spec_.max_steps;
  done_ = failed || out_of_time;
  return {observation(), reward, done_, out_of_time && !failed};
}

// ---------------------------------------------------------------------------

CartPole::CartPole() : Env(make_spec("cartpole", 4, 1, 200, 1.0)) {}

Vector CartPole::observation() const {
  Vector o(4);
  o << x_, x_dot_, theta_, theta_dot_;
  return o;
}

void CartPole::set_state(double x, double x_dot, double theta, double theta_dot) {
  x_ = x;
  x_dot_ = x_dot;
  theta_ = theta;
  theta_dot_ = theta_dot;
}

void CartPole::reset_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-kInitRange, kInitRange);
  x_ = u(rng);
  x_dot_ = u(rng);
  theta_ = u(rng);
  theta_dot_ = u(rng);
}

std::pair<double, bool> CartPole::advance(const Vector& a) {
  constexpr double total_mass = kCartMass + kPoleMass;
  constexpr double pole_ml = kPoleMass * kHalfLength;
  const double force = kForceScale * a[0];
  const double c = std::cos(theta_);
  const double s = std::sin(theta_);
  const double temp = (force + pole_ml * theta_dot_ * theta_dot_ * s) / total_mass;
  const double theta_acc =
      (kGravity * s - c * temp) /
      (kHalfLength * (4.0 / 3.0 - kPoleMass * c * c / total_mass));
  const double x_acc = temp - pole_ml * theta_acc * c / total_mass;

  x_dot_ += kEnvTimeStep * x_acc;
  x_ += kEnvTimeStep * x_dot_;
  theta_dot_ += kEnvTimeStep * theta_acc;
  theta_ += kEnvTimeStep * theta_dot_;

  const bool failed = std::abs(theta_) > kThetaLimit || std::abs(x_) > kXLimit;
  return {1.0, failed};
}

// ---------------------------------------------------------------------------

PendulumSwingup::PendulumSwingup()
    : Env(make_spec("pendulum-swingup", 3, 1, 200, kMaxTorque)) {}

Vector PendulumSwingup::observation() const {
  Vector o(3);
  o << std::cos(theta_), std::sin(theta_), theta_dot_;
  return o;
}

void PendulumSwingup::set_state(double theta, double theta_dot) {
  theta_ = wrap_angle(theta);
  theta_dot_ = theta_dot;
}

double PendulumSwingup::energy() const {
  return 0.5 * kMass * kLength * kLength * theta_dot_ * theta_dot_ +
         kMass * kGravity * kLength * std::cos(theta_);
}

void PendulumSwingup::reset_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> speed(-1.0, 1.0);
  theta_ = wrap_angle(angle(rng));
  theta_dot_ = speed(rng);
}

std::pair<double, bool> PendulumSwingup::advance(const Vector& a) {
  const double u = a[0];
  const double reward = std::cos(theta_) - 0.01 * u * u;
  const double h = kEnvTimeStep / kSubsteps;
  for (int i = 0; i < kSubsteps; ++i) {
    const double theta_acc =
        kGravity / kLength * std::sin(theta_) + u / (kMass * kLength * kLength);
    theta_dot_ = std::clamp(theta_dot_ + h * theta_acc, -kMaxSpeed, kMaxSpeed);
    theta_ = wrap_angle(theta_ + h * theta_dot_);
  }
  return {reward, false};
}

// ---------------------------------------------------------------------------

DoubleIntegrator::DoubleIntegrator()
    : Env(make_spec("double-integrator", 2, 1, 100, kMaxForce)) {}

Vector DoubleIntegrator::observation() const {
  Vector o(2);
  o << x_, x_dot_;
  return o;
}

void DoubleIntegrator::set_state(double x, double x_dot) {
  x_ = x;
  x_dot_ = x_dot;
}

void DoubleIntegrator::reset_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-kInitPosition, kInitPosition);
  std::uniform_real_distribution<double> vel(-kInitVelocity, kInitVelocity);
  x_ = pos(rng);
  x_dot_ = vel(rng);
}

std::pair<double, bool> DoubleIntegrator::advance(const Vector& a) {
  const double u = a[0];
  const double reward = -(x_ * x_ + 0.1 * x_dot_ * x_dot_ + 0.01 * u * u);
  x_dot_ += kEnvTimeStep * u;
  x_ += kEnvTimeStep * x_dot_;
  return {reward, false};
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& env_names() {
  static const std::vector<std::string> names{"cartpole", "pendulum-swingup",
                                              "double-integrator"};
  return names;
}

std::unique_ptr<Env> make_env(std::string_view name) {
  if (name == "cartpole") return std::make_unique<CartPole>();
  if (name == "pendulum-swingup") return std::make_unique<PendulumSwingup>();
  if (name == "double-integrator") return std::make_unique<DoubleIntegrator>();
  throw ConfigError("unknown environment '" + std::string(name) +
                    "' (expected cartpole, pendulum-swingup or double-integrator)");
}

}  // namespace pporpe
