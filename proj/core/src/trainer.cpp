#include "pporpe/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "pporpe/errors.hpp"

namespace pporpe {

namespace {

enum Stream : std::uint64_t { kInitStream = 1, kEnvStream = 2, kActionStream = 3, kReplayStream = 4,
                              kEvalStream = 5 };

Mlp make_net(std::vector<int> layers, Activation act, std::mt19937_64& rng) {
  Mlp net(std::move(layers), act);
  net.initialize(rng);
  return net;
}

PolicyPair make_policy(const TrainerConfig& c, const EnvSpec& spec, std::mt19937_64& rng) {
  return PolicyPair(make_net(actor_layers(spec, c.hidden_layers), c.activation, rng), c.actor_polyak);
}

CriticPair make_critic(const TrainerConfig& c, const EnvSpec& spec, std::mt19937_64& rng) {
  return CriticPair(make_net(critic_layers(spec, c.hidden_layers), c.activation, rng),
                    c.critic_polyak, c.discount);
}

AdamOptions adam_options(double lr) {
  AdamOptions o;
  o.learning_rate = lr;
  return o;
}

}  // namespace

std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x5eedu};
  return std::mt19937_64(seq);
}

std::vector<int> actor_layers(const EnvSpec& spec, const std::vector<int>& hidden) {
  std::vector<int> layers{spec.state_dim};
  layers.insert(layers.end(), hidden.begin(), hidden.end());
  layers.push_back(2 * spec.action_dim);
  return layers;
}

std::vector<int> critic_layers(const EnvSpec& spec, const std::vector<int>& hidden) {
  std::vector<int> layers{spec.state_dim};
  layers.insert(layers.end(), hidden.begin(), hidden.end());
  layers.push_back(1);
  return layers;
}

double TrainerConfig::epsilon_min() const {
  return surrogate.method == Method::rpe_adaptive ? threshold.epsilon_min() : surrogate.epsilon;
}

double TrainerConfig::epsilon_max() const {
  return surrogate.method == Method::rpe_adaptive ? threshold.epsilon_max() : surrogate.epsilon;
}

void TrainerConfig::validate() const {
  make_env(env);  // throws for unknown names
  threshold.validate();
  surrogate.validate(epsilon_min(), epsilon_max());
  if (episodes < 0) throw ConfigError("episodes must be nonnegative");
  if (steps_per_update <= 0) throw ConfigError("steps_per_update must be positive");
  if (batch_size <= 0) throw ConfigError("batch size must be positive");
  if (capacity == 0) throw ConfigError("replay capacity must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("learning rate must be finite and nonnegative");
  if (!(discount >= 0.0 && discount < 1.0)) throw ConfigError("discount must lie in [0, 1)");
  if (!(actor_polyak > 0.0 && actor_polyak <= 1.0)) throw ConfigError("actor polyak rate must lie in (0, 1]");
  if (!(critic_polyak > 0.0 && critic_polyak <= 1.0)) throw ConfigError("critic polyak rate must lie in (0, 1]");
  if (!(entropy_bonus >= 0.0)) throw ConfigError("entropy bonus must be nonnegative");
  if (std::isnan(max_grad_norm)) throw ConfigError("max_grad_norm must be a number");
  for (int h : hidden_layers)
    if (h <= 0) throw ConfigError("hidden layer widths must be positive");
}

bool operator==(const TrainerConfig& a, const TrainerConfig& b) {
  const auto& sa = a.surrogate;
  const auto& sb = b.surrogate;
  const auto& ta = a.threshold;
  const auto& tb = b.threshold;
  return a.env == b.env && sa.method == sb.method && sa.beta == sb.beta &&
         sa.epsilon == sb.epsilon && sa.eta == sb.eta && sa.log_ratio_clamp == sb.log_ratio_clamp &&
         ta.lambda == tb.lambda && ta.kappa == tb.kappa && ta.delta_lower == tb.delta_lower &&
         ta.per_sample == tb.per_sample && a.episodes == b.episodes &&
         a.steps_per_update == b.steps_per_update && a.batch_size == b.batch_size &&
         a.capacity == b.capacity && a.learning_rate == b.learning_rate &&
         a.discount == b.discount && a.actor_polyak == b.actor_polyak &&
         a.critic_polyak == b.critic_polyak && a.entropy_bonus == b.entropy_bonus &&
         a.max_grad_norm == b.max_grad_norm &&
         a.hidden_layers == b.hidden_layers && a.activation == b.activation && a.seed == b.seed;
}

bool same_outcome(const TrainRecord& a, const TrainRecord& b) {
  return a.episode == b.episode && a.episode_return == b.episode_return &&
         a.epsilon_mean == b.epsilon_mean && a.pearson_divergence == b.pearson_divergence &&
         a.actor_loss == b.actor_loss && a.critic_loss == b.critic_loss && a.updates == b.updates;
}

Trainer::Trainer(TrainerConfig config)
    : config_((config.validate(), std::move(config))),
      env_(make_env(config_.env)),
      threshold_(config_.threshold),
      replay_(config_.capacity, derive_rng(config_.seed, kReplayStream)()),
      env_rng_(derive_rng(config_.seed, kEnvStream)),
      action_rng_(derive_rng(config_.seed, kActionStream)) {
  std::mt19937_64 init = derive_rng(config_.seed, kInitStream);
  policy_ = make_policy(config_, env_->spec(), init);
  critic_ = make_critic(config_, env_->spec(), init);
  actor_opt_ = AdamState(policy_.actor, adam_options(config_.learning_rate));
  critic_opt_ = AdamState(critic_.value_net, adam_options(config_.learning_rate));
}

UpdateStats Trainer::update() {
  const auto batch = replay_.sample(static_cast<std::size_t>(config_.batch_size));
  UpdateStats stats;
  stats.critic_loss = critic_step(critic_, batch, critic_opt_);
  const Vector adv = advantages(critic_, batch);

  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());
  const EnvSpec& spec = env_->spec();
  Matrix states(spec.state_dim, n);
  for (Eigen::Index j = 0; j < n; ++j) states.col(j) = batch[static_cast<std::size_t>(j)].state;

  ForwardCache cache;
  const Matrix raw_pi = policy_.actor.forward_batch(states, cache);
  const Matrix raw_b = policy_.baseline.forward_batch(states);

  const SurrogateConfig& sc = config_.surrogate;
  const bool adaptive = sc.method == Method::rpe_adaptive;
  const double batch_epsilon = adaptive ? threshold_.current_epsilon() : sc.epsilon;

  Matrix cotangent(raw_pi.rows(), n);
  std::vector<double> log_ratios(static_cast<std::size_t>(n));
  std::vector<double> deviations(static_cast<std::size_t>(n));
  double negative_loss = 0.0;
  double epsilon_sum = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);

  for (Eigen::Index j = 0; j < n; ++j) {
    const auto k = static_cast<std::size_t>(j);
    const Vector& action = batch[k].action;
    const Vector out_pi = raw_pi.col(j);
    const double log_pi = log_prob(head_from_output(out_pi), action);
    const double log_b = log_prob(head_from_output(raw_b.col(j)), action);
    const double rho = density_ratio(log_pi, log_b, sc.log_ratio_clamp);
    const RatioPoint point = RatioPoint::make(rho, adv[j], sc.beta);
    log_ratios[k] = std::log(rho);
    deviations[k] = std::abs(point.rho_beta - 1.0);

    double eps = batch_epsilon;
    if (adaptive && config_.threshold.per_sample) {
      eps = threshold_.current_epsilon();
      threshold_.observe(std::span<const double>(&deviations[k], 1));
    }
    epsilon_sum += eps;

    const double w = surrogate_coefficient(point, sc, eps);
    negative_loss += surrogate_negative_loss(point, sc, eps);
    cotangent.col(j) = -(w * inv_n) * log_prob_output_gradient(out_pi, action) -
                       (config_.entropy_bonus * inv_n) * entropy_output_gradient(out_pi);
  }

  stats.actor_loss = -negative_loss * inv_n;
  if (!std::isfinite(stats.actor_loss) || !cotangent.allFinite()) {
    std::ostringstream os;
    os << "actor loss became non-finite at episode " << episode_ << " (loss " << stats.actor_loss
       << ", critic loss " << stats.critic_loss << ")";
    throw NumericError(os.str());
  }

  GradBuffer grads(policy_.actor);
  policy_.actor.backward_batch(cache, cotangent, grads);
  clip_grad_norm(grads, config_.max_grad_norm);
  optimize_step(policy_.actor, grads, actor_opt_);
  update_baseline(policy_);
  update_target(critic_);
  if (adaptive && !config_.threshold.per_sample) threshold_.observe(deviations);

  stats.epsilon = epsilon_sum * inv_n;
  stats.pearson_divergence = pearson_divergence_estimate(log_ratios);
  stats.max_deviation = *std::max_element(deviations.begin(), deviations.end());
  trace_.push_back(stats);
  return stats;
}

TrainRecord Trainer::run_episode() {
  const auto start = std::chrono::steady_clock::now();
  TrainRecord rec;
  rec.episode = episode_;
  double eps_sum = 0.0, pe_sum = 0.0, actor_sum = 0.0, critic_sum = 0.0;

  Vector obs = env_->reset(env_rng_);
  bool done = false;
  while (!done) {
    const GaussianHead h = head(policy_.baseline, obs);
    Vector action = sample(h, action_rng_);
    const double behavior_lp = log_prob(h, action);
    StepResult step = env_->step(action);
    rec.episode_return += step.reward;
    done = step.terminal;
    replay_.push({obs, std::move(action), step.reward, step.observation,
                  step.terminal && !step.truncated, behavior_lp});
    obs = std::move(step.observation);

    if (++steps_since_update_ >= config_.steps_per_update &&
        replay_.size() >= static_cast<std::size_t>(config_.batch_size)) {
      steps_since_update_ = 0;
      const UpdateStats s = update();
      eps_sum += s.epsilon;
      pe_sum += s.pearson_divergence;
      actor_sum += s.actor_loss;
      critic_sum += s.critic_loss;
      ++rec.updates;
    }
  }

  if (rec.updates > 0) {
    const double k = rec.updates;
    rec.epsilon_mean = eps_sum / k;
    rec.pearson_divergence = pe_sum / k;
    rec.actor_loss = actor_sum / k;
    rec.critic_loss = critic_sum / k;
  } else {
    // No update this episode: report the threshold that would apply next.
    rec.epsilon_mean = config_.surrogate.method == Method::rpe_adaptive
                           ? threshold_.current_epsilon()
                           : config_.surrogate.epsilon;
  }
  rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  ++episode_;
  return rec;
}

std::vector<TrainRecord> Trainer::run() {
  std::vector<TrainRecord> log;
  log.reserve(static_cast<std::size_t>(config_.episodes));
  for (int e = 0; e < config_.episodes; ++e) log.push_back(run_episode());
  return log;
}

std::vector<TrainRecord> run(const TrainerConfig& config) { return Trainer(config).run(); }

EvalStats summarize_returns(std::vector<double> returns) {
  EvalStats s;
  s.returns = returns;
  if (returns.empty()) return s;
  std::sort(returns.begin(), returns.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(returns.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, returns.size() - 1);
    return returns[lo] + (pos - static_cast<double>(lo)) * (returns[hi] - returns[lo]);
  };
  s.median = quantile(0.5);
  s.lower_quartile = quantile(0.25);
  s.upper_quartile = quantile(0.75);
  double sum = 0.0;
  for (double r : returns) sum += r;
  s.mean = sum / static_cast<double>(returns.size());
  return s;
}

EvalStats evaluate(const std::string& env_name, const Mlp& actor, int n_episodes,
                   std::uint64_t seed) {
  auto env = make_env(env_name);
  if (actor.input_size() != env->spec().state_dim ||
      actor.output_size() != 2 * env->spec().action_dim)
    throw ContractError("evaluate: actor shape does not fit environment " + env_name);
  std::mt19937_64 rng = derive_rng(seed, kEvalStream);
  std::vector<double> returns;
  for (int e = 0; e < n_episodes; ++e) {
    Vector obs = env->reset(rng);
    double total = 0.0;
    bool done = false;
    while (!done) {
      StepResult step = env->step(head(actor, obs).mean);
      total += step.reward;
      done = step.terminal;
      obs = std::move(step.observation);
    }
    returns.push_back(total);
  }
  return summarize_returns(std::move(returns));
}

}  // namespace pporpe
