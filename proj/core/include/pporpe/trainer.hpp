#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pporpe/critic.hpp"
#include "pporpe/envs.hpp"
#include "pporpe/policy.hpp"
#include "pporpe/replay.hpp"
#include "pporpe/surrogate.hpp"
#include "pporpe/threshold.hpp"

namespace pporpe {

struct TrainerConfig {
  std::string env = "double-integrator";
  SurrogateConfig surrogate;
  ThresholdParams threshold;
  int episodes = 300;
  int steps_per_update = 50;  // N_e
  int batch_size = 100;       // N_b
  std::size_t capacity = 100000;
  double learning_rate = 3e-4;
  double discount = 0.99;
  double actor_polyak = 0.01;
  double critic_polyak = 0.01;
  double entropy_bonus = 0.01;
  double max_grad_norm = 1.0;  // <= 0 disables clipping
  std::vector<int> hidden_layers{64, 64};
  Activation activation = Activation::swish;
  std::uint64_t seed = 0;

  /// Throws ConfigError on the first inconsistent field.
  void validate() const;
  /// Range the threshold can take during the run.
  double epsilon_min() const;
  double epsilon_max() const;
};

bool operator==(const TrainerConfig& a, const TrainerConfig& b);

/// One row per episode.
struct TrainRecord {
  int episode = 0;
  double episode_return = 0.0;
  double epsilon_mean = 0.0;        // mean threshold over this episode's updates
  double pearson_divergence = 0.0;  // mean per-batch estimate over this episode's updates
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  int updates = 0;
  std::int64_t wall_ms = 0;  // excluded from equality and from log.csv
};

bool same_outcome(const TrainRecord& a, const TrainRecord& b);

/// Diagnostics of a single actor/critic update.
struct UpdateStats {
  double epsilon = 0.0;
  double pearson_divergence = 0.0;
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double max_deviation = 0.0;  // max |rho_beta - 1| in the batch
};

/// Collects with the baseline policy and updates actor and critic from replay
/// every `steps_per_update` environment steps once the buffer holds a batch.
class Trainer {
 public:
  explicit Trainer(TrainerConfig config);

  TrainRecord run_episode();
  std::vector<TrainRecord> run();

  const TrainerConfig& config() const { return config_; }
  const PolicyPair& policy() const { return policy_; }
  const CriticPair& critic() const { return critic_; }
  const ThresholdState& threshold() const { return threshold_; }
  const std::vector<UpdateStats>& update_trace() const { return trace_; }
  const EnvSpec& env_spec() const { return env_->spec(); }

 private:
  UpdateStats update();

  TrainerConfig config_;
  std::unique_ptr<Env> env_;
  PolicyPair policy_;
  CriticPair critic_;
  AdamState actor_opt_;
  AdamState critic_opt_;
  ThresholdState threshold_;
  ReplayBuffer replay_;
  std::mt19937_64 env_rng_;
  std::mt19937_64 action_rng_;
  std::vector<UpdateStats> trace_;
  int episode_ = 0;
  int steps_since_update_ = 0;
};

/// Convenience wrapper: construct, run, return the log.
std::vector<TrainRecord> run(const TrainerConfig& config);

struct EvalStats {
  std::vector<double> returns;  // in episode order
  double median = 0.0;
  double lower_quartile = 0.0;
  double upper_quartile = 0.0;
  double mean = 0.0;
};

/// Quartiles by linear interpolation between order statistics.
EvalStats summarize_returns(std::vector<double> returns);

/// Rolls out the actor's mean action on fresh episodes seeded from `seed`.
EvalStats evaluate(const std::string& env_name, const Mlp& actor, int n_episodes,
                   std::uint64_t seed);

/// Independent stream derived from a run seed; stream ids separate consumers.
std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t stream);

/// Architecture used by the trainer: {d_s, hidden..., out}.
std::vector<int> actor_layers(const EnvSpec& spec, const std::vector<int>& hidden);
std::vector<int> critic_layers(const EnvSpec& spec, const std::vector<int>& hidden);

}  // namespace pporpe
