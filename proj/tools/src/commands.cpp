#include "pporpe/cli/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "pporpe/cli/config_io.hpp"
#include "pporpe/cli/csv_io.hpp"
#include "pporpe/cli/surface.hpp"
#include "pporpe/cli/weights_io.hpp"
#include "pporpe/errors.hpp"

namespace pporpe::cli {

namespace fs = std::filesystem;

fs::path default_output_base() {
  if (const char* env = std::getenv("PPORPE_OUT"); env != nullptr && *env != '\0') return env;
  return "runs";
}

fs::path default_run_dir(const fs::path& base, const TrainerConfig& config) {
  return base / config.env / std::string(to_string(config.surrogate.method)) /
         std::to_string(config.seed);
}

TrainOutcome train_into(const TrainerConfig& config, const fs::path& dir) {
  fs::create_directories(dir);
  write_manifest(dir / "manifest.txt", {config, artifact_version(), utc_timestamp(), dir});

  Trainer trainer(config);
  TrainOutcome outcome{trainer.run(), dir};

  std::ofstream log(dir / "log.csv");
  write_train_log(log, outcome.records);
  std::ofstream timing(dir / "timing.csv");
  write_timing(timing, outcome.records);
  save_weights(dir / "weights.bin", {{"actor", trainer.policy().actor},
                                     {"baseline", trainer.policy().baseline},
                                     {"critic", trainer.critic().value_net},
                                     {"critic_target", trainer.critic().target_net}});
  return outcome;
}

namespace {

const std::vector<std::string> kPublicMethods{"ppo_clip", "ppo_rb", "rpe_fixed", "rpe_adaptive"};

// Training flags shared by `train` and `sweep`. Only flags the user actually
// passed override the config file.
struct TrainFlags {
  std::string config_file;
  std::map<std::string, std::string> values;

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "key=value configuration file (flags win)")
        ->check(CLI::ExistingFile);
    add(app, "--env", "env", "environment: cartpole, pendulum-swingup, double-integrator")
        ->check(CLI::IsMember(env_names()));
    add(app, "--method", "method", "surrogate method")->check(CLI::IsMember(kPublicMethods));
    add(app, "--epsilon", "epsilon", "fixed threshold for ppo_clip/ppo_rb/rpe_fixed");
    add(app, "--beta", "beta", "relative-ratio mixture weight");
    add(app, "--eta", "eta", "rollback strength for ppo_rb");
    add(app, "--kappa", "kappa", "adaptive threshold scale");
    add(app, "--lambda", "lambda", "adaptive threshold smoothing");
    add(app, "--delta-lower", "delta_lower", "adaptive threshold clamp");
    add(app, "--episodes", "episodes", "number of episodes");
    add(app, "--alpha", "learning_rate", "learning rate");
    add(app, "--gamma", "discount", "discount factor");
    add(app, "--batch", "batch_size", "minibatch size");
    add(app, "--capacity", "capacity", "replay capacity");
    add(app, "--steps-per-update", "steps_per_update", "environment steps between updates");
    add(app, "--hidden", "hidden_layers", "hidden widths, comma separated");
    add(app, "--activation", "activation", "tanh or swish");
    add(app, "--entropy", "entropy_bonus", "entropy bonus weight");
    add(app, "--actor-polyak", "actor_polyak", "baseline policy tracking rate");
    add(app, "--critic-polyak", "critic_polyak", "target critic tracking rate");
    add(app, "--max-grad-norm", "max_grad_norm", "actor gradient norm cap (<=0 disables)");
    add(app, "--per-sample-threshold", "per_sample_threshold",
        "update the adaptive threshold per sample (true/false)");
  }

  CLI::Option* add(CLI::App& app, const std::string& flag, const std::string& key,
                   const std::string& help) {
    return app.add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }

  TrainerConfig resolve() const {
    TrainerConfig config;
    if (!config_file.empty()) {
      auto file_values = parse_key_values(read_text_file(config_file));
      // a manifest doubles as a config file; its run metadata is not configuration
      for (const char* meta : {"version", "timestamp", "out"}) file_values.erase(meta);
      apply_key_values(file_values, config);
    }
    apply_key_values(values, config);
    config.validate();
    return config;
  }
};

int cmd_train(const TrainFlags& flags, const std::string& out_flag, std::ostream& out) {
  const TrainerConfig config = flags.resolve();
  const fs::path dir = out_flag.empty() ? default_run_dir(default_output_base(), config) : fs::path(out_flag);
  const TrainOutcome outcome = train_into(config, dir);
  double last = 0.0;
  const std::size_t k = std::min<std::size_t>(10, outcome.records.size());
  for (std::size_t i = outcome.records.size() - k; i < outcome.records.size(); ++i)
    last += outcome.records[i].episode_return;
  out << "trained " << outcome.records.size() << " episodes of " << config.env << " with "
      << to_string(config.surrogate.method) << " -> " << dir.string() << "\n";
  if (k > 0) out << "mean return over last " << k << " episodes: " << format_double(last / k) << "\n";
  return kExitOk;
}

int cmd_sweep(const TrainFlags& flags, std::vector<std::uint64_t> seeds, int jobs,
              const std::string& out_flag, std::ostream& out) {
  const TrainerConfig base = flags.resolve();
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  const fs::path root = out_flag.empty() ? default_output_base() / base.env /
                                               std::string(to_string(base.surrogate.method))
                                         : fs::path(out_flag);
  fs::create_directories(root);

  std::map<std::uint64_t, std::vector<TrainRecord>> runs;
  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      std::uint64_t seed = 0;
      {
        std::lock_guard lock(mu);
        if (next >= seeds.size() || failure) return;
        seed = seeds[next++];
      }
      try {
        TrainerConfig c = base;
        c.seed = seed;
        auto outcome = train_into(c, root / std::to_string(seed));
        std::lock_guard lock(mu);
        runs.emplace(seed, std::move(outcome.records));
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(seeds.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::ofstream agg(root / "aggregate.csv");
  write_aggregate(agg, aggregate(runs));
  out << "swept " << seeds.size() << " seeds -> " << (root / "aggregate.csv").string() << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& weights_path, std::string env, int episodes, std::uint64_t seed,
             const std::string& out_flag, std::ostream& out) {
  const fs::path weights(weights_path);
  const auto nets = load_weights(weights);
  if (env.empty()) {
    const fs::path manifest = weights.parent_path() / "manifest.txt";
    if (!fs::exists(manifest)) throw ConfigError("--env is required when no manifest.txt sits next to the weights");
    env = read_manifest(manifest).config.env;
  }
  const EvalStats stats = evaluate(env, find_net(nets, "actor"), episodes, seed);
  const fs::path dir = out_flag.empty() ? weights.parent_path() : fs::path(out_flag);
  if (!dir.empty()) fs::create_directories(dir);
  std::ofstream csv(dir / "eval.csv");
  write_eval(csv, stats);
  out << "episodes " << episodes << "\n"
      << "median " << format_double(stats.median) << "\n"
      << "lower_quartile " << format_double(stats.lower_quartile) << "\n"
      << "upper_quartile " << format_double(stats.upper_quartile) << "\n";
  return kExitOk;
}

int cmd_surface(const SurfaceOptions& options, const std::string& out_path, std::ostream& out) {
  const auto rows = compute_surface(options);
  if (out_path.empty() || out_path == "-") {
    write_surface(out, rows);
    return kExitOk;
  }
  const fs::path path(out_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write " + out_path);
  write_surface(file, rows);
  out << "wrote " << rows.size() << " rows -> " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Regularized PPO-family training, evaluation and loss-surface export", "pporpe"};
  app.require_subcommand(1);

  TrainFlags train_flags;
  std::string train_out;
  auto* train = app.add_subcommand("train", "train one seed and write log.csv, manifest.txt, weights.bin");
  train_flags.attach(*train);
  train->add_option("--seed", train_flags.values["seed"], "random seed");
  train->add_option("--out", train_out, "run directory (default runs/<env>/<method>/<seed>)");

  TrainFlags sweep_flags;
  std::vector<std::uint64_t> seeds{0};
  int jobs = 1;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "train several seeds and aggregate per-episode statistics");
  sweep_flags.attach(*sweep);
  sweep->add_option("--seeds", seeds, "seed list, e.g. 0,1,2")->delimiter(',');
  sweep->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_out, "sweep directory (default runs/<env>/<method>)");

  std::string weights;
  std::string eval_env;
  int eval_episodes = 100;
  std::uint64_t eval_seed = 0;
  std::string eval_out;
  auto* eval = app.add_subcommand("eval", "roll out the trained actor's mean action");
  eval->add_option("--weights", weights, "weights.bin written by train")->required();
  eval->add_option("--env", eval_env, "environment (default: from manifest.txt next to weights)")
      ->check(CLI::IsMember(env_names()));
  eval->add_option("--episodes", eval_episodes, "evaluation episodes")->check(CLI::PositiveNumber);
  eval->add_option("--seed", eval_seed, "evaluation seed");
  eval->add_option("--out", eval_out, "directory for eval.csv (default: weights directory)");

  SurfaceOptions surface_opts;
  std::string surface_out;
  auto* surface = app.add_subcommand("surface", "export negative-loss curves over a rho grid as CSV");
  surface->add_option("--rho-min", surface_opts.rho_min, "grid start");
  surface->add_option("--rho-max", surface_opts.rho_max, "grid end");
  surface->add_option("--step", surface_opts.step, "grid spacing");
  surface->add_option("--epsilon", surface_opts.epsilon, "threshold");
  surface->add_option("--beta", surface_opts.beta, "relative-ratio mixture weight");
  surface->add_option("--eta", surface_opts.eta, "rollback strength for the ppo_rb column");
  surface->add_option("--advantage", surface_opts.advantage, "advantage value (its sign picks sigma)");
  surface->add_option("--out", surface_out, "output CSV path, '-' for stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    if (train->parsed() || sweep->parsed())
      err << "valid methods: ppo_clip, ppo_rb, rpe_fixed, rpe_adaptive\n";
    return kExitUsage;
  }

  // train's --seed writes straight into the flag map; drop it when unset.
  if (train_flags.values["seed"].empty()) train_flags.values.erase("seed");

  try {
    if (train->parsed()) return cmd_train(train_flags, train_out, out);
    if (sweep->parsed()) return cmd_sweep(sweep_flags, seeds, jobs, sweep_out, out);
    if (eval->parsed()) return cmd_eval(weights, eval_env, eval_episodes, eval_seed, eval_out, out);
    if (surface->parsed()) return cmd_surface(surface_opts, surface_out, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace pporpe::cli
