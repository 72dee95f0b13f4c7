#include "pporpe/cli/csv_io.hpp"

#include <cmath>

#include "pporpe/cli/config_io.hpp"

namespace pporpe::cli {

void write_train_log(std::ostream& out, const std::vector<TrainRecord>& records) {
  out << "episode,return,epsilon,pearson_divergence,actor_loss,critic_loss,updates\n";
  for (const auto& r : records) {
    out << r.episode << ',' << format_double(r.episode_return) << ','
        << format_double(r.epsilon_mean) << ',' << format_double(r.pearson_divergence) << ','
        << format_double(r.actor_loss) << ',' << format_double(r.critic_loss) << ',' << r.updates
        << '\n';
  }
}

void write_timing(std::ostream& out, const std::vector<TrainRecord>& records) {
  out << "episode,wall_ms\n";
  for (const auto& r : records) out << r.episode << ',' << r.wall_ms << '\n';
}

void write_eval(std::ostream& out, const EvalStats& stats) {
  out << "episode,return\n";
  for (std::size_t i = 0; i < stats.returns.size(); ++i)
    out << i << ',' << format_double(stats.returns[i]) << '\n';
}

std::vector<AggregateRow> aggregate(const std::map<std::uint64_t, std::vector<TrainRecord>>& runs) {
  std::size_t episodes = 0;
  for (const auto& [seed, log] : runs) episodes = std::max(episodes, log.size());
  std::vector<AggregateRow> rows;
  for (std::size_t e = 0; e < episodes; ++e) {
    AggregateRow row;
    row.episode = static_cast<int>(e);
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& [seed, log] : runs) {
      if (e >= log.size()) continue;
      const TrainRecord& r = log[e];
      ++row.n;
      sum += r.episode_return;
      row.epsilon_mean += r.epsilon_mean;
      row.pearson_mean += r.pearson_divergence;
      row.actor_loss_mean += r.actor_loss;
      row.critic_loss_mean += r.critic_loss;
    }
    const double n = row.n;
    row.return_mean = sum / n;
    row.epsilon_mean /= n;
    row.pearson_mean /= n;
    row.actor_loss_mean /= n;
    row.critic_loss_mean /= n;
    if (row.n > 1) {
      for (const auto& [seed, log] : runs) {
        if (e >= log.size()) continue;
        const double d = log[e].episode_return - row.return_mean;
        sum_sq += d * d;
      }
      row.return_ci95 = 1.96 * std::sqrt(sum_sq / (n - 1.0)) / std::sqrt(n);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_aggregate(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "episode,n,return_mean,return_ci95,epsilon_mean,pearson_mean,actor_loss_mean,"
         "critic_loss_mean\n";
  for (const auto& r : rows) {
    out << r.episode << ',' << r.n << ',' << format_double(r.return_mean) << ','
        << format_double(r.return_ci95) << ',' << format_double(r.epsilon_mean) << ','
        << format_double(r.pearson_mean) << ',' << format_double(r.actor_loss_mean) << ','
        << format_double(r.critic_loss_mean) << '\n';
  }
}

}  // namespace pporpe::cli
