#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <vector>

#include "pporpe/trainer.hpp"

namespace pporpe::cli {

/// episode,return,epsilon,pearson_divergence,actor_loss,critic_loss,updates
void write_train_log(std::ostream& out, const std::vector<TrainRecord>& records);
/// episode,wall_ms
void write_timing(std::ostream& out, const std::vector<TrainRecord>& records);
/// episode,return followed by nothing else; summary goes to stdout.
void write_eval(std::ostream& out, const EvalStats& stats);

struct AggregateRow {
  int episode = 0;
  int n = 0;
  double return_mean = 0.0;
  double return_ci95 = 0.0;  // 1.96 * sample sd / sqrt(n)
  double epsilon_mean = 0.0;
  double pearson_mean = 0.0;
  double actor_loss_mean = 0.0;
  double critic_loss_mean = 0.0;
};

/// Per-episode statistics across seeds. Seeds are visited in ascending order,
/// so the result does not depend on insertion order. Episodes missing from
/// some runs aggregate over the runs that have them.
std::vector<AggregateRow> aggregate(const std::map<std::uint64_t, std::vector<TrainRecord>>& runs);
void write_aggregate(std::ostream& out, const std::vector<AggregateRow>& rows);

}  // namespace pporpe::cli
