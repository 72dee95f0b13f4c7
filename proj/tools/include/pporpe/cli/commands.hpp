#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "pporpe/trainer.hpp"

namespace pporpe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the `pporpe` binary and the tests. `args` excludes
/// the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Base directory for run trees: $PPORPE_OUT when set, else "runs".
std::filesystem::path default_output_base();

/// runs/<env>/<method>/<seed> under `base`.
std::filesystem::path default_run_dir(const std::filesystem::path& base, const TrainerConfig& config);

struct TrainOutcome {
  std::vector<TrainRecord> records;
  std::filesystem::path dir;
};

/// Writes manifest.txt, trains, then writes log.csv, timing.csv and weights.bin.
TrainOutcome train_into(const TrainerConfig& config, const std::filesystem::path& dir);

}  // namespace pporpe::cli
