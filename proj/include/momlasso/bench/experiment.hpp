#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "momlasso/bench/config.hpp"
#include "momlasso/bench/records.hpp"

namespace momlasso::bench {

struct BenchOptions {
  std::size_t jobs = 1;
  /// Fill runtime_ms. Off by default so the output is byte-reproducible.
  bool timing = false;
};

/// Seed of trial `trial` in cell `cell`; also the dataset seed.
std::uint64_t trial_seed(std::uint64_t master, Index cell, Index trial);

Dataset trial_dataset(const ExperimentConfig& cfg, const GridCell& cell, Index trial);

/// Runs one estimator on one trial. Failures become a record with
/// status != "ok".
TrialRecord run_trial(const ExperimentConfig& cfg, const GridCell& cell, const std::string& estimator, Index trial,
                      bool timing = false);

/// All (cell, estimator, trial) records sorted by record_less; independent of
/// the number of jobs.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg, const BenchOptions& opts = {});

}  // namespace momlasso::bench
