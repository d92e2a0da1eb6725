#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ktb/harness/config.hpp"
#include "ktb/harness/stats.hpp"
#include "ktb/optimizer.hpp"

namespace ktb::harness {

struct TrialResult {
  Index trial = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  RunTrace trace;
};

struct BenchResult {
  std::filesystem::path out_dir;
  std::vector<TrialResult> trials;
  std::vector<SummaryRow> summary;
  bool all_ok() const;
};

/// Seed of trial t: base seed + t, so trial t of every method shares its
/// initial design.
std::uint64_t trial_seed(const BenchConfig& config, Index trial);

/// Runs one trial in memory.
RunTrace run_trial(const BenchConfig& config, Index trial);

/// Runs every trial (up to `jobs` at once) and writes trial_NNN.csv,
/// summary.csv, manifest.json and trace.svg into the run directory.
BenchResult run_benchmark(const BenchConfig& config);

/// Trace CSV: trial,step,eval_index,objective_1[,objective_2],incumbent_or_hv,wall_ms
/// Failed evaluations are omitted.
std::string trace_csv(const RunTrace& trace, Index trial, bool wall_time);

/// Reads a trace CSV back as (eval_index, incumbent_or_hv) pairs.
TrialSeries read_trace_series(const std::filesystem::path& csv);

/// Writes via a temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace ktb::harness
