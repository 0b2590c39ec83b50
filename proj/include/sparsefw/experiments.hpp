#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sparsefw/config.hpp"

namespace sparsefw::harness {

inline constexpr const char* kVersion = "0.1.0";

// exit codes shared by the library and the CLI
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitViolation = 3;

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::string> files;  // paths written, relative to out_dir
  std::string message;
};

// Executes the experiment described by cfg: acquires the out-dir lock, fans
// per-trial work out to `workers` threads (merge order fixed by trial index),
// writes the per-kind CSVs plus a `manifest` file. Identical (config, seed)
// produce byte-identical CSV bodies regardless of worker count.
RunResult run_experiment(const ExperimentConfig& cfg, int workers);

struct PlotSpec {
  std::string x;
  std::string y;
  std::string group_by;  // empty: single group
  bool log_x = true;
  bool log_y = true;
  bool fit_slope = true;  // least squares on log-transformed per-x medians
};

// Reduces csv_in to per-group columnar text (x, median y) with optional
// fitted slopes. Missing columns produce kExitConfig and an error naming the
// available columns.
RunResult emit_plot_data(const std::string& csv_in, const PlotSpec& spec,
                         const std::string& out_path);

// Bounded worker pool running jobs 0..n-1; results are merged by index so the
// outcome does not depend on scheduling. Exceptions are captured per job and
// returned as error strings (empty = success).
std::vector<std::string> run_indexed_jobs(int n_jobs, int workers,
                                          const std::function<void(int)>& job);

}  // namespace sparsefw::harness
