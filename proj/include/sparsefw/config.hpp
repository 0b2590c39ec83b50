#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sparsefw::harness {

enum class ExperimentKind {
  fw_run,
  compressibility,
  bounds_table,
  randpoly_study,
  cap_study,
  aggregation,
  fast_rate,
  linear_rate,
};

const char* kind_name(ExperimentKind k);
ExperimentKind kind_from_name(const std::string& name);  // throws on unknown

// Flat experiment description. One experiment per file; fields not used by a
// given kind keep their defaults and round-trip unchanged.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::fw_run;

  // domain
  std::string domain = "l1";  // simplex | l1 | cube | nuclear | ball
  int dim = 8;
  int rows = 0;  // nuclear only
  int cols = 0;

  // algorithm
  std::string algo = "vanilla";  // vanilla | away | fully_corrective
  std::string step_rule = "line_search";  // line_search | harmonic
  int steps = 100;
  double target_scale = 1.0;

  // statistical studies
  double alpha = 0.75;
  double c = 0.01;
  int m = 32;
  double eta = 0.1;
  std::string placement = "interior";  // interior | boundary (fast_rate)
  std::string mu_star_mode = "hull";   // hull | zero (aggregation)
  long n_samples = 256;
  std::vector<long> n_grid;

  // grids
  std::vector<double> eps_grid;
  std::vector<double> delta_grid;
  std::vector<double> r_grid;
  std::vector<int> d_grid;

  // random polytopes
  std::string polytope = "spherical";  // spherical | gaussian
  int n_vertices = 64;
  double delta = 0.1;
  int n_dirs = 100000;
  long mc_samples = 100000;

  // seeds and trials
  std::uint64_t master_seed = 1;
  int n_trials = 1;
  double min_success_fraction = 1.0;

  // output
  std::string out_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

// Strict flat-JSON parsing: unknown keys rejected, every value type- and
// range-checked. Errors carry the offending field name.
ExperimentConfig parse_config_text(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Canonical serialization; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

// FNV-1a over the canonical serialization.
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace sparsefw::harness
