#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "sparsefw/fw.hpp"

namespace sparsefw::statlab {

// Gaussian sequence model y = mu_star + noise_scale * g over a finite
// normalized dictionary. noise_scale defaults to 1/sqrt(n_samples).
struct SequenceModelInstance {
  Eigen::VectorXd mu_star;
  long n_samples = 0;
  double noise_scale = 0.0;
  std::vector<Eigen::VectorXd> dictionary;  // unit rows
  Eigen::VectorXd y;
  std::uint64_t seed = 0;

  int ambient() const { return static_cast<int>(mu_star.size()); }
  int n_atoms() const { return static_cast<int>(dictionary.size()); }
};

// Draws g standard normal from (seed, trial) and assembles the instance.
// Throws if dictionary rows are not unit norm within 1e-12.
SequenceModelInstance make_instance(Eigen::VectorXd mu_star,
                                    std::vector<Eigen::VectorXd> dictionary, long n_samples,
                                    std::uint64_t seed, std::uint64_t trial = 0,
                                    std::optional<double> noise_override = std::nullopt);

// Analytic width of the class spanned by k active atoms out of m:
// sqrt(3k + 6(pi + k ln m)), plus sqrt(2 ln(1/eta)) in the high-probability
// form. Used as a comparison curve, not as an estimator of the supremum.
double gaussian_width_envelope(int k, int m);
double gaussian_width_envelope(int k, int m, double eta);

struct LocalizedBound {
  double envelope = 0.0;     // high-probability width
  double excess_term = 0.0;  // (8/n) * envelope^2
};

LocalizedBound localized_bound_terms(const SequenceModelInstance& inst, int k, double eta);

struct RiskRecord {
  int k = 0;
  double opt_err = 0.0;         // empirical-risk suboptimality at step k
  double excess_risk = 0.0;     // ||mu*-x_k||^2 minus the hull infimum
  double term_sparse = 0.0;     // k ln(m)/n
  double term_deviation = 0.0;  // sqrt(k ln m) ln(1/eta)/n
  double envelope_excess = 0.0; // opt_err + (8/n) envelope(k)^2
};

struct AggregationRun {
  std::vector<RiskRecord> records;  // one per iterate, k = 0..k_steps
  double empirical_min = 0.0;       // reference min of ||y-x||^2 over the hull
  double hull_min = 0.0;            // reference min of ||mu*-x||^2 over the hull
  fw::RunTrace trace;
};

// Minimizes ||y - x||^2 over conv(dictionary) and records risk diagnostics at
// every iterate. Reference optima come from a 10x-budget fully-corrective run
// (exact zero when the target lies in the hull).
AggregationRun run_aggregation(const SequenceModelInstance& inst, int k_steps, fw::Algo algo,
                               double eta = 0.1);

struct FastRateRow {
  long n = 0;
  int m = 0;
  double alpha = 0.0;
  double c = 0.0;
  int k = 0;
  std::uint64_t seed_index = 0;
  double opt_err = 0.0;
  double excess_risk = 0.0;
  double bound_value = 0.0;          // opt_err + k ln(m)/n + sqrt(k ln m) ln(1/eta)/n
  double rho = 0.0;                  // constructed interior radius of mu*
  double erm_interior_radius = 0.0;  // certified radius of the exact ERM point
};

struct FastRateStudy {
  std::vector<FastRateRow> rows;
  std::vector<long> n_grid;
  std::vector<int> k_of_n;
  std::vector<double> rho_of_n;
  std::vector<double> median_excess;
  double slope = 0.0;  // log-log least squares on the medians
};

// Early-stopped aggregation over the m-vertex simplex hull with the risk
// minimizer placed at interior radius rho(n) = c * n^((alpha-1)/2) by mixing
// the barycenter with a random vertex; budget k(n) = ceil(32 alpha n^(1-alpha)
// ln(n) / c). Noise components orthogonal to the hull's span only shift the
// objective by a constant, so the computation runs in span coordinates.
// Throws if the requested radius exceeds the barycenter's certified radius.
FastRateStudy interior_fast_rate_study(double alpha, double c, const std::vector<long>& n_grid,
                                       int m, double eta, std::uint64_t seed,
                                       int n_trials = 100);

// Control with no interior margin: mu* sits on the boundary of the full
// cross-polytope hull (m = 2n signed basis atoms) and the budget
// k(n) = ceil(sqrt(n / ln m)) balances the optimization and sparse-variance
// terms. Expected log-log slope is near -1/2.
FastRateStudy exterior_control_study(const std::vector<long>& n_grid, double eta,
                                     std::uint64_t seed, int n_trials = 100);

struct LinearRateRow {
  double r = 0.0;
  std::uint64_t seed_index = 0;
  double eps0 = 0.0;
  int k_checked = 0;
  double worst_margin = 0.0;  // min over k of envelope(k) - eps(k)
  bool satisfied = false;
  double contraction = 0.0;   // geometric-mean per-step factor until flooring
};

struct LinearRateResult {
  std::vector<LinearRateRow> rows;
  bool all_satisfied = false;
};

// For targets placed at certified relative-interior radius >= r, checks
// eps(k) <= eps(0) * (1 - r^2/16)^k for line-search vanilla runs, k <= k_max.
// Supports simplex and l1 domains, where certified placement is exact.
LinearRateResult linear_rate_check(const geometry::DomainSpec& domain,
                                   const std::vector<double>& r_grid, int k_max, int seeds,
                                   std::uint64_t master_seed);

// Shared small helpers, also used by the experiment harness.
double median_of(std::vector<double> v);
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sparsefw::statlab
