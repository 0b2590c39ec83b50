#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sparsefw/domain.hpp"
#include "sparsefw/rng.hpp"

namespace sparsefw::fw {

// f(x) = ||x - target||^2, the canonical 2-smooth / 2-strongly-convex probe.
struct QuadraticObjective {
  Eigen::VectorXd target;

  double value(const Eigen::VectorXd& x) const { return (x - target).squaredNorm(); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const { return 2.0 * (x - target); }
};

inline constexpr double kPruneTol = 1e-12;

// Iterate as an explicit convex combination of atoms, plus the cached dense
// point. Weights stay on the simplex; entries at or below kPruneTol count as
// numerically dead.
struct SparseIterate {
  std::vector<geometry::Atom> atoms;
  std::vector<double> weights;
  Eigen::VectorXd point;

  int sparsity(double tol = kPruneTol) const {
    int k = 0;
    for (double w : weights)
      if (w > tol) ++k;
    return k;
  }

  double weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }

  void renormalize() {
    const double s = weight_sum();
    if (s > 0.0)
      for (double& w : weights) w /= s;
  }

  void prune(double tol = kPruneTol) {
    size_t keep = 0;
    for (size_t i = 0; i < atoms.size(); ++i) {
      if (weights[i] > tol) {
        if (keep != i) {
          atoms[keep] = std::move(atoms[i]);
          weights[keep] = weights[i];
        }
        ++keep;
      }
    }
    atoms.resize(keep);
    weights.resize(keep);
    renormalize();
  }

  void rebuild_point(int ambient) {
    point = Eigen::VectorXd::Zero(ambient);
    for (size_t i = 0; i < atoms.size(); ++i) atoms[i].add_to(point, weights[i]);
  }

  // index of a structurally equal atom, or -1
  int find(const geometry::Atom& a, int ambient) const {
    for (size_t i = 0; i < atoms.size(); ++i)
      if (atoms[i].same_as(a, ambient)) return static_cast<int>(i);
    return -1;
  }
};

enum class StepRule { harmonic, line_search };
enum class StepKind { fw, away, drop, corrective, terminal };

const char* step_kind_name(StepKind k);

struct TraceRow {
  int iter = 0;
  double f = 0.0;
  double gap = 0.0;
  int sparsity = 0;
  double gamma = 0.0;
  StepKind kind = StepKind::terminal;
  long lmo_calls = 0;  // cumulative
};

enum class RunStatus { completed, optimal };

struct RunTrace {
  std::vector<TraceRow> rows;
  RunStatus status = RunStatus::completed;
  bool inexact_lmo = false;
  long lmo_calls = 0;
  SparseIterate final;

  // header + one row per iterate: iter,f,gap,sparsity,gamma,step_kind
  std::string to_csv() const;
};

struct RunOptions {
  int steps = 100;
  StepRule rule = StepRule::line_search;
  int inner_iters = 200;                      // fully-corrective weight solver
  geometry::LmoOptions lmo;
  std::optional<geometry::Atom> start;        // default: lmo at -target
  CounterRng* rng = nullptr;                  // nuclear LMO start vectors
  bool record_rows = true;                    // false: keep only the first and terminal rows
  std::function<void(int, const SparseIterate&)> observer;  // called at every iterate
};

RunTrace fw_vanilla(const geometry::DomainSpec& domain, const QuadraticObjective& obj,
                    const RunOptions& opts);
RunTrace fw_away(const geometry::DomainSpec& domain, const QuadraticObjective& obj,
                 const RunOptions& opts);
RunTrace fw_fully_corrective(const geometry::DomainSpec& domain, const QuadraticObjective& obj,
                             const RunOptions& opts);

enum class Algo { vanilla, away, fully_corrective };

const char* algo_name(Algo a);

RunTrace run_algo(Algo algo, const geometry::DomainSpec& domain, const QuadraticObjective& obj,
                  const RunOptions& opts);

// Reference optimum for suboptimality reporting: 0 when the target is inside
// the domain, otherwise the value of a fully-corrective run with
// budget_factor times the step budget.
double reference_optimum(const geometry::DomainSpec& domain, const QuadraticObjective& obj,
                         int steps, int budget_factor = 5, CounterRng* rng = nullptr);

struct SparsityRecord {
  int target_index = 0;
  int k = 0;             // atoms carrying weight at the first iterate within tolerance
  bool saturated = false;
  long lmo_calls = 0;
  double error = 0.0;    // distance at the recording point
};

struct MinSparsityResult {
  int k = 0;  // max over targets
  bool any_saturated = false;
  std::vector<SparsityRecord> records;
};

// Worst-case measured sparsity needed to bring every target within distance
// eps. Runs `algo` until the first iterate with ||x - target|| <= eps, up to
// max_steps per target (saturation records k = max_steps).
MinSparsityResult min_sparsity_to_tolerance(const geometry::DomainSpec& domain,
                                            const std::vector<Eigen::VectorXd>& targets,
                                            double eps, Algo algo, int max_steps,
                                            CounterRng* rng = nullptr);

}  // namespace sparsefw::fw
