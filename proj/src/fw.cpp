#include "sparsefw/fw.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "sparsefw/simplex.hpp"

namespace sparsefw::fw {

namespace {

using geometry::Atom;
using geometry::DomainSpec;

constexpr int kRefreshEvery = 512;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// scale existing weights by (1 - gamma) and give gamma to atom s
void merge_fw_step(SparseIterate& it, const Atom& s, double gamma, int ambient) {
  for (double& w : it.weights) w *= (1.0 - gamma);
  const int j = it.find(s, ambient);
  if (j >= 0)
    it.weights[j] += gamma;
  else {
    it.atoms.push_back(s);
    it.weights.push_back(gamma);
  }
}

SparseIterate start_iterate(const DomainSpec& domain, const QuadraticObjective& obj,
                            const RunOptions& opts, long& lmo_calls) {
  SparseIterate it;
  Atom a0;
  if (opts.start) {
    a0 = *opts.start;
  } else {
    const Eigen::VectorXd g0 = obj.gradient(Eigen::VectorXd::Zero(domain.dim));
    a0 = geometry::lmo(domain, g0, opts.lmo, opts.rng).atom;
    ++lmo_calls;
  }
  it.atoms.push_back(a0);
  it.weights.push_back(1.0);
  it.rebuild_point(domain.dim);
  return it;
}

double exact_line_step(const Eigen::VectorXd& g, const Eigen::VectorXd& d) {
  // minimizes ||x + gamma d - target||^2; <target - x, d> = -<g, d>/2
  const double den = d.squaredNorm();
  if (den < 1e-300) return 0.0;
  return -g.dot(d) / (2.0 * den);
}

double pick_gamma(StepRule rule, int t, const Eigen::VectorXd& g, const Eigen::VectorXd& d) {
  if (rule == StepRule::harmonic) return 2.0 / (t + 2.0);
  return exact_line_step(g, d);
}

void note_row(RunTrace& tr, int iter, const QuadraticObjective& obj, const SparseIterate& it,
              double gap, double gamma, StepKind kind, bool record = true) {
  if (!record && iter != 0 && kind != StepKind::terminal) return;
  TraceRow row;
  row.iter = iter;
  row.f = obj.value(it.point);
  row.gap = gap;
  row.sparsity = it.sparsity();
  row.gamma = gamma;
  row.kind = kind;
  row.lmo_calls = tr.lmo_calls;
  tr.rows.push_back(row);
}

void housekeeping(SparseIterate& it, int t, int ambient) {
  it.prune();
  if ((t + 1) % kRefreshEvery == 0) it.rebuild_point(ambient);
}

double top_eigenvalue(const Eigen::MatrixXd& sym) {
  const int n = static_cast<int>(sym.rows());
  if (n == 1) return sym(0, 0);
  // irregular deterministic start: a constant vector can be exactly
  // orthogonal to the dominant eigenvector (e.g. 2x2 with negative
  // off-diagonal), which silently locks onto the smallest eigenvalue
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i)
    w[i] = 1.0 + static_cast<double>((static_cast<std::uint64_t>(i) * 2654435761ull) % 1009) /
                     1009.0;
  w.normalize();
  double lam = 0.0;
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd y = sym * w;
    const double ny = y.norm();
    if (ny < 1e-300) return 0.0;
    w = y / ny;
    const double next = w.dot(sym * w);
    if (std::abs(next - lam) <= 1e-12 * std::max(1.0, std::abs(next))) {
      lam = next;
      break;
    }
    lam = next;
  }
  // the top eigenvalue of a PSD matrix is at least its largest diagonal entry
  return std::max(lam, sym.diagonal().maxCoeff());
}

}  // namespace

const char* step_kind_name(StepKind k) {
  switch (k) {
    case StepKind::fw: return "fw";
    case StepKind::away: return "away";
    case StepKind::drop: return "drop";
    case StepKind::corrective: return "corrective";
    case StepKind::terminal: return "terminal";
  }
  return "?";
}

const char* algo_name(Algo a) {
  switch (a) {
    case Algo::vanilla: return "vanilla";
    case Algo::away: return "away";
    case Algo::fully_corrective: return "fully_corrective";
  }
  return "?";
}

std::string RunTrace::to_csv() const {
  std::string out = "iter,f,gap,sparsity,gamma,step_kind\n";
  for (const TraceRow& r : rows) {
    out += std::to_string(r.iter);
    out += ',';
    out += fmt_double(r.f);
    out += ',';
    out += fmt_double(r.gap);
    out += ',';
    out += std::to_string(r.sparsity);
    out += ',';
    out += fmt_double(r.gamma);
    out += ',';
    out += step_kind_name(r.kind);
    out += '\n';
  }
  return out;
}

RunTrace fw_vanilla(const DomainSpec& domain, const QuadraticObjective& obj,
                    const RunOptions& opts) {
  RunTrace tr;
  SparseIterate it = start_iterate(domain, obj, opts, tr.lmo_calls);
  if (opts.observer) opts.observer(0, it);

  for (int t = 0; t < opts.steps; ++t) {
    const Eigen::VectorXd g = obj.gradient(it.point);
    const geometry::LmoResult lr = geometry::lmo(domain, g, opts.lmo, opts.rng);
    ++tr.lmo_calls;
    tr.inexact_lmo = tr.inexact_lmo || lr.inexact;

    const Eigen::VectorXd s = lr.atom.dense(domain.dim);
    const Eigen::VectorXd d = s - it.point;
    const double gap = -g.dot(d);
    if (gap <= 0.0) {
      note_row(tr, t, obj, it, gap, 0.0, StepKind::terminal);
      tr.status = RunStatus::optimal;
      tr.final = std::move(it);
      return tr;
    }

    double gamma = pick_gamma(opts.rule, t, g, d);
    gamma = std::clamp(gamma, 0.0, 1.0);
    note_row(tr, t, obj, it, gap, gamma, StepKind::fw, opts.record_rows);

    merge_fw_step(it, lr.atom, gamma, domain.dim);
    it.point += gamma * d;
    it.renormalize();
    housekeeping(it, t, domain.dim);
    if (opts.observer) opts.observer(t + 1, it);
  }
  note_row(tr, opts.steps, obj, it, std::numeric_limits<double>::quiet_NaN(), 0.0,
           StepKind::terminal);
  tr.final = std::move(it);
  return tr;
}

RunTrace fw_away(const DomainSpec& domain, const QuadraticObjective& obj, const RunOptions& opts) {
  RunTrace tr;
  SparseIterate it = start_iterate(domain, obj, opts, tr.lmo_calls);
  if (opts.observer) opts.observer(0, it);

  for (int t = 0; t < opts.steps; ++t) {
    const Eigen::VectorXd g = obj.gradient(it.point);
    const geometry::LmoResult lr = geometry::lmo(domain, g, opts.lmo, opts.rng);
    ++tr.lmo_calls;
    tr.inexact_lmo = tr.inexact_lmo || lr.inexact;

    const Eigen::VectorXd s = lr.atom.dense(domain.dim);
    const double fw_gap = -g.dot(s - it.point);
    if (fw_gap <= 0.0) {
      note_row(tr, t, obj, it, fw_gap, 0.0, StepKind::terminal);
      tr.status = RunStatus::optimal;
      tr.final = std::move(it);
      return tr;
    }

    // worst active atom
    int ai = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < it.atoms.size(); ++i) {
      const double v = it.atoms[i].dot(g);
      if (v > worst) {
        worst = v;
        ai = static_cast<int>(i);
      }
    }
    const Eigen::VectorXd a = it.atoms[ai].dense(domain.dim);
    const double away_gap = g.dot(a - it.point);

    if (fw_gap >= away_gap) {
      const Eigen::VectorXd d = s - it.point;
      double gamma = std::clamp(pick_gamma(opts.rule, t, g, d), 0.0, 1.0);
      note_row(tr, t, obj, it, fw_gap, gamma, StepKind::fw, opts.record_rows);
      merge_fw_step(it, lr.atom, gamma, domain.dim);
      it.point += gamma * d;
    } else {
      const double wa = it.weights[ai];
      const double gamma_max = wa < 1.0 - 1e-15 ? wa / (1.0 - wa) : 1e18;
      const Eigen::VectorXd d = it.point - a;
      double gamma = std::clamp(pick_gamma(opts.rule, t, g, d), 0.0, gamma_max);
      const bool drop = gamma >= gamma_max * (1.0 - 1e-12);
      note_row(tr, t, obj, it, fw_gap, gamma, drop ? StepKind::drop : StepKind::away,
               opts.record_rows);
      if (drop) {
        gamma = gamma_max;
        it.weights[ai] = 0.0;
        const double rest = 1.0 - wa;
        if (rest > 0.0)
          for (double& w : it.weights) w /= rest;
      } else {
        for (double& w : it.weights) w *= (1.0 + gamma);
        it.weights[ai] -= gamma;
      }
      it.point += gamma * d;
    }
    it.renormalize();
    housekeeping(it, t, domain.dim);
    if (opts.observer) opts.observer(t + 1, it);
  }
  note_row(tr, opts.steps, obj, it, std::numeric_limits<double>::quiet_NaN(), 0.0,
           StepKind::terminal);
  tr.final = std::move(it);
  return tr;
}

RunTrace fw_fully_corrective(const DomainSpec& domain, const QuadraticObjective& obj,
                             const RunOptions& opts) {
  RunTrace tr;
  SparseIterate it = start_iterate(domain, obj, opts, tr.lmo_calls);
  if (opts.observer) opts.observer(0, it);

  for (int t = 0; t < opts.steps; ++t) {
    const Eigen::VectorXd g = obj.gradient(it.point);
    const geometry::LmoResult lr = geometry::lmo(domain, g, opts.lmo, opts.rng);
    ++tr.lmo_calls;
    tr.inexact_lmo = tr.inexact_lmo || lr.inexact;

    const Eigen::VectorXd s = lr.atom.dense(domain.dim);
    const double gap = -g.dot(s - it.point);
    if (gap <= 0.0) {
      note_row(tr, t, obj, it, gap, 0.0, StepKind::terminal);
      tr.status = RunStatus::optimal;
      tr.final = std::move(it);
      return tr;
    }

    int new_idx = it.find(lr.atom, domain.dim);
    if (new_idx < 0) {
      it.atoms.push_back(lr.atom);
      it.weights.push_back(0.0);
      new_idx = static_cast<int>(it.atoms.size()) - 1;
    }

    // re-solve the weights over the current atom set by projected gradient
    const int k = static_cast<int>(it.atoms.size());
    Eigen::MatrixXd A(domain.dim, k);
    for (int i = 0; i < k; ++i) {
      Eigen::VectorXd col = Eigen::VectorXd::Zero(domain.dim);
      it.atoms[i].add_to(col, 1.0);
      A.col(i) = col;
    }
    const Eigen::MatrixXd gram = A.transpose() * A;
    const Eigen::VectorXd atp = A.transpose() * obj.target;
    const double lam = std::max(top_eigenvalue(gram), 1e-300);
    const double step = 1.0 / (2.0 * lam);

    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(it.weights.data(), k);
    for (int inner = 0; inner < opts.inner_iters; ++inner) {
      const Eigen::VectorXd grad_w = 2.0 * (gram * w - atp);
      Eigen::VectorXd next = project_to_simplex(w - step * grad_w);
      const double moved = (next - w).lpNorm<Eigen::Infinity>();
      w = std::move(next);
      if (moved < 1e-15) break;
    }

    const double new_weight = w[new_idx];
    note_row(tr, t, obj, it, gap, new_weight, StepKind::corrective, opts.record_rows);

    for (int i = 0; i < k; ++i) it.weights[i] = w[i];
    it.point = A * w;
    it.prune();
    if (opts.observer) opts.observer(t + 1, it);
  }
  note_row(tr, opts.steps, obj, it, std::numeric_limits<double>::quiet_NaN(), 0.0,
           StepKind::terminal);
  tr.final = std::move(it);
  return tr;
}

RunTrace run_algo(Algo algo, const DomainSpec& domain, const QuadraticObjective& obj,
                  const RunOptions& opts) {
  switch (algo) {
    case Algo::vanilla: return fw_vanilla(domain, obj, opts);
    case Algo::away: return fw_away(domain, obj, opts);
    case Algo::fully_corrective: return fw_fully_corrective(domain, obj, opts);
  }
  throw std::logic_error("run_algo: bad algo");
}

double reference_optimum(const DomainSpec& domain, const QuadraticObjective& obj, int steps,
                         int budget_factor, CounterRng* rng) {
  if (geometry::membership(domain, obj.target) != geometry::Membership::outside) return 0.0;
  RunOptions opts;
  opts.steps = steps * budget_factor;
  opts.rule = StepRule::line_search;
  opts.rng = rng;
  const RunTrace tr = fw_fully_corrective(domain, obj, opts);
  double best = std::numeric_limits<double>::infinity();
  for (const TraceRow& r : tr.rows) best = std::min(best, r.f);
  return best;
}

MinSparsityResult min_sparsity_to_tolerance(const DomainSpec& domain,
                                            const std::vector<Eigen::VectorXd>& targets,
                                            double eps, Algo algo, int max_steps,
                                            CounterRng* rng) {
  if (eps <= 0.0) throw std::invalid_argument("min_sparsity_to_tolerance: eps must be positive");
  MinSparsityResult res;
  const double eps2 = eps * eps;
  for (size_t ti = 0; ti < targets.size(); ++ti) {
    QuadraticObjective obj{targets[ti]};
    RunOptions opts;
    opts.steps = max_steps;
    opts.rule = StepRule::line_search;
    opts.rng = rng;
    const RunTrace tr = run_algo(algo, domain, obj, opts);

    SparsityRecord rec;
    rec.target_index = static_cast<int>(ti);
    rec.lmo_calls = tr.lmo_calls;
    rec.saturated = true;
    rec.k = max_steps;
    rec.error = std::sqrt(tr.rows.back().f);
    for (const TraceRow& r : tr.rows) {
      if (r.f <= eps2) {
        rec.saturated = false;
        rec.k = r.sparsity;
        rec.error = std::sqrt(r.f);
        break;
      }
    }
    res.k = std::max(res.k, rec.k);
    res.any_saturated = res.any_saturated || rec.saturated;
    res.records.push_back(rec);
  }
  return res;
}

}  // namespace sparsefw::fw
