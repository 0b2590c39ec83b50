#include "sparsefw/statlab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "sparsefw/simplex.hpp"

namespace sparsefw::statlab {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXd l1_ball_projection(const Eigen::VectorXd& y) {
  if (y.lpNorm<1>() <= 1.0) return y;
  Eigen::VectorXd w = project_to_simplex(y.cwiseAbs());
  for (int i = 0; i < w.size(); ++i)
    if (y[i] < 0) w[i] = -w[i];
  return w;
}

}  // namespace

SequenceModelInstance make_instance(Eigen::VectorXd mu_star,
                                    std::vector<Eigen::VectorXd> dictionary, long n_samples,
                                    std::uint64_t seed, std::uint64_t trial,
                                    std::optional<double> noise_override) {
  require(mu_star.size() > 0, "make_instance: empty mu_star");
  require(n_samples >= 1, "make_instance: n_samples must be positive");
  require(!dictionary.empty(), "make_instance: empty dictionary");
  for (const auto& row : dictionary) {
    require(row.size() == mu_star.size(), "make_instance: dictionary row dimension mismatch");
    require(std::abs(row.norm() - 1.0) <= 1e-12, "make_instance: dictionary rows must be unit norm");
  }
  SequenceModelInstance inst;
  inst.mu_star = std::move(mu_star);
  inst.n_samples = n_samples;
  inst.noise_scale =
      noise_override ? *noise_override : 1.0 / std::sqrt(static_cast<double>(n_samples));
  require(inst.noise_scale >= 0.0, "make_instance: negative noise scale");
  inst.dictionary = std::move(dictionary);
  inst.seed = seed;
  CounterRng rng(seed, trial, stream::kNoise);
  inst.y = inst.mu_star + inst.noise_scale * rng.gaussian_vector(inst.ambient());
  return inst;
}

double gaussian_width_envelope(int k, int m) {
  require(k >= 0, "gaussian_width_envelope: k must be nonnegative");
  require(m >= 1, "gaussian_width_envelope: m must be positive");
  const double kk = static_cast<double>(k);
  return std::sqrt(3.0 * kk + 6.0 * (kPi + kk * std::log(static_cast<double>(m))));
}

double gaussian_width_envelope(int k, int m, double eta) {
  require(eta > 0.0 && eta <= 1.0, "gaussian_width_envelope: eta must be in (0, 1]");
  return gaussian_width_envelope(k, m) + std::sqrt(2.0 * std::log(1.0 / eta));
}

LocalizedBound localized_bound_terms(const SequenceModelInstance& inst, int k, double eta) {
  require(k >= 1, "localized_bound_terms: k must be positive");
  LocalizedBound out;
  out.envelope = gaussian_width_envelope(k, inst.n_atoms(), eta);
  out.excess_term =
      8.0 / static_cast<double>(inst.n_samples) * out.envelope * out.envelope;
  return out;
}

AggregationRun run_aggregation(const SequenceModelInstance& inst, int k_steps, fw::Algo algo,
                               double eta) {
  require(k_steps >= 1, "run_aggregation: k_steps must be positive");
  require(eta > 0.0 && eta <= 1.0, "run_aggregation: eta must be in (0, 1]");
  const auto domain = geometry::DomainSpec::finite_polytope(inst.dictionary);
  const fw::QuadraticObjective emp{inst.y};
  const fw::QuadraticObjective risk{inst.mu_star};

  AggregationRun out;
  out.empirical_min = fw::reference_optimum(domain, emp, k_steps, 10);
  out.hull_min = fw::reference_optimum(domain, risk, k_steps, 10);

  const double n = static_cast<double>(inst.n_samples);
  const double logm = std::log(static_cast<double>(inst.n_atoms()));
  fw::RunOptions opts;
  opts.steps = k_steps;
  opts.rule = fw::StepRule::line_search;
  opts.observer = [&](int t, const fw::SparseIterate& it) {
    RiskRecord r;
    r.k = t;
    r.opt_err = emp.value(it.point) - out.empirical_min;
    r.excess_risk = risk.value(it.point) - out.hull_min;
    r.term_sparse = t * logm / n;
    r.term_deviation = std::sqrt(static_cast<double>(t) * logm) * std::log(1.0 / eta) / n;
    const double env = gaussian_width_envelope(t, inst.n_atoms(), eta);
    r.envelope_excess = r.opt_err + 8.0 / n * env * env;
    out.records.push_back(r);
  };
  out.trace = fw::run_algo(algo, domain, emp, opts);
  return out;
}

FastRateStudy interior_fast_rate_study(double alpha, double c, const std::vector<long>& n_grid,
                                       int m, double eta, std::uint64_t seed, int n_trials) {
  require(alpha > 0.5 && alpha <= 1.0, "interior_fast_rate_study: alpha must be in (1/2, 1]");
  require(c > 0.0, "interior_fast_rate_study: c must be positive");
  require(m >= 2, "interior_fast_rate_study: m must be at least 2");
  require(!n_grid.empty(), "interior_fast_rate_study: empty n grid");
  require(std::is_sorted(n_grid.begin(), n_grid.end()),
          "interior_fast_rate_study: n grid must be sorted ascending");
  require(eta > 0.0 && eta <= 1.0, "interior_fast_rate_study: eta must be in (0, 1]");
  require(n_trials >= 1, "interior_fast_rate_study: n_trials must be positive");

  const auto domain = geometry::DomainSpec::simplex(m);
  const double logm = std::log(static_cast<double>(m));
  FastRateStudy out;
  out.n_grid = n_grid;

  for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
    const long n = n_grid[ni];
    require(n >= 2, "interior_fast_rate_study: n must be at least 2");
    const double nn = static_cast<double>(n);
    const double rho = c * std::pow(nn, (alpha - 1.0) / 2.0);
    const double achievable = 1.0 / m;  // certified radius of the barycenter
    if (rho >= achievable) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "interior_fast_rate_study: requested radius %.6g at n=%ld exceeds the "
                    "achievable %.6g for m=%d",
                    rho, n, achievable, m);
      throw std::invalid_argument(buf);
    }
    const double theta = 1.0 - m * rho;
    const int k_n =
        static_cast<int>(std::ceil(32.0 * alpha * std::pow(nn, 1.0 - alpha) * std::log(nn) / c));
    out.k_of_n.push_back(k_n);
    out.rho_of_n.push_back(rho);

    std::vector<double> excesses;
    excesses.reserve(n_trials);
    for (int trial = 0; trial < n_trials; ++trial) {
      const std::uint64_t tg = static_cast<std::uint64_t>(ni) * n_trials + trial;
      CounterRng place(seed, tg, stream::kPlacement);
      const int v = static_cast<int>(place.below(m));
      Eigen::VectorXd mu = Eigen::VectorXd::Constant(m, rho);
      mu[v] += theta;
      CounterRng noise(seed, tg, stream::kNoise);
      const Eigen::VectorXd y = mu + noise.gaussian_vector(m) / std::sqrt(nn);

      fw::RunOptions opts;
      opts.steps = k_n;
      opts.rule = fw::StepRule::line_search;
      opts.record_rows = false;
      const auto tr = fw::fw_vanilla(domain, fw::QuadraticObjective{y}, opts);
      const Eigen::VectorXd& x = tr.final.point;
      const Eigen::VectorXd erm = project_to_simplex(y);

      FastRateRow row;
      row.n = n;
      row.m = m;
      row.alpha = alpha;
      row.c = c;
      row.k = k_n;
      row.seed_index = tg;
      row.opt_err = std::max(0.0, (x - y).squaredNorm() - (erm - y).squaredNorm());
      row.excess_risk = (x - mu).squaredNorm();  // mu lies in the hull, so inf = 0
      row.bound_value =
          row.opt_err + k_n * logm / nn + std::sqrt(k_n * logm) * std::log(1.0 / eta) / nn;
      row.rho = rho;
      row.erm_interior_radius = std::max(0.0, erm.minCoeff());
      out.rows.push_back(row);
      excesses.push_back(row.excess_risk);
    }
    out.median_excess.push_back(median_of(std::move(excesses)));
  }

  std::vector<double> ns(n_grid.begin(), n_grid.end());
  out.slope = fit_loglog_slope(ns, out.median_excess);
  return out;
}

FastRateStudy exterior_control_study(const std::vector<long>& n_grid, double eta,
                                     std::uint64_t seed, int n_trials) {
  require(!n_grid.empty(), "exterior_control_study: empty n grid");
  require(std::is_sorted(n_grid.begin(), n_grid.end()),
          "exterior_control_study: n grid must be sorted ascending");
  require(eta > 0.0 && eta <= 1.0, "exterior_control_study: eta must be in (0, 1]");
  require(n_trials >= 1, "exterior_control_study: n_trials must be positive");

  FastRateStudy out;
  out.n_grid = n_grid;
  for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
    const long n = n_grid[ni];
    require(n >= 2, "exterior_control_study: n must be at least 2");
    const double nn = static_cast<double>(n);
    const double logm = std::log(2.0 * nn);
    const int k_n = static_cast<int>(std::ceil(std::sqrt(nn / logm)));
    out.k_of_n.push_back(k_n);
    out.rho_of_n.push_back(0.0);
    const auto domain = geometry::DomainSpec::l1_ball(static_cast<int>(n));

    std::vector<double> excesses;
    excesses.reserve(n_trials);
    for (int trial = 0; trial < n_trials; ++trial) {
      const std::uint64_t tg = static_cast<std::uint64_t>(ni) * n_trials + trial;
      CounterRng place(seed, tg, stream::kPlacement);
      const Eigen::VectorXd z = place.l1_boundary(static_cast<int>(n));
      CounterRng noise(seed, tg, stream::kNoise);
      const Eigen::VectorXd y = z + noise.gaussian_vector(static_cast<int>(n)) / std::sqrt(nn);

      fw::RunOptions opts;
      opts.steps = k_n;
      opts.rule = fw::StepRule::line_search;
      opts.record_rows = false;
      const auto tr = fw::fw_vanilla(domain, fw::QuadraticObjective{y}, opts);
      const Eigen::VectorXd& x = tr.final.point;
      const Eigen::VectorXd erm = l1_ball_projection(y);

      FastRateRow row;
      row.n = n;
      row.m = static_cast<int>(2 * n);
      row.alpha = 0.0;
      row.c = 0.0;
      row.k = k_n;
      row.seed_index = tg;
      row.opt_err = std::max(0.0, (x - y).squaredNorm() - (erm - y).squaredNorm());
      row.excess_risk = (x - z).squaredNorm();  // z lies on the hull boundary, inf = 0
      row.bound_value =
          row.opt_err + k_n * logm / nn + std::sqrt(k_n * logm) * std::log(1.0 / eta) / nn;
      row.rho = 0.0;
      row.erm_interior_radius = std::max(0.0, (1.0 - erm.lpNorm<1>()) / std::sqrt(nn));
      out.rows.push_back(row);
      excesses.push_back(row.excess_risk);
    }
    out.median_excess.push_back(median_of(std::move(excesses)));
  }

  std::vector<double> ns(n_grid.begin(), n_grid.end());
  out.slope = fit_loglog_slope(ns, out.median_excess);
  return out;
}

LinearRateResult linear_rate_check(const geometry::DomainSpec& domain,
                                   const std::vector<double>& r_grid, int k_max, int seeds,
                                   std::uint64_t master_seed) {
  require(!r_grid.empty(), "linear_rate_check: empty r grid");
  require(k_max >= 1, "linear_rate_check: k_max must be positive");
  require(seeds >= 1, "linear_rate_check: seeds must be positive");
  const bool simplex = domain.kind == geometry::DomainSpec::Kind::simplex;
  const bool l1 = domain.kind == geometry::DomainSpec::Kind::l1_ball;
  require(simplex || l1, "linear_rate_check: certified placement needs a simplex or l1 domain");
  const int d = domain.dim;

  LinearRateResult out;
  out.all_satisfied = true;
  for (std::size_t ri = 0; ri < r_grid.size(); ++ri) {
    const double r = r_grid[ri];
    require(r >= 0.0, "linear_rate_check: negative radius");
    const double reach = simplex ? 1.0 / d : 1.0 / std::sqrt(static_cast<double>(d));
    require(r <= reach + 1e-15, "linear_rate_check: radius not realizable in this domain");
    const double base = 1.0 - r * r / 16.0;

    for (int s = 0; s < seeds; ++s) {
      const std::uint64_t tg = static_cast<std::uint64_t>(ri) * seeds + s;
      CounterRng rng(master_seed, tg, stream::kTarget);
      Eigen::VectorXd p;
      if (simplex) {
        // every coordinate >= r, so the certified (min-coordinate) radius is >= r
        p = (1.0 - r * d) * rng.simplex_uniform(d) + Eigen::VectorXd::Constant(d, r);
      } else {
        // exact: certified radius (1 - ||p||_1)/sqrt(d) equals r
        p = (1.0 - r * std::sqrt(static_cast<double>(d))) * rng.l1_boundary(d);
      }

      fw::RunOptions opts;
      opts.steps = k_max;
      opts.rule = fw::StepRule::line_search;
      const auto tr = fw::fw_vanilla(domain, fw::QuadraticObjective{p}, opts);

      LinearRateRow row;
      row.r = r;
      row.seed_index = tg;
      row.eps0 = tr.rows.front().f;
      row.k_checked = k_max;
      row.satisfied = true;
      row.worst_margin = std::numeric_limits<double>::infinity();
      double last_pos_f = row.eps0;
      int last_pos_k = 0;
      for (const auto& tr_row : tr.rows) {
        const double envelope = row.eps0 * std::pow(base, tr_row.iter);
        const double margin = envelope - tr_row.f;
        row.worst_margin = std::min(row.worst_margin, margin);
        if (tr_row.f > envelope * (1.0 + 1e-9)) row.satisfied = false;
        if (tr_row.f > 1e-250 * std::max(row.eps0, 1e-300) && tr_row.iter > 0) {
          last_pos_f = tr_row.f;
          last_pos_k = tr_row.iter;
        }
      }
      row.contraction =
          last_pos_k > 0 && row.eps0 > 0.0
              ? std::pow(last_pos_f / row.eps0, 1.0 / static_cast<double>(last_pos_k))
              : 1.0;
      out.all_satisfied = out.all_satisfied && row.satisfied;
      out.rows.push_back(row);
    }
  }
  return out;
}

double median_of(std::vector<double> v) {
  require(!v.empty(), "median_of: empty sample");
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + h, v.end());
  double hi = v[h];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + h - 1, v.begin() + h);
  return 0.5 * (v[h - 1] + hi);
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), "fit_loglog_slope: size mismatch");
  require(x.size() >= 2, "fit_loglog_slope: need at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, "fit_loglog_slope: values must be positive");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  require(std::abs(denom) > 1e-30, "fit_loglog_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace sparsefw::statlab
