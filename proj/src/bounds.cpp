#include "sparsefw/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sparsefw::bounds {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void require_eps(double eps) {
  require(eps > 0.0 && eps <= 1.0, "bounds: eps must lie in (0, 1]");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void flag_cap(BoundReport& r) {
  if (r.d > 0 && r.value > r.d + 1.0) r.caratheodory_capped = true;
}

}  // namespace

const char* formula_name(Formula f) {
  switch (f) {
    case Formula::polytope_entropy: return "polytope_entropy";
    case Formula::volume: return "volume";
    case Formula::infinite_vertex: return "infinite_vertex";
    case Formula::l1_ball: return "l1_ball";
    case Formula::cube: return "cube";
    case Formula::nuclear: return "nuclear";
    case Formula::random_polytope: return "random_polytope";
  }
  return "?";
}

std::string BoundReport::csv_header() { return "formula,d,n,eps,value,flags"; }

std::string BoundReport::csv_row() const {
  std::string flags;
  auto add = [&flags](const char* f) {
    if (!flags.empty()) flags += ';';
    flags += f;
  };
  if (vacuous) add("vacuous");
  if (caratheodory_capped) add("caratheodory_capped");
  if (containment_refuted) add("containment_refuted");
  std::string row = formula_name(formula);
  row += ',';
  row += std::to_string(d);
  row += ',';
  row += fmt(log_n_vertices > 0.0 ? std::exp(log_n_vertices) : 0.0);
  row += ',';
  row += fmt(eps);
  row += ',';
  row += fmt(value);
  row += ',';
  row += flags;
  return row;
}

double log_volume_unit_ball(int d) {
  require(d >= 1, "bounds: dimension must be positive");
  return 0.5 * d * std::log(kPi) - std::lgamma(1.0 + 0.5 * d);
}

double log_volume(BodyKind kind, int d) {
  require(d >= 1, "bounds: dimension must be positive");
  switch (kind) {
    case BodyKind::l1_ball:
      return d * std::log(2.0) - std::lgamma(d + 1.0);
    case BodyKind::cube_normalized:
      return d * std::log(2.0 / std::sqrt(static_cast<double>(d)));
    case BodyKind::simplex:
      // (d-1)-dimensional volume inside the affine hull
      require(d >= 2, "bounds: simplex volume needs d >= 2");
      return 0.5 * std::log(static_cast<double>(d)) - std::lgamma(static_cast<double>(d));
    case BodyKind::euclidean_ball:
      return log_volume_unit_ball(d);
  }
  throw std::logic_error("bounds: bad body kind");
}

double log_volume_ratio(BodyKind kind, int d) {
  const int ball_dim = kind == BodyKind::simplex ? d - 1 : d;
  return log_volume(kind, d) - log_volume_unit_ball(ball_dim);
}

double volume_ratio(BodyKind kind, int d) { return std::exp(log_volume_ratio(kind, d)); }

double volume_ratio(double vol, int d) {
  require(vol > 0.0, "bounds: volume must be positive");
  return std::exp(std::log(vol) - log_volume_unit_ball(d));
}

double varv_root_of(double log_volume_ratio, int d) {
  require(d >= 1, "bounds: dimension must be positive");
  return std::exp(log_volume_ratio / d);
}

double covering_lower_volumetric(double log_vol_L, int d, double eps, double log_vol_unitball) {
  require(eps > 0.0, "bounds: eps must be positive");
  return log_vol_L - d * std::log(eps) - log_vol_unitball;
}

double khull_entropy_bound(int k, double logN_half, double eps) {
  require(k >= 1, "bounds: k must be at least 1");
  require(logN_half >= 0.0, "bounds: logN_half must be nonnegative");
  require_eps(eps);
  return k * (logN_half + std::log(6.0 / eps));
}

BoundReport lower_bound_entropy(double logN, long n_vertices, double eps, int d) {
  require(logN >= 0.0, "bounds: logN must be nonnegative");
  require(n_vertices >= 1, "bounds: vertex count must be at least 1");
  require_eps(eps);
  BoundReport r;
  r.formula = Formula::polytope_entropy;
  r.d = d;
  r.log_n_vertices = std::log(static_cast<double>(n_vertices));
  r.eps = eps;
  r.log_cover = logN;
  r.value = logN / (3.0 + r.log_n_vertices + std::log(1.0 / eps));
  r.tol_value = eps * eps / 4.0;
  r.tolerance_note = "bounds sparsity at squared error eps^2/4";
  flag_cap(r);
  return r;
}

BoundReport lower_bound_volume(double varv_root, int d, double log_n_vertices, double eps) {
  require(varv_root > 0.0 && varv_root <= 1.0, "bounds: varv_root must lie in (0, 1]");
  require(d >= 1, "bounds: dimension must be positive");
  require(log_n_vertices >= 0.0, "bounds: log_n_vertices must be nonnegative");
  require_eps(eps);
  BoundReport r;
  r.formula = Formula::volume;
  r.d = d;
  r.log_n_vertices = log_n_vertices;
  r.eps = eps;
  r.varv_root = varv_root;
  const double lead = std::log(varv_root) + std::log(1.0 / eps);
  const double den = 3.0 + log_n_vertices + std::log(1.0 / eps);
  r.value = d * lead / den;
  // log-difference numerator: clamp ulp-level residue along with true negatives
  if (lead <= 1e-12 * std::max(1.0, std::log(1.0 / eps))) {
    r.value = 0.0;
    r.vacuous = true;
  }
  r.tol_value = eps * eps / 4.0;
  r.tolerance_note = "bounds sparsity at squared error eps^2/4";
  flag_cap(r);
  return r;
}

BoundReport lower_bound_infinite(double logN_conv, double logN_V_half, double eps, int d) {
  require(logN_conv >= 0.0, "bounds: logN_conv must be nonnegative");
  require(logN_V_half >= 0.0, "bounds: logN_V_half must be nonnegative");
  require_eps(eps);
  BoundReport r;
  r.formula = Formula::infinite_vertex;
  r.d = d;
  r.eps = eps;
  r.log_cover = logN_conv;
  r.value = logN_conv / (4.0 + logN_V_half + std::log(1.0 / eps));
  if (r.value <= 0.0) {
    r.value = 0.0;
    r.vacuous = true;
  }
  r.tol_value = eps * eps / 4.0;
  r.tolerance_note = "bounds sparsity at squared error eps^2/4";
  flag_cap(r);
  return r;
}

BoundReport lower_bound_l1(int d, double delta) {
  require(d >= 2, "bounds: l1 form needs d >= 2");
  require(delta > 0.0 && delta <= 0.25, "bounds: l1 form needs delta in (0, 1/4]");
  BoundReport r;
  r.formula = Formula::l1_ball;
  r.d = d;
  r.log_n_vertices = std::log(2.0 * d);
  r.eps = 4.0 * delta / std::sqrt(static_cast<double>(d));
  const double num = d * std::log(1.0 / (4.0 * delta));
  const double den = 3.0 + 1.5 * std::log(static_cast<double>(d)) + std::log(1.0 / (2.0 * delta));
  r.value = num / den;
  if (r.value <= 0.0) {
    r.value = 0.0;
    r.vacuous = true;
  }
  r.log_cover = d * std::log(1.0 / (4.0 * delta));
  r.tol_value = delta / d;
  r.tolerance_note = "bounds sparsity at squared error delta/d";
  flag_cap(r);
  return r;
}

BoundReport lower_bound_cube(int d, double eps) {
  return lower_bound_cube(d, eps, varv_root_of(log_volume_ratio(BodyKind::cube_normalized, d), d));
}

BoundReport lower_bound_cube(int d, double eps, double varv_root) {
  require(d >= 2, "bounds: cube form needs d >= 2");
  require(varv_root > 0.0 && varv_root <= 1.0, "bounds: varv_root must lie in (0, 1]");
  require_eps(eps);
  BoundReport r;
  r.formula = Formula::cube;
  r.d = d;
  r.log_n_vertices = d * std::log(2.0);
  r.eps = eps;
  r.varv_root = varv_root;
  const double big_c = -std::log(varv_root);
  r.value = d * (std::log(1.0 / eps) - big_c) / (3.0 + d * std::log(2.0) + std::log(1.0 / eps));
  if (r.value <= 0.0) {
    r.value = 0.0;
    r.vacuous = true;
  }
  r.normalization = std::sqrt(static_cast<double>(d));  // side-2 cube rescaled by this factor
  r.tol_value = eps * eps / 4.0;
  r.tolerance_note = "bounds sparsity at squared error eps^2/4 on the normalized cube";
  flag_cap(r);
  return r;
}

double nuclear_log_cover_hull(int m, int n, double eps) {
  require_eps(eps);
  const int mn_min = std::min(m, n);
  return std::max(0.0, static_cast<double>(m) * n *
                           (std::log(1.0 / eps) - 0.5 * std::log(static_cast<double>(mn_min))));
}

double nuclear_log_cover_vertices_half(int m, int n, double eps) {
  require_eps(eps);
  // reconstructed so that 4 + logN_V_half + ln(1/eps) equals the closed
  // form's denominator 6 + m + n + 2 ln(1/eps)
  return 2.0 + m + n + std::log(1.0 / eps);
}

BoundReport lower_bound_nuclear(int m, int n, double eps) {
  require(std::min(m, n) >= 3, "bounds: nuclear form needs min(m, n) >= 3");
  require_eps(eps);
  BoundReport r;
  r.formula = Formula::nuclear;
  r.d = m * n;
  r.eps = eps;
  const int mn_min = std::min(m, n);
  const double lead = std::log(1.0 / eps) - 0.5 * std::log(static_cast<double>(mn_min));
  const double num = static_cast<double>(m) * n * lead;
  const double den = 6.0 + m + n + 2.0 * std::log(1.0 / eps);
  r.value = num / den;
  // the numerator is a difference of logs; treat ulp-level residue as zero
  if (lead <= 1e-12 * std::max(1.0, 0.5 * std::log(static_cast<double>(mn_min)))) {
    r.value = 0.0;
    r.vacuous = true;
  }
  r.log_cover = std::max(0.0, num);
  r.tol_value = eps * eps / 4.0;
  r.tolerance_note = "bounds sparsity at squared error eps^2/4; vacuous unless eps < 1/sqrt(min(m,n))";
  flag_cap(r);
  return r;
}

BoundReport lower_bound_nuclear_delta(int m, int n, double delta) {
  require(delta > 0.0 && delta < 1.0, "bounds: delta must lie in (0, 1)");
  const int mn_min = std::min(m, n);
  BoundReport r = lower_bound_nuclear(m, n, std::sqrt(delta / mn_min));
  r.tol_value = delta / (4.0 * mn_min);
  r.tolerance_note = "bounds sparsity at squared error delta/(4 min(m,n))";
  return r;
}

EmpiricalCheck empirical_vs_bound(int measured_k, double measured_f_tol,
                                  const BoundReport& report) {
  require(measured_k >= 0, "bounds: measured sparsity must be nonnegative");
  require(measured_f_tol > 0.0, "bounds: measured tolerance must be positive");
  const double scale = std::max(report.tol_value, 1e-300);
  if (std::abs(measured_f_tol - report.tol_value) > 1e-9 * scale)
    throw std::invalid_argument(
        "bounds: tolerance conventions disagree (measured squared-error tolerance does not match "
        "the report's)");
  EmpiricalCheck c;
  const double floor_value = std::floor(report.value);
  c.consistent = measured_k >= static_cast<int>(floor_value);
  if (c.consistent) {
    c.detail = "consistent: measured k = " + std::to_string(measured_k) +
               " >= floor(bound) = " + fmt(floor_value);
  } else {
    c.detail = "VIOLATION: measured k = " + std::to_string(measured_k) +
               " < floor(bound) = " + fmt(floor_value) + " [formula " +
               formula_name(report.formula) + ", d = " + std::to_string(report.d) +
               ", eps = " + fmt(report.eps) + ", value = " + fmt(report.value) +
               ", tol = " + fmt(report.tol_value) +
               "]; this indicates an implementation bug on one side";
  }
  return c;
}

}  // namespace sparsefw::bounds
