#pragma once

#include <string>

namespace sparsefw::bounds {

// Which evaluator produced a report. Specialized closed forms (l1_ball, cube,
// nuclear) must agree with the general evaluator they specialize; the test
// suite pins that equality on grids.
enum class Formula {
  polytope_entropy,  // finite vertex set, covering-number numerator
  volume,            // volumetric covering estimate, finite vertex set
  infinite_vertex,   // covering number replaces the vertex count
  l1_ball,
  cube,
  nuclear,
  random_polytope,
};

const char* formula_name(Formula f);

// A lower bound on the worst-case iterate sparsity needed to reach a given
// squared-error tolerance, plus enough bookkeeping to keep tolerance
// conventions from being silently mixed.
struct BoundReport {
  Formula formula = Formula::polytope_entropy;
  double value = 0.0;
  int d = 0;                    // ambient dimension (rows*cols for matrices), 0 if unspecified
  double log_n_vertices = 0.0;  // ln(vertex count), 0 when not applicable
  double eps = 0.0;             // resolution argument fed to the formula
  double tol_value = 0.0;       // squared-error tolerance at which `value` bounds the sparsity
  std::string tolerance_note;
  double log_cover = 0.0;    // covering-number exponent input, when applicable
  double varv_root = 0.0;    // d-th root of the volume ratio, when applicable
  double normalization = 1.0;  // rescaling factor folded into eps (1 = none)
  double tail_exponent = 0.0;  // random polytopes: ln of the containment failure bound
  bool vacuous = false;              // formula value clamped to 0
  bool caratheodory_capped = false;  // value exceeds d + 1, kept unclamped
  bool containment_refuted = false;  // random polytopes: inscribed ball test failed

  static std::string csv_header();  // formula,d,n,eps,value,flags
  std::string csv_row() const;
};

// ---- volumes, natural-log domain ----

// Bodies with closed-form volumes. The simplex volume is taken inside its
// affine hull (dimension d-1), everything else in R^d.
enum class BodyKind { l1_ball, cube_normalized, simplex, euclidean_ball };

double log_volume_unit_ball(int d);
double log_volume(BodyKind kind, int d);
// volume ratio vs the unit ball of the matching dimension
double log_volume_ratio(BodyKind kind, int d);
double volume_ratio(BodyKind kind, int d);
double volume_ratio(double vol, int d);  // explicit d-dimensional volume
double varv_root_of(double log_volume_ratio, int d);

// log N lower estimate from volumes: log vol(L) - d ln(eps) - log vol(ball)
double covering_lower_volumetric(double log_vol_L, int d, double eps, double log_vol_unitball);

// ---- covering upper bound for k-term hulls ----

// ln N(conv_k, eps) <= k (logN_half + ln(6/eps)); logN_half covers the atom
// set at eps/2. Requires eps in (0, 1]: the estimate lives inside the unit
// ball and is vacuous above it.
double khull_entropy_bound(int k, double logN_half, double eps);

// ---- sparsity lower bounds ----

// General finite-vertex bound: logN / (3 + ln n + ln(1/eps)), valid for a
// domain inside the unit ball; bounds sparsity at squared error eps^2/4.
BoundReport lower_bound_entropy(double logN, long n_vertices, double eps, int d = 0);

// Volumetric form: d (ln varv_root + ln(1/eps)) / (3 + log_n + ln(1/eps)).
// Negative numerator clamps to zero with the vacuous flag.
BoundReport lower_bound_volume(double varv_root, int d, double log_n_vertices, double eps);

// Infinite vertex sets: logN_conv / (4 + logN_V_half + ln(1/eps)) where
// logN_V_half covers the vertex set at eps/2.
BoundReport lower_bound_infinite(double logN_conv, double logN_V_half, double eps, int d = 0);

// l1 ball closed form: d ln(1/4delta) / (3 + 1.5 ln d + ln(1/2delta)),
// bounding sparsity at squared error delta/d. delta in (0, 1/4].
BoundReport lower_bound_l1(int d, double delta);

// Normalized cube [-1/sqrt(d), 1/sqrt(d)]^d, 2^d vertices:
// d (ln(1/eps) - C) / (3 + d ln 2 + ln(1/eps)) with C = -ln(varv_root).
// varv_root defaults to the exact volume-ratio root.
BoundReport lower_bound_cube(int d, double eps);
BoundReport lower_bound_cube(int d, double eps, double varv_root);

// Nuclear-norm ball of m x n matrices, rank-one vertex set:
// mn (ln(1/eps) - ln(m^n)/2) / (6 + m + n + 2 ln(1/eps)) where m^n is
// min(m, n). Vacuous for eps >= 1/sqrt(min(m, n)); requires min(m, n) >= 3.
BoundReport lower_bound_nuclear(int m, int n, double eps);
// Same bound at eps = sqrt(delta / min(m,n)): squared-error delta/(4 min(m,n)).
BoundReport lower_bound_nuclear_delta(int m, int n, double delta);

// Covering exponents behind the nuclear bound, exposed so the closed form can
// be cross-checked against lower_bound_infinite.
double nuclear_log_cover_hull(int m, int n, double eps);
double nuclear_log_cover_vertices_half(int m, int n, double eps);

// ---- confrontation ----

struct EmpiricalCheck {
  bool consistent = false;
  std::string detail;
};

// Compares a measured minimal sparsity (from fw::min_sparsity_to_tolerance,
// squared-error tolerance measured_f_tol) against a report. Throws if the
// tolerance conventions disagree; consistent iff measured_k >= floor(value).
EmpiricalCheck empirical_vs_bound(int measured_k, double measured_f_tol,
                                  const BoundReport& report);

}  // namespace sparsefw::bounds
