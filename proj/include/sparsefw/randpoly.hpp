#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sparsefw/bounds.hpp"
#include "sparsefw/rng.hpp"

namespace sparsefw::randpoly {

enum class PolytopeKind { spherical, gaussian };

const char* polytope_kind_name(PolytopeKind k);

struct RandomPolytopeSample {
  PolytopeKind kind = PolytopeKind::spherical;
  int d = 0;
  int m = 0;
  std::vector<Eigen::VectorXd> vertices;
  std::uint64_t seed = 0;
};

// m independent vertices: unit-sphere uniform (normalized Gaussians) or raw
// standard Gaussians. Requires d >= 2 and m >= d + 1.
RandomPolytopeSample sample_polytope(PolytopeKind kind, int d, int m, std::uint64_t seed);

// mu(r) = P(<v, e1> >= r) for v uniform on the sphere in R^d:
// 0.5 * I_{1-r^2}((d-1)/2, 1/2). Requires r in [0, 1), d >= 2.
double cap_measure_exact(double r, int d);
double cap_measure_mc(double r, int d, long samples, std::uint64_t seed);

// Certified lower bound on mu(eps/(1+t)) via the Gaussian coupling:
// upper_tail(eps sqrt(d)) - exp(-t^2 d / 2).
double cap_lower_bound_gaussian(double eps, double t, int d);

struct ContainmentResult {
  bool violated = false;
  int direction_index = -1;    // lowest violating direction index
  Eigen::VectorXd direction;   // the violating unit direction, empty otherwise
  double support_value = 0.0;  // max_i <v_i, u> at that direction
  int n_dirs = 0;
};

// One-sided Monte-Carlo check of r B subset conv(vertices): samples n_dirs
// unit directions (stream keyed per direction index, so the result is
// independent of `workers`) and reports the lowest-index direction whose
// support value falls below r, if any.
ContainmentResult inscribed_ball_test(const RandomPolytopeSample& sample, double r, int n_dirs,
                                      std::uint64_t seed, int workers = 1);

// ln of the union-bound failure probability: ln 2 + d ln m - m * cap_mass.
double containment_tail_exponent(int d, int m, double cap_mass);

// Average-case pipeline: sample, run the inscribed-ball test, and emit the
// volumetric sparsity bound at eps = sqrt(delta/(4d)).
//   spherical: r = 1/(2 sqrt(d)), varv_root = r, n = m.
//   gaussian:  containment tested at r = 1 on the raw sample; the report is
//              for the sample rescaled by its max vertex norm R
//              (normalization = R, varv_root = min(1, 1/R)).
// A failed containment test sets containment_refuted (value still reported).
bounds::BoundReport randpoly_bound_pipeline(PolytopeKind kind, int d, int m, double delta,
                                            std::uint64_t seed, int n_dirs = 100000,
                                            int workers = 1);

}  // namespace sparsefw::randpoly
