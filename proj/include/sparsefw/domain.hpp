#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "sparsefw/atom.hpp"
#include "sparsefw/rng.hpp"

namespace sparsefw::geometry {

// Compact convex feasible sets. Everything lives in R^dim; matrix domains are
// flattened row-major. CubeNormalized is [-1/sqrt(d), 1/sqrt(d)]^d so that all
// shipped domains have diameter at most 2.
struct DomainSpec {
  enum class Kind { simplex, l1_ball, cube_normalized, nuclear_ball, finite_polytope, euclidean_ball };

  Kind kind = Kind::simplex;
  int dim = 0;             // ambient dimension (rows*cols for nuclear_ball)
  int rows = 0, cols = 0;  // nuclear_ball only
  std::vector<Eigen::VectorXd> vertices;  // finite_polytope only

  static DomainSpec simplex(int d);
  static DomainSpec l1_ball(int d);
  static DomainSpec cube_normalized(int d);
  static DomainSpec nuclear_ball(int rows, int cols);
  static DomainSpec finite_polytope(std::vector<Eigen::VectorXd> vertices);
  static DomainSpec euclidean_ball(int d);

  double diameter() const;
};

enum class Membership { inside, boundary, outside };

struct LmoOptions {
  int power_iters = 500;
  double power_tol = 1e-9;
};

struct LmoResult {
  Atom atom;
  bool inexact = false;  // power iteration hit its budget before converging
  int iterations = 0;
};

// argmin over the domain of <gradient, s>. Ties break toward the lowest
// index. The nuclear ball runs power iteration on G^T G; `rng` seeds its
// start vector (deterministic fallback when null).
LmoResult lmo(const DomainSpec& domain, const Eigen::VectorXd& gradient,
              const LmoOptions& opts = {}, CounterRng* rng = nullptr);

// Classification with absolute tolerance `tol` on the defining constraints.
// For the simplex, inside means relative interior. The nuclear ball uses a
// dense SVD and rejects sizes above kNuclearMembershipCap entries.
inline constexpr int kNuclearMembershipCap = 16384;
Membership membership(const DomainSpec& domain, const Eigen::VectorXd& x, double tol = 1e-9);

struct RadiusOptions {
  int n_dirs = 256;          // finite_polytope Monte Carlo directions
  std::uint64_t seed = 0;
  double bisect_tol = 1e-10;
};

// Radius of the largest ball around x, within the affine hull of the domain,
// that stays inside. Closed forms except for finite polytopes, which use
// direction sampling plus bisection (an upper estimate of the true radius).
double relative_interior_radius(const DomainSpec& domain, const Eigen::VectorXd& x,
                                const RadiusOptions& opts = {});

// Distance from x to conv(vertices) and the minimizing weights (Wolfe's
// minimum-norm-point method; finite termination, boundary-test precision).
double hull_distance(const std::vector<Eigen::VectorXd>& vertices, const Eigen::VectorXd& x,
                     int iters = 200, Eigen::VectorXd* weights_out = nullptr);

// All vertices of enumerable domains (throws for balls and for cubes with
// dim > 20). Test utility and exhaustive-oracle support.
std::vector<Atom> enumerate_vertices(const DomainSpec& domain);

}  // namespace sparsefw::geometry
