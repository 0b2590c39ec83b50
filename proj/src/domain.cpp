#include "sparsefw/domain.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "sparsefw/simplex.hpp"

namespace sparsefw::geometry {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

int sign_or_plus(double x) { return x < 0.0 ? -1 : 1; }

}  // namespace

DomainSpec DomainSpec::simplex(int d) {
  require(d >= 1, "simplex: d >= 1");
  DomainSpec s;
  s.kind = Kind::simplex;
  s.dim = d;
  return s;
}

DomainSpec DomainSpec::l1_ball(int d) {
  require(d >= 1, "l1_ball: d >= 1");
  DomainSpec s;
  s.kind = Kind::l1_ball;
  s.dim = d;
  return s;
}

DomainSpec DomainSpec::cube_normalized(int d) {
  require(d >= 1, "cube_normalized: d >= 1");
  DomainSpec s;
  s.kind = Kind::cube_normalized;
  s.dim = d;
  return s;
}

DomainSpec DomainSpec::nuclear_ball(int rows, int cols) {
  require(rows >= 1 && cols >= 1, "nuclear_ball: rows, cols >= 1");
  DomainSpec s;
  s.kind = Kind::nuclear_ball;
  s.rows = rows;
  s.cols = cols;
  s.dim = rows * cols;
  return s;
}

DomainSpec DomainSpec::finite_polytope(std::vector<Eigen::VectorXd> vertices) {
  require(!vertices.empty(), "finite_polytope: needs at least one vertex");
  const int d = static_cast<int>(vertices.front().size());
  for (const auto& v : vertices) require(static_cast<int>(v.size()) == d, "finite_polytope: mixed dimensions");
  DomainSpec s;
  s.kind = Kind::finite_polytope;
  s.dim = d;
  s.vertices = std::move(vertices);
  return s;
}

DomainSpec DomainSpec::euclidean_ball(int d) {
  require(d >= 1, "euclidean_ball: d >= 1");
  DomainSpec s;
  s.kind = Kind::euclidean_ball;
  s.dim = d;
  return s;
}

double DomainSpec::diameter() const {
  switch (kind) {
    case Kind::simplex:
      return dim == 1 ? 0.0 : std::sqrt(2.0);
    case Kind::l1_ball:
    case Kind::cube_normalized:
    case Kind::nuclear_ball:
    case Kind::euclidean_ball:
      return 2.0;
    case Kind::finite_polytope: {
      double best = 0.0;
      for (size_t i = 0; i < vertices.size(); ++i)
        for (size_t j = i + 1; j < vertices.size(); ++j)
          best = std::max(best, (vertices[i] - vertices[j]).norm());
      return best;
    }
  }
  throw std::logic_error("domain: bad kind");
}

// ---------------------------------------------------------------------------
// LMO

LmoResult lmo(const DomainSpec& domain, const Eigen::VectorXd& gradient,
              const LmoOptions& opts, CounterRng* rng) {
  require(static_cast<int>(gradient.size()) == domain.dim, "lmo: gradient dimension mismatch");
  const int d = domain.dim;

  switch (domain.kind) {
    case DomainSpec::Kind::simplex: {
      int best = 0;
      for (int j = 1; j < d; ++j)
        if (gradient[j] < gradient[best]) best = j;
      return {Atom::basis(best, +1)};
    }
    case DomainSpec::Kind::l1_ball: {
      int best = 0;
      for (int j = 1; j < d; ++j)
        if (std::abs(gradient[j]) > std::abs(gradient[best])) best = j;
      const int s = gradient[best] == 0.0 ? 1 : -sign_or_plus(gradient[best]);
      return {Atom::basis(best, s)};
    }
    case DomainSpec::Kind::cube_normalized: {
      const double scale = 1.0 / std::sqrt(static_cast<double>(d));
      Eigen::VectorXd s(d);
      for (int j = 0; j < d; ++j) s[j] = gradient[j] > 0.0 ? -scale : scale;
      return {Atom::dense_vec(std::move(s))};
    }
    case DomainSpec::Kind::euclidean_ball: {
      const double n = gradient.norm();
      if (n == 0.0) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
        e[0] = 1.0;
        return {Atom::dense_vec(std::move(e))};
      }
      return {Atom::dense_vec(-gradient / n)};
    }
    case DomainSpec::Kind::finite_polytope: {
      int best = 0;
      double best_val = domain.vertices[0].dot(gradient);
      for (size_t j = 1; j < domain.vertices.size(); ++j) {
        const double val = domain.vertices[j].dot(gradient);
        if (val < best_val) {
          best_val = val;
          best = static_cast<int>(j);
        }
      }
      return {Atom::dense_vec(domain.vertices[best])};
    }
    case DomainSpec::Kind::nuclear_ball: {
      const int m = domain.rows, n = domain.cols;
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
          G(gradient.data(), m, n);

      // Power iteration on G^T G for the top right singular vector.
      Eigen::VectorXd v;
      if (rng != nullptr) {
        v = rng->unit_vector(n);
      } else {
        v = Eigen::VectorXd::Ones(n);
        for (int j = 0; j < n; ++j) v[j] += 1e-3 * (j + 1) / n;  // break symmetry
        v.normalize();
      }

      double rho_prev = -1.0;
      bool converged = false;
      int it = 0;
      for (; it < opts.power_iters; ++it) {
        Eigen::VectorXd w = G.transpose() * (G * v);
        const double wn = w.norm();
        if (wn == 0.0) {  // zero gradient: every atom is optimal, pick a fixed one
          Eigen::VectorXd u0 = Eigen::VectorXd::Zero(m);
          Eigen::VectorXd v0 = Eigen::VectorXd::Zero(n);
          u0[0] = 1.0;
          v0[0] = 1.0;
          return {Atom::rank_one(std::move(u0), std::move(v0), -1), false, it};
        }
        v = w / wn;
        const double rho = (G * v).squaredNorm();
        if (rho_prev >= 0.0 && std::abs(rho - rho_prev) <= opts.power_tol * rho) {
          converged = true;
          rho_prev = rho;
          ++it;
          break;
        }
        rho_prev = rho;
      }

      Eigen::VectorXd Gv = G * v;
      const double sigma = Gv.norm();
      Eigen::VectorXd u = sigma > 0.0 ? Eigen::VectorXd(Gv / sigma) : Eigen::VectorXd::Unit(m, 0);
      return {Atom::rank_one(std::move(u), std::move(v), -1), !converged, it};
    }
  }
  throw std::logic_error("lmo: bad kind");
}

// ---------------------------------------------------------------------------
// Membership

namespace {

Membership classify(double value, double limit, double tol) {
  if (value > limit + tol) return Membership::outside;
  if (value >= limit - tol) return Membership::boundary;
  return Membership::inside;
}

Membership membership_finite(const DomainSpec& domain, const Eigen::VectorXd& x, double tol) {
  const double dist = hull_distance(domain.vertices, x);
  if (dist > tol) return Membership::outside;

  // Radial classification against a relative-interior reference point: find
  // the largest lambda with c + lambda (x - c) still in the hull.
  Eigen::VectorXd c = Eigen::VectorXd::Zero(domain.dim);
  for (const auto& v : domain.vertices) c += v;
  c /= static_cast<double>(domain.vertices.size());

  const double step_norm = (x - c).norm();
  if (step_norm <= tol) return Membership::inside;  // at the reference point

  auto inside_at = [&](double lambda) {
    return hull_distance(domain.vertices, c + lambda * (x - c)) <= 1e-11;
  };
  double lo = 1.0, hi = 2.0;
  if (!inside_at(1.0)) return Membership::boundary;  // x itself within hull tolerance only
  while (inside_at(hi) && hi < 1e6) {
    lo = hi;
    hi *= 2.0;
  }
  if (hi >= 1e6) return Membership::inside;  // ray never exits: x at the reference
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (inside_at(mid) ? lo : hi) = mid;
  }
  // lo approximates the exit scale; x is on the boundary when the exit is at
  // distance ~tol of x along the ray.
  const double margin = (lo - 1.0) * step_norm;
  return margin <= tol ? Membership::boundary : Membership::inside;
}

}  // namespace

Membership membership(const DomainSpec& domain, const Eigen::VectorXd& x, double tol) {
  require(static_cast<int>(x.size()) == domain.dim, "membership: dimension mismatch");
  switch (domain.kind) {
    case DomainSpec::Kind::simplex: {
      if (std::abs(x.sum() - 1.0) > tol) return Membership::outside;
      double mn = x.minCoeff();
      if (mn < -tol) return Membership::outside;
      if (mn <= tol) return Membership::boundary;
      return Membership::inside;
    }
    case DomainSpec::Kind::l1_ball:
      return classify(x.lpNorm<1>(), 1.0, tol);
    case DomainSpec::Kind::cube_normalized:
      return classify(x.lpNorm<Eigen::Infinity>() * std::sqrt(static_cast<double>(domain.dim)), 1.0,
                      tol * std::sqrt(static_cast<double>(domain.dim)));
    case DomainSpec::Kind::euclidean_ball:
      return classify(x.norm(), 1.0, tol);
    case DomainSpec::Kind::nuclear_ball: {
      if (domain.dim > kNuclearMembershipCap)
        throw std::invalid_argument("membership: nuclear ball too large for exact SVD");
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
          X(x.data(), domain.rows, domain.cols);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
      return classify(svd.singularValues().sum(), 1.0, tol);
    }
    case DomainSpec::Kind::finite_polytope:
      return membership_finite(domain, x, tol);
  }
  throw std::logic_error("membership: bad kind");
}

// Wolfe's minimum-norm-point algorithm on the shifted hull conv{v_j - x}.
// Finite termination, so boundary tests can rely on near-machine precision.
double hull_distance(const std::vector<Eigen::VectorXd>& vertices, const Eigen::VectorXd& x,
                     int iters, Eigen::VectorXd* weights_out) {
  const int m = static_cast<int>(vertices.size());
  const int d = static_cast<int>(x.size());
  Eigen::MatrixXd P(d, m);
  double scale = 1.0;
  for (int j = 0; j < m; ++j) {
    P.col(j) = vertices[j] - x;
    scale = std::max(scale, P.col(j).squaredNorm());
  }

  // corral: affinely independent support set with positive weights
  std::vector<int> corral;
  std::vector<double> wts;
  {
    int j0 = 0;
    for (int j = 1; j < m; ++j)
      if (P.col(j).squaredNorm() < P.col(j0).squaredNorm()) j0 = j;
    corral.push_back(j0);
    wts.push_back(1.0);
  }

  auto affine_minimizer = [&](Eigen::VectorXd& z) {
    const int k = static_cast<int>(corral.size());
    Eigen::MatrixXd kkt(k + 1, k + 1);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) kkt(a, b) = P.col(corral[a]).dot(P.col(corral[b]));
    kkt.block(0, k, k, 1).setOnes();
    kkt.block(k, 0, 1, k).setOnes();
    kkt(k, k) = 0.0;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
    rhs[k] = 1.0;
    Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    z = sol.head(k);
  };

  const double tol = 1e-12 * scale;
  for (int major = 0; major < iters; ++major) {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(d);
    for (size_t a = 0; a < corral.size(); ++a) q += wts[a] * P.col(corral[a]);

    int jbest = 0;
    double vbest = q.dot(P.col(0));
    for (int j = 1; j < m; ++j) {
      const double v = q.dot(P.col(j));
      if (v < vbest) {
        vbest = v;
        jbest = j;
      }
    }
    if (vbest >= q.squaredNorm() - tol) break;  // q is the projection

    bool have = false;
    for (int idx : corral)
      if (idx == jbest) have = true;
    if (!have) {
      corral.push_back(jbest);
      wts.push_back(0.0);
    }

    // minor cycles: pull the affine minimizer back into the simplex
    for (int minor = 0; minor < 2 * m + 4; ++minor) {
      Eigen::VectorXd z;
      affine_minimizer(z);
      if (z.minCoeff() > 1e-14) {
        for (size_t a = 0; a < corral.size(); ++a) wts[a] = z[a];
        break;
      }
      double theta = 1.0;
      for (size_t a = 0; a < corral.size(); ++a)
        if (z[a] < 1e-14 && wts[a] - z[a] > 0.0)
          theta = std::min(theta, wts[a] / (wts[a] - z[a]));
      std::vector<int> next_corral;
      std::vector<double> next_wts;
      for (size_t a = 0; a < corral.size(); ++a) {
        const double w = (1.0 - theta) * wts[a] + theta * z[a];
        if (w > 1e-14) {
          next_corral.push_back(corral[a]);
          next_wts.push_back(w);
        }
      }
      if (next_corral.empty()) {  // numerical collapse, keep best single point
        next_corral.push_back(jbest);
        next_wts.push_back(1.0);
      }
      corral.swap(next_corral);
      wts.swap(next_wts);
    }
  }

  Eigen::VectorXd w_full = Eigen::VectorXd::Zero(m);
  double sum = 0.0;
  for (size_t a = 0; a < corral.size(); ++a) sum += wts[a];
  for (size_t a = 0; a < corral.size(); ++a) w_full[corral[a]] = wts[a] / sum;
  if (weights_out != nullptr) *weights_out = w_full;
  return (P * w_full).norm();
}

// ---------------------------------------------------------------------------
// Relative interior radius

namespace {

// Orthonormal basis of the direction space of aff(vertices).
Eigen::MatrixXd affine_hull_basis(const std::vector<Eigen::VectorXd>& vertices) {
  const int d = static_cast<int>(vertices.front().size());
  const int k = static_cast<int>(vertices.size());
  Eigen::MatrixXd M(d, std::max(k - 1, 1));
  if (k == 1) {
    M.setZero();
    return M.leftCols(0);
  }
  for (int j = 1; j < k; ++j) M.col(j - 1) = vertices[j] - vertices[0];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-10 * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;
  return svd.matrixU().leftCols(rank);
}

double radius_finite(const DomainSpec& domain, const Eigen::VectorXd& x, const RadiusOptions& opts) {
  const Eigen::MatrixXd basis = affine_hull_basis(domain.vertices);
  if (basis.cols() == 0) return 0.0;  // single point: degenerate hull

  double diam = domain.diameter();
  if (diam == 0.0) return 0.0;

  CounterRng rng(opts.seed, 0, stream::kDirection);
  double best = diam;
  for (int t = 0; t < opts.n_dirs; ++t) {
    Eigen::VectorXd dir = basis * rng.unit_vector(static_cast<int>(basis.cols()));
    for (int side = 0; side < 2; ++side) {
      const Eigen::VectorXd u = side == 0 ? dir : Eigen::VectorXd(-dir);
      // exit distance along u by bisection on hull membership
      double lo = 0.0, hi = diam;
      if (hull_distance(domain.vertices, x + hi * u) <= 1e-11) {
        best = std::min(best, hi);
        continue;
      }
      while (hi - lo > opts.bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        (hull_distance(domain.vertices, x + mid * u) <= 1e-11 ? lo : hi) = mid;
      }
      best = std::min(best, lo);
    }
  }
  return best;
}

}  // namespace

double relative_interior_radius(const DomainSpec& domain, const Eigen::VectorXd& x,
                                const RadiusOptions& opts) {
  require(static_cast<int>(x.size()) == domain.dim, "relative_interior_radius: dimension mismatch");
  if (membership(domain, x) == Membership::outside)
    throw std::invalid_argument("relative_interior_radius: x outside the domain");
  const int d = domain.dim;

  switch (domain.kind) {
    case DomainSpec::Kind::simplex: {
      if (d == 1) return 0.0;
      // conservative certified value: the exact affine-hull inradius is
      // sqrt(d/(d-1)) * min_i x_i, so min_i x_i is a valid lower bound
      return std::max(0.0, x.minCoeff());
    }
    case DomainSpec::Kind::l1_ball:
      return std::max(0.0, 1.0 - x.lpNorm<1>()) / std::sqrt(static_cast<double>(d));
    case DomainSpec::Kind::cube_normalized: {
      const double half = 1.0 / std::sqrt(static_cast<double>(d));
      double r = half;
      for (int i = 0; i < d; ++i) r = std::min(r, half - std::abs(x[i]));
      return std::max(0.0, r);
    }
    case DomainSpec::Kind::euclidean_ball:
      return std::max(0.0, 1.0 - x.norm());
    case DomainSpec::Kind::nuclear_ball: {
      if (domain.dim > kNuclearMembershipCap)
        throw std::invalid_argument("relative_interior_radius: nuclear ball too large for exact SVD");
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
          X(x.data(), domain.rows, domain.cols);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
      // conservative: a Frobenius ball of this radius stays inside in trace norm
      const double slack = 1.0 - svd.singularValues().sum();
      return std::max(0.0, slack) / std::sqrt(static_cast<double>(std::min(domain.rows, domain.cols)));
    }
    case DomainSpec::Kind::finite_polytope:
      return radius_finite(domain, x, opts);
  }
  throw std::logic_error("relative_interior_radius: bad kind");
}

// ---------------------------------------------------------------------------

std::vector<Atom> enumerate_vertices(const DomainSpec& domain) {
  const int d = domain.dim;
  std::vector<Atom> out;
  switch (domain.kind) {
    case DomainSpec::Kind::simplex:
      for (int j = 0; j < d; ++j) out.push_back(Atom::basis(j, +1));
      return out;
    case DomainSpec::Kind::l1_ball:
      for (int j = 0; j < d; ++j) {
        out.push_back(Atom::basis(j, +1));
        out.push_back(Atom::basis(j, -1));
      }
      return out;
    case DomainSpec::Kind::cube_normalized: {
      require(d <= 20, "enumerate_vertices: cube too large");
      const double s = 1.0 / std::sqrt(static_cast<double>(d));
      for (long mask = 0; mask < (1L << d); ++mask) {
        Eigen::VectorXd v(d);
        for (int j = 0; j < d; ++j) v[j] = (mask >> j) & 1 ? s : -s;
        out.push_back(Atom::dense_vec(std::move(v)));
      }
      return out;
    }
    case DomainSpec::Kind::finite_polytope:
      for (const auto& v : domain.vertices) out.push_back(Atom::dense_vec(v));
      return out;
    default:
      throw std::invalid_argument("enumerate_vertices: domain has no finite vertex list");
  }
}

}  // namespace sparsefw::geometry
