#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace sparsefw::geometry {

// An extreme point returned by a linear minimization oracle. Three storage
// forms so that basis vectors and rank-one matrices stay cheap; matrices are
// flattened row-major into vectors of length rows*cols.
struct Atom {
  enum class Kind { dense, signed_basis, rank_one };

  Kind kind = Kind::dense;
  Eigen::VectorXd coords;  // dense
  int index = 0;           // signed_basis, 0-based
  int sign = 1;            // signed_basis / rank_one, +1 or -1
  Eigen::VectorXd u, v;    // rank_one factors, unit norm

  static Atom dense_vec(Eigen::VectorXd x) {
    Atom a;
    a.kind = Kind::dense;
    a.coords = std::move(x);
    return a;
  }

  static Atom basis(int index, int sign) {
    Atom a;
    a.kind = Kind::signed_basis;
    a.index = index;
    a.sign = sign;
    return a;
  }

  static Atom rank_one(Eigen::VectorXd u, Eigen::VectorXd v, int sign) {
    Atom a;
    a.kind = Kind::rank_one;
    a.u = std::move(u);
    a.v = std::move(v);
    a.sign = sign;
    return a;
  }

  // Dense representation in the ambient space.
  Eigen::VectorXd dense(int ambient) const {
    switch (kind) {
      case Kind::dense:
        if (coords.size() != ambient) throw std::invalid_argument("atom: ambient mismatch");
        return coords;
      case Kind::signed_basis: {
        if (index < 0 || index >= ambient) throw std::invalid_argument("atom: index out of range");
        Eigen::VectorXd x = Eigen::VectorXd::Zero(ambient);
        x[index] = sign;
        return x;
      }
      case Kind::rank_one: {
        const int m = static_cast<int>(u.size());
        const int n = static_cast<int>(v.size());
        if (m * n != ambient) throw std::invalid_argument("atom: ambient mismatch");
        Eigen::VectorXd x(ambient);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < n; ++j) x[i * n + j] = sign * u[i] * v[j];
        return x;
      }
    }
    throw std::logic_error("atom: bad kind");
  }

  // <atom, g> without densifying.
  double dot(const Eigen::VectorXd& g) const {
    switch (kind) {
      case Kind::dense:
        if (coords.size() != g.size()) throw std::invalid_argument("atom: ambient mismatch");
        return coords.dot(g);
      case Kind::signed_basis:
        if (index < 0 || index >= g.size()) throw std::invalid_argument("atom: index out of range");
        return sign * g[index];
      case Kind::rank_one: {
        const int m = static_cast<int>(u.size());
        const int n = static_cast<int>(v.size());
        if (static_cast<long>(m) * n != g.size()) throw std::invalid_argument("atom: ambient mismatch");
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            G(g.data(), m, n);
        return sign * u.dot(G * v);
      }
    }
    throw std::logic_error("atom: bad kind");
  }

  // x += w * atom
  void add_to(Eigen::VectorXd& x, double w) const {
    switch (kind) {
      case Kind::dense:
        x += w * coords;
        return;
      case Kind::signed_basis:
        x[index] += w * sign;
        return;
      case Kind::rank_one: {
        const int m = static_cast<int>(u.size());
        const int n = static_cast<int>(v.size());
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < n; ++j) x[i * n + j] += w * sign * u[i] * v[j];
        return;
      }
    }
  }

  // Equality as points of the ambient space (a rank-one atom equals its
  // double sign flip). Cheap structural paths first, dense fallback.
  bool same_as(const Atom& o, int ambient, double tol = 1e-12) const {
    if (kind == Kind::signed_basis && o.kind == Kind::signed_basis)
      return index == o.index && sign == o.sign;
    if (kind == Kind::rank_one && o.kind == Kind::rank_one) {
      if (u.size() != o.u.size() || v.size() != o.v.size()) return false;
      const double cu = u.dot(o.u);
      const double cv = v.dot(o.v);
      if (std::abs(std::abs(cu) - 1.0) > tol || std::abs(std::abs(cv) - 1.0) > tol) return false;
      const double orient = (cu > 0 ? 1 : -1) * (cv > 0 ? 1 : -1) * sign * o.sign;
      return orient > 0;
    }
    return (dense(ambient) - o.dense(ambient)).lpNorm<Eigen::Infinity>() <= tol;
  }
};

}  // namespace sparsefw::geometry
