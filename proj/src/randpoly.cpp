#include "sparsefw/randpoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "sparsefw/special.hpp"

namespace sparsefw::randpoly {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

Eigen::VectorXd direction_at(std::uint64_t seed, int index, int d) {
  CounterRng rng(seed, static_cast<std::uint64_t>(index), stream::kDirection);
  return rng.unit_vector(d);
}

}  // namespace

const char* polytope_kind_name(PolytopeKind k) {
  return k == PolytopeKind::spherical ? "spherical" : "gaussian";
}

RandomPolytopeSample sample_polytope(PolytopeKind kind, int d, int m, std::uint64_t seed) {
  require(d >= 2, "randpoly: d must be at least 2");
  require(m >= d + 1, "randpoly: need at least d + 1 vertices");
  RandomPolytopeSample s;
  s.kind = kind;
  s.d = d;
  s.m = m;
  s.seed = seed;
  s.vertices.reserve(m);
  CounterRng rng(seed, 0, stream::kVertices);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd v = rng.gaussian_vector(d);
    if (kind == PolytopeKind::spherical) {
      const double nv = v.norm();
      require(nv > 0.0, "randpoly: degenerate zero draw");
      v /= nv;
    }
    s.vertices.push_back(std::move(v));
  }
  return s;
}

double cap_measure_exact(double r, int d) {
  require(r >= 0.0 && r < 1.0, "randpoly: cap height must lie in [0, 1)");
  require(d >= 2, "randpoly: d must be at least 2");
  return 0.5 * reg_inc_beta(0.5 * (d - 1), 0.5, 1.0 - r * r);
}

double cap_measure_mc(double r, int d, long samples, std::uint64_t seed) {
  require(r >= 0.0 && r < 1.0, "randpoly: cap height must lie in [0, 1)");
  require(d >= 2, "randpoly: d must be at least 2");
  require(samples > 0, "randpoly: need a positive sample count");
  CounterRng rng(seed, 0, stream::kMisc);
  long hits = 0;
  for (long i = 0; i < samples; ++i) {
    double first = rng.normal();
    double sq = first * first;
    for (int j = 1; j < d; ++j) {
      const double z = rng.normal();
      sq += z * z;
    }
    if (first >= r * std::sqrt(sq)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

double cap_lower_bound_gaussian(double eps, double t, int d) {
  require(eps > 0.0 && eps < 1.0, "randpoly: eps must lie in (0, 1)");
  require(t > 0.0, "randpoly: t must be positive");
  require(d >= 2, "randpoly: d must be at least 2");
  return gauss_upper_tail(eps * std::sqrt(static_cast<double>(d))) -
         std::exp(-0.5 * t * t * d);
}

ContainmentResult inscribed_ball_test(const RandomPolytopeSample& sample, double r, int n_dirs,
                                      std::uint64_t seed, int workers) {
  require(r >= 0.0, "randpoly: radius must be nonnegative");
  require(n_dirs >= 1, "randpoly: need at least one direction");
  require(!sample.vertices.empty(), "randpoly: empty vertex set");
  const int d = static_cast<int>(sample.vertices.front().size());
  const int m = static_cast<int>(sample.vertices.size());

  Eigen::MatrixXd V(m, d);
  for (int i = 0; i < m; ++i) V.row(i) = sample.vertices[i].transpose();

  workers = std::max(1, workers);
  const int chunk = 1024;

  auto scan = [&](int begin, int end) -> int {  // lowest violating index in [begin, end)
    for (int base = begin; base < end; base += chunk) {
      const int k = std::min(chunk, end - base);
      Eigen::MatrixXd U(d, k);
      for (int j = 0; j < k; ++j) U.col(j) = direction_at(seed, base + j, d);
      const Eigen::VectorXd support = (V * U).colwise().maxCoeff();
      for (int j = 0; j < k; ++j)
        if (support[j] < r) return base + j;
    }
    return -1;
  };

  int found = -1;
  if (workers == 1) {
    found = scan(0, n_dirs);
  } else {
    std::vector<int> results(workers, -1);
    std::vector<std::thread> pool;
    const int per = (n_dirs + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * per;
      const int end = std::min(n_dirs, begin + per);
      if (begin >= end) break;
      pool.emplace_back([&, w, begin, end] { results[w] = scan(begin, end); });
    }
    for (auto& t : pool) t.join();
    for (int idx : results)
      if (idx >= 0 && (found < 0 || idx < found)) found = idx;
  }

  ContainmentResult res;
  res.n_dirs = n_dirs;
  if (found >= 0) {
    res.violated = true;
    res.direction_index = found;
    res.direction = direction_at(seed, found, d);
    double h = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) h = std::max(h, sample.vertices[i].dot(res.direction));
    res.support_value = h;
  }
  return res;
}

double containment_tail_exponent(int d, int m, double cap_mass) {
  require(cap_mass >= 0.0 && cap_mass <= 1.0, "randpoly: cap mass must lie in [0, 1]");
  return std::log(2.0) + d * std::log(static_cast<double>(m)) - m * cap_mass;
}

bounds::BoundReport randpoly_bound_pipeline(PolytopeKind kind, int d, int m, double delta,
                                            std::uint64_t seed, int n_dirs, int workers) {
  require(d >= 6, "randpoly: pipeline needs d >= 6");
  require(delta > 0.0 && delta < 1.0, "randpoly: delta must lie in (0, 1)");
  const RandomPolytopeSample sample = sample_polytope(kind, d, m, seed);
  const double eps = std::sqrt(delta / (4.0 * d));

  double r, varv_root, cap_mass, normalization = 1.0;
  if (kind == PolytopeKind::spherical) {
    r = 1.0 / (2.0 * std::sqrt(static_cast<double>(d)));
    varv_root = r;
    cap_mass = cap_measure_exact(r, d);
  } else {
    r = 1.0;
    for (const auto& v : sample.vertices) normalization = std::max(normalization, v.norm());
    varv_root = std::min(1.0, 1.0 / normalization);
    cap_mass = gauss_upper_tail(1.0);
  }

  const ContainmentResult cont = inscribed_ball_test(sample, r, n_dirs, seed, workers);

  bounds::BoundReport report =
      bounds::lower_bound_volume(varv_root, d, std::log(static_cast<double>(m)), eps);
  report.formula = bounds::Formula::random_polytope;
  report.normalization = normalization;
  report.tail_exponent = containment_tail_exponent(d, m, cap_mass);
  report.containment_refuted = cont.violated;
  if (cont.violated)
    report.tolerance_note += "; containment refuted at this seed (direction " +
                             std::to_string(cont.direction_index) + ")";
  return report;
}

}  // namespace sparsefw::randpoly
