#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sparsefw/bounds.hpp"
#include "sparsefw/csv.hpp"
#include "sparsefw/rng.hpp"
#include "sparsefw/simplex.hpp"

using namespace sparsefw;
using bounds::BodyKind;
using bounds::BoundReport;
using bounds::Formula;

namespace {

// relative agreement with an absolute floor, for values that may be exactly 0
void check_close(double a, double b, double rel = 1e-9) {
  CHECK(std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)}));
}

}  // namespace

TEST_CASE("closed-form volumes") {
  CHECK(bounds::log_volume_unit_ball(2) == doctest::Approx(std::log(M_PI)).epsilon(1e-14));
  CHECK(bounds::log_volume(BodyKind::l1_ball, 3) ==
        doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-13));
  CHECK(bounds::log_volume(BodyKind::cube_normalized, 4) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(bounds::log_volume(BodyKind::simplex, 3) ==
        doctest::Approx(std::log(std::sqrt(3.0) / 2.0)).epsilon(1e-12));
  // square and diamond of diameter 2 have the same area, ratio 2/pi to the disk
  CHECK(bounds::volume_ratio(BodyKind::cube_normalized, 2) ==
        doctest::Approx(0.6366197723675813).epsilon(1e-13));
  CHECK(bounds::volume_ratio(BodyKind::l1_ball, 2) ==
        doctest::Approx(0.6366197723675813).epsilon(1e-13));
  CHECK(bounds::volume_ratio(std::exp(bounds::log_volume(BodyKind::l1_ball, 2)), 2) ==
        doctest::Approx(0.6366197723675813).epsilon(1e-12));
  CHECK(bounds::varv_root_of(bounds::log_volume_ratio(BodyKind::cube_normalized, 50), 50) ==
        doctest::Approx(0.5090764075568229).epsilon(1e-13));
  CHECK_THROWS_AS(bounds::log_volume(BodyKind::simplex, 1), std::invalid_argument);
  CHECK_THROWS_AS(bounds::log_volume_unit_ball(0), std::invalid_argument);
}

TEST_CASE("volumetric covering estimates") {
  // unit ball covered at eps = 1/2 in dimension 3: the estimate is 3 ln 2
  CHECK(bounds::covering_lower_volumetric(bounds::log_volume_unit_ball(3), 3, 0.5,
                                          bounds::log_volume_unit_ball(3)) ==
        doctest::Approx(2.0794415416798357).epsilon(1e-13));
  // shrunk ball of radius 1/sqrt(8) at eps = 1/(4 sqrt(8)): exactly 8 ln 4
  const double log_vol_small = bounds::log_volume_unit_ball(8) - 8 * std::log(std::sqrt(8.0));
  CHECK(bounds::covering_lower_volumetric(log_vol_small, 8, 1.0 / (4.0 * std::sqrt(8.0)),
                                          bounds::log_volume_unit_ball(8)) ==
        doctest::Approx(11.090354888959125).epsilon(1e-12));
  // simplex entropy inputs used by the empirical confrontation
  CHECK(bounds::covering_lower_volumetric(bounds::log_volume(BodyKind::simplex, 8), 7, 1.0 / 8,
                                          bounds::log_volume_unit_ball(7)) ==
        doctest::Approx(5.517832171902896).epsilon(1e-12));
  CHECK(bounds::covering_lower_volumetric(bounds::log_volume(BodyKind::simplex, 16), 15,
                                          1.0 / 16, bounds::log_volume_unit_ball(15)) ==
        doctest::Approx(16.039646924306215).epsilon(1e-12));
  CHECK_THROWS_AS(bounds::covering_lower_volumetric(1.0, 3, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("k-term hull entropy bound") {
  CHECK(bounds::khull_entropy_bound(2, std::log(10.0), 0.5) ==
        doctest::Approx(9.574983485564093).epsilon(1e-13));
  CHECK(bounds::khull_entropy_bound(1, 0.0, 1.0) ==
        doctest::Approx(std::log(6.0)).epsilon(1e-14));
  CHECK_THROWS_AS(bounds::khull_entropy_bound(0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(bounds::khull_entropy_bound(2, -0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(bounds::khull_entropy_bound(2, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bounds::khull_entropy_bound(2, 1.0, 1.5), std::invalid_argument);
}

TEST_CASE("entropy bound report") {
  const BoundReport r = bounds::lower_bound_entropy(5.517832171902896, 8, 1.0 / 8, 8);
  CHECK(r.formula == Formula::polytope_entropy);
  CHECK(r.value == doctest::Approx(0.7707671863965364).epsilon(1e-12));
  CHECK(r.tol_value == doctest::Approx(1.0 / 256).epsilon(1e-15));
  CHECK(r.d == 8);
  CHECK_FALSE(r.vacuous);

  const BoundReport r16 = bounds::lower_bound_entropy(16.039646924306215, 16, 1.0 / 16, 16);
  CHECK(r16.value == doctest::Approx(1.8770408254855258).epsilon(1e-12));

  // zero numerator gives zero without the vacuous flag: nothing was clamped
  const BoundReport z = bounds::lower_bound_entropy(0.0, 4, 0.5);
  CHECK(z.value == 0.0);
  CHECK_FALSE(z.vacuous);

  // a huge numerator trips the Caratheodory sanity flag but keeps the value
  const BoundReport cap = bounds::lower_bound_entropy(1000.0, 4, 0.5, 2);
  CHECK(cap.caratheodory_capped);
  CHECK(cap.value > cap.d + 1.0);

  CHECK_THROWS_AS(bounds::lower_bound_entropy(-1.0, 4, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(bounds::lower_bound_entropy(1.0, 0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(bounds::lower_bound_entropy(1.0, 4, 2.0), std::invalid_argument);
}

TEST_CASE("volume bound report flags") {
  // varv_root == eps zeroes the numerator exactly
  const BoundReport v = bounds::lower_bound_volume(0.25, 10, std::log(20.0), 0.25);
  CHECK(v.value == 0.0);
  CHECK(v.vacuous);

  const BoundReport ok = bounds::lower_bound_volume(0.5, 10, std::log(20.0), 0.05);
  CHECK(ok.value > 0.0);
  CHECK_FALSE(ok.vacuous);
  check_close(ok.value,
              10.0 * (std::log(0.5) + std::log(20.0)) / (3.0 + std::log(20.0) + std::log(20.0)),
              1e-12);

  CHECK_THROWS_AS(bounds::lower_bound_volume(1.5, 10, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(bounds::lower_bound_volume(0.0, 10, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(bounds::lower_bound_volume(0.5, 0, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(bounds::lower_bound_volume(0.5, 10, -1.0, 0.1), std::invalid_argument);
}

TEST_CASE("infinite-vertex bound report") {
  const BoundReport z = bounds::lower_bound_infinite(0.0, 5.0, 0.5);
  CHECK(z.value == 0.0);
  CHECK(z.vacuous);
  const BoundReport r = bounds::lower_bound_infinite(40.0, 5.0, 0.5, 12);
  check_close(r.value, 40.0 / (4.0 + 5.0 + std::log(2.0)), 1e-12);
  CHECK_THROWS_AS(bounds::lower_bound_infinite(-1.0, 5.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(bounds::lower_bound_infinite(1.0, -0.5, 0.5), std::invalid_argument);
}

TEST_CASE("l1 ball closed form anchors") {
  CHECK(bounds::lower_bound_l1(100, 1.0 / 64).value ==
        doctest::Approx(20.731974056383727).epsilon(1e-12));
  CHECK(bounds::lower_bound_l1(8, 1.0 / 8).value ==
        doctest::Approx(0.7388194597079091).epsilon(1e-12));
  CHECK(bounds::lower_bound_l1(16, 1.0 / 16).value ==
        doctest::Approx(2.400945049906535).epsilon(1e-12));
  CHECK(bounds::lower_bound_l1(32, 1.0 / 32).value ==
        doctest::Approx(6.065168291426579).epsilon(1e-12));

  const BoundReport r = bounds::lower_bound_l1(16, 1.0 / 16);
  CHECK(r.tol_value == doctest::Approx((1.0 / 16) / 16).epsilon(1e-15));
  CHECK(r.eps == doctest::Approx(4.0 * (1.0 / 16) / 4.0).epsilon(1e-15));
  CHECK(r.log_n_vertices == doctest::Approx(std::log(32.0)).epsilon(1e-14));

  // delta = 1/4 makes the numerator vanish
  const BoundReport v = bounds::lower_bound_l1(8, 0.25);
  CHECK(v.value == 0.0);
  CHECK(v.vacuous);

  CHECK_THROWS_AS(bounds::lower_bound_l1(1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(bounds::lower_bound_l1(8, 0.26), std::invalid_argument);
  CHECK_THROWS_AS(bounds::lower_bound_l1(8, 0.0), std::invalid_argument);
}

TEST_CASE("cube closed form anchors") {
  CHECK(bounds::lower_bound_cube(50, 1e-3, 0.4).value ==
        doctest::Approx(6.722146504367487).epsilon(1e-12));
  const BoundReport r = bounds::lower_bound_cube(16, 0.01);
  CHECK(r.normalization == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(r.log_n_vertices == doctest::Approx(16.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(r.tol_value == doctest::Approx(0.0001 / 4).epsilon(1e-12));
  CHECK_THROWS_AS(bounds::lower_bound_cube(1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(bounds::lower_bound_cube(8, 0.1, 1.5), std::invalid_argument);
}

TEST_CASE("nuclear closed form anchors") {
  CHECK(bounds::lower_bound_nuclear_delta(8, 8, 1.0 / 64).value ==
        doctest::Approx(4.712894990572527).epsilon(1e-12));
  const BoundReport rd = bounds::lower_bound_nuclear_delta(8, 8, 1.0 / 64);
  CHECK(rd.tol_value == doctest::Approx((1.0 / 64) / 32.0).epsilon(1e-15));

  // vacuous at and above eps = 1/sqrt(min(m, n))
  const BoundReport v = bounds::lower_bound_nuclear(8, 8, 1.0 / std::sqrt(8.0));
  CHECK(v.value == 0.0);
  CHECK(v.vacuous);
  const BoundReport v2 = bounds::lower_bound_nuclear(8, 8, 0.9);
  CHECK(v2.value == 0.0);
  CHECK(v2.vacuous);

  CHECK_THROWS_AS(bounds::lower_bound_nuclear(2, 8, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(bounds::lower_bound_nuclear_delta(8, 8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bounds::lower_bound_nuclear_delta(8, 8, 1.0), std::invalid_argument);
}

TEST_CASE("specialized forms match the general evaluators on grids") {
  // l1 ball vs volumetric form
  int points = 0;
  for (int d : {4, 8, 16, 32, 64, 128, 256}) {
    for (double delta : {0.25, 0.1, 0.015625, 1e-3}) {
      const BoundReport a = bounds::lower_bound_l1(d, delta);
      const BoundReport b = bounds::lower_bound_volume(
          1.0 / std::sqrt(static_cast<double>(d)), d, std::log(2.0 * d),
          4.0 * delta / std::sqrt(static_cast<double>(d)));
      check_close(a.value, b.value);
      CHECK(a.vacuous == b.vacuous);
      ++points;
    }
  }
  CHECK(points >= 20);

  // cube vs volumetric form with the exact volume-ratio root
  points = 0;
  for (int d : {2, 3, 8, 16, 50, 128}) {
    for (double eps : {0.9, 0.5, 0.1, 1e-3}) {
      const double varv =
          bounds::varv_root_of(bounds::log_volume_ratio(BodyKind::cube_normalized, d), d);
      const BoundReport a = bounds::lower_bound_cube(d, eps);
      const BoundReport b = bounds::lower_bound_volume(varv, d, d * std::log(2.0), eps);
      check_close(a.value, b.value);
      ++points;
    }
  }
  CHECK(points >= 20);

  // nuclear vs infinite-vertex form with the exposed covering exponents
  points = 0;
  for (auto [m, n] : std::vector<std::pair<int, int>>{{3, 3}, {4, 4}, {5, 3}, {8, 8}, {10, 6},
                                                      {16, 16}}) {
    for (double eps : {0.5, 0.25, 0.1, 0.05}) {
      const BoundReport a = bounds::lower_bound_nuclear(m, n, eps);
      const BoundReport b = bounds::lower_bound_infinite(
          bounds::nuclear_log_cover_hull(m, n, eps),
          bounds::nuclear_log_cover_vertices_half(m, n, eps), eps, m * n);
      check_close(a.value, b.value);
      ++points;
    }
  }
  CHECK(points >= 20);
}

TEST_CASE("bounds grow with dimension and with tighter tolerances") {
  double prev = -1.0;
  for (int d : {4, 8, 16, 32, 64, 128, 256}) {
    const double v = bounds::lower_bound_l1(d, 0.05).value;
    CHECK(v > prev);
    prev = v;
  }
  prev = -1.0;
  for (double delta : {0.25, 0.1, 0.05, 0.01, 1e-3}) {
    const double v = bounds::lower_bound_l1(64, delta).value;
    CHECK(v > prev);
    prev = v;
  }
  prev = -1.0;
  for (double eps : {0.3, 0.2, 0.1, 0.01}) {
    const double v = bounds::lower_bound_nuclear(8, 8, eps).value;
    CHECK(v > prev);
    prev = v;
  }
  // stays finite far beyond the experimental range
  CHECK(std::isfinite(bounds::lower_bound_l1(10000, 0.01).value));
  CHECK(std::isfinite(bounds::lower_bound_cube(10000, 0.01).value));
  CHECK(std::isfinite(bounds::log_volume_unit_ball(10000)));
}

TEST_CASE("empirical confrontation") {
  const BoundReport r = bounds::lower_bound_l1(16, 1.0 / 16);  // value ~2.4, floor 2
  const auto ok = bounds::empirical_vs_bound(2, r.tol_value, r);
  CHECK(ok.consistent);
  const auto borderline = bounds::empirical_vs_bound(5, r.tol_value, r);
  CHECK(borderline.consistent);
  const auto bad = bounds::empirical_vs_bound(1, r.tol_value, r);
  CHECK_FALSE(bad.consistent);
  CHECK(bad.detail.find("VIOLATION") != std::string::npos);

  // a vacuous bound is consistent with anything
  const BoundReport z = bounds::lower_bound_l1(8, 0.25);
  CHECK(bounds::empirical_vs_bound(0, z.tol_value, z).consistent);

  // mixing tolerance conventions must not pass silently
  CHECK_THROWS_AS(bounds::empirical_vs_bound(2, r.tol_value * 1.01, r), std::invalid_argument);
  CHECK_THROWS_AS(bounds::empirical_vs_bound(-1, r.tol_value, r), std::invalid_argument);
  CHECK_THROWS_AS(bounds::empirical_vs_bound(2, 0.0, r), std::invalid_argument);
}

TEST_CASE("report rows round-trip through csv") {
  const BoundReport r = bounds::lower_bound_l1(16, 1.0 / 16);
  const std::string text = BoundReport::csv_header() + "\n" + r.csv_row() + "\n";
  const csvio::CsvTable table = csvio::read_csv_text(text);
  REQUIRE(table.rows.size() == 1);
  const auto& row = table.rows[0];
  CHECK(row[table.column("formula")] == "l1_ball");
  CHECK(row[table.column("d")] == "16");
  CHECK(std::strtod(row[table.column("n")].c_str(), nullptr) ==
        doctest::Approx(32.0).epsilon(1e-9));
  CHECK(std::strtod(row[table.column("eps")].c_str(), nullptr) == r.eps);
  CHECK(std::strtod(row[table.column("value")].c_str(), nullptr) == r.value);
  CHECK(row[table.column("flags")].empty());

  const BoundReport v = bounds::lower_bound_l1(8, 0.25);
  const csvio::CsvTable tv =
      csvio::read_csv_text(BoundReport::csv_header() + "\n" + v.csv_row() + "\n");
  CHECK(tv.rows[0][tv.column("flags")] == "vacuous");

  CHECK(std::string(bounds::formula_name(Formula::random_polytope)) == "random_polytope");
  CHECK(std::string(bounds::formula_name(Formula::volume)) == "volume");
}

TEST_CASE("weight perturbations are l1-Lipschitz in the combined point") {
  CounterRng rng(41, 0, stream::kDictionary);
  for (int trial = 0; trial < 200; ++trial) {
    const int t = 1 + static_cast<int>(rng.below(6));
    const int d = 8;
    std::vector<Eigen::VectorXd> u;
    for (int i = 0; i < t; ++i) u.push_back(rng.unit_vector(d) * rng.uniform01());
    const Eigen::VectorXd lam = rng.gaussian_vector(t);
    const Eigen::VectorXd lam2 = rng.gaussian_vector(t);
    Eigen::VectorXd combo = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < t; ++i) combo += (lam[i] - lam2[i]) * u[i];
    CHECK(combo.norm() <= (lam - lam2).lpNorm<1>() * (1 + 1e-12) + 1e-12);
  }
}

TEST_CASE("simplex l1 covering cardinality stays under (3/eps)^t") {
  // lattice points of the weight simplex serve as candidate centers; a greedy
  // 2eps-separated subset lower-bounds the eps-covering number
  for (int t : {2, 3, 4}) {
    std::vector<Eigen::VectorXd> lattice;
    const int q = 12;
    std::vector<int> w(t, 0);
    // enumerate compositions of q into t nonnegative parts
    std::function<void(int, int)> emit = [&](int pos, int left) {
      if (pos == t - 1) {
        w[pos] = left;
        Eigen::VectorXd x(t);
        for (int i = 0; i < t; ++i) x[i] = static_cast<double>(w[i]) / q;
        lattice.push_back(x);
        return;
      }
      for (int v = 0; v <= left; ++v) {
        w[pos] = v;
        emit(pos + 1, left - v);
      }
    };
    emit(0, q);

    for (double eps : {1.0, 0.5, 0.25}) {
      std::vector<Eigen::VectorXd> packing;
      for (const auto& x : lattice) {
        bool separated = true;
        for (const auto& c : packing)
          if ((x - c).lpNorm<1>() <= 2.0 * eps) {
            separated = false;
            break;
          }
        if (separated) packing.push_back(x);
      }
      // a maximal separated set also covers every candidate at radius 2eps
      for (const auto& x : lattice) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : packing) best = std::min(best, (x - c).lpNorm<1>());
        CHECK(best <= 2.0 * eps);
      }
      CHECK(static_cast<double>(packing.size()) <= std::pow(3.0 / eps, t));
    }
  }
}

TEST_CASE("projections onto a convex set satisfy the quadratic margin") {
  CounterRng rng(43, 0, stream::kMisc);
  const int d = 12;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd y = rng.gaussian_vector(d) * 1.5;
    const Eigen::VectorXd zhat = project_to_simplex(y);
    const Eigen::VectorXd z = rng.simplex_uniform(d);
    const double lhs = (y - z).squaredNorm() - (y - zhat).squaredNorm();
    CHECK(lhs >= (zhat - z).squaredNorm() - 1e-9);
  }
}
