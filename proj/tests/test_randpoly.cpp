#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "sparsefw/randpoly.hpp"
#include "sparsefw/special.hpp"

using namespace sparsefw;
using randpoly::ContainmentResult;
using randpoly::PolytopeKind;
using randpoly::RandomPolytopeSample;

TEST_CASE("exact cap measure anchors") {
  CHECK(randpoly::cap_measure_exact(0.0, 5) == doctest::Approx(0.5).epsilon(1e-13));
  // in dimension 3 the cap measure is linear in the height: (1 - r)/2
  CHECK(randpoly::cap_measure_exact(0.5, 3) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(randpoly::cap_measure_exact(0.2, 3) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(randpoly::cap_measure_exact(1.0 / (2.0 * std::sqrt(6.0)), 6) ==
        doctest::Approx(0.33032107762032525).epsilon(1e-12));
  CHECK(randpoly::cap_measure_exact(1.0 / (2.0 * std::sqrt(200.0)), 200) ==
        doctest::Approx(0.30914402239168304).epsilon(1e-12));

  // monotone decreasing in the height
  double prev = 0.51;
  for (double r : {0.0, 0.1, 0.3, 0.6, 0.9, 0.99}) {
    const double mu = randpoly::cap_measure_exact(r, 12);
    CHECK(mu < prev);
    CHECK(mu > 0.0);
    prev = mu;
  }

  CHECK_THROWS_AS(randpoly::cap_measure_exact(1.0, 6), std::invalid_argument);
  CHECK_THROWS_AS(randpoly::cap_measure_exact(-0.1, 6), std::invalid_argument);
  CHECK_THROWS_AS(randpoly::cap_measure_exact(0.5, 1), std::invalid_argument);
}

TEST_CASE("monte carlo cap measure agrees with the exact value") {
  const int d = 6;
  const double r = 1.0 / (2.0 * std::sqrt(static_cast<double>(d)));
  const double exact = randpoly::cap_measure_exact(r, d);
  const long n = 200000;
  const double mc = randpoly::cap_measure_mc(r, d, n, 77);
  const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(n));
  CHECK(std::abs(mc - exact) <= 4.0 * se);
  // deterministic for a fixed seed
  CHECK(randpoly::cap_measure_mc(r, d, 5000, 77) == randpoly::cap_measure_mc(r, d, 5000, 77));
  CHECK_THROWS_AS(randpoly::cap_measure_mc(0.5, 6, 0, 1), std::invalid_argument);
}

TEST_CASE("gaussian coupling lower bound") {
  // eps = 1/sqrt(6), t = 1 certifies the d = 6 working radius
  const double b = randpoly::cap_lower_bound_gaussian(1.0 / std::sqrt(6.0), 1.0, 6);
  CHECK(b == doctest::Approx(0.10886818556359312).epsilon(1e-12));
  CHECK(b <= randpoly::cap_measure_exact(1.0 / (2.0 * std::sqrt(6.0)), 6));

  // the certificate never exceeds the exact measure it certifies
  for (double s : {0.5, 1.0, 2.0}) {
    for (int d : {6, 12, 25, 50}) {
      const double eps = s / std::sqrt(static_cast<double>(d));
      const double lb = randpoly::cap_lower_bound_gaussian(eps, 1.0, d);
      const double mu = randpoly::cap_measure_exact(eps / 2.0, d);
      CHECK(lb <= mu + 1e-12);
    }
  }

  // stays useful across the whole dimension range of interest
  for (int d = 6; d <= 200; ++d)
    CHECK(randpoly::cap_lower_bound_gaussian(1.0 / std::sqrt(static_cast<double>(d)), 1.0, d) >
          0.05);

  CHECK_THROWS_AS(randpoly::cap_lower_bound_gaussian(0.0, 1.0, 6), std::invalid_argument);
  CHECK_THROWS_AS(randpoly::cap_lower_bound_gaussian(1.0, 1.0, 6), std::invalid_argument);
  CHECK_THROWS_AS(randpoly::cap_lower_bound_gaussian(0.5, 0.0, 6), std::invalid_argument);
}

TEST_CASE("polytope sampling") {
  const auto sph = randpoly::sample_polytope(PolytopeKind::spherical, 8, 40, 1234);
  CHECK(sph.vertices.size() == 40);
  for (const auto& v : sph.vertices) CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));

  // reproducible and seed-sensitive
  const auto again = randpoly::sample_polytope(PolytopeKind::spherical, 8, 40, 1234);
  for (int i = 0; i < 40; ++i)
    CHECK((sph.vertices[i] - again.vertices[i]).lpNorm<Eigen::Infinity>() == 0.0);
  const auto other = randpoly::sample_polytope(PolytopeKind::spherical, 8, 40, 1235);
  CHECK((sph.vertices[0] - other.vertices[0]).lpNorm<Eigen::Infinity>() > 0.0);

  const auto gau = randpoly::sample_polytope(PolytopeKind::gaussian, 16, 50, 7);
  double mean_norm = 0.0;
  for (const auto& v : gau.vertices) mean_norm += v.norm();
  mean_norm /= 50.0;
  CHECK(mean_norm > std::sqrt(16.0) / 2);
  CHECK(mean_norm < 2 * std::sqrt(16.0));

  CHECK_THROWS_AS(randpoly::sample_polytope(PolytopeKind::spherical, 8, 8, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(randpoly::sample_polytope(PolytopeKind::spherical, 1, 10, 1),
                  std::invalid_argument);

  CHECK(std::string(randpoly::polytope_kind_name(PolytopeKind::spherical)) == "spherical");
  CHECK(std::string(randpoly::polytope_kind_name(PolytopeKind::gaussian)) == "gaussian");
}

TEST_CASE("inscribed ball test finds the lowest violating direction") {
  // a segment in the plane cannot contain any disk
  RandomPolytopeSample seg;
  seg.kind = PolytopeKind::spherical;
  seg.d = 2;
  seg.m = 2;
  seg.vertices.push_back(Eigen::Vector2d(1, 0));
  seg.vertices.push_back(Eigen::Vector2d(-1, 0));

  const std::uint64_t seed = 99;
  const ContainmentResult res = randpoly::inscribed_ball_test(seg, 0.5, 500, seed);
  REQUIRE(res.violated);
  CHECK(res.n_dirs == 500);
  CHECK(res.direction_index >= 0);
  CHECK(res.direction.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.support_value < 0.5);
  CHECK(res.support_value == doctest::Approx(std::abs(res.direction[0])).epsilon(1e-14));

  // the reported direction is the documented per-index stream, and no earlier
  // direction violates
  for (int i = 0; i <= res.direction_index; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i), stream::kDirection);
    const Eigen::VectorXd u = rng.unit_vector(2);
    if (i == res.direction_index) {
      CHECK((u - res.direction).lpNorm<Eigen::Infinity>() == 0.0);
    } else {
      CHECK(std::abs(u[0]) >= 0.5);
    }
  }

  // worker count cannot change the answer
  for (int workers : {2, 3, 7}) {
    const ContainmentResult multi = randpoly::inscribed_ball_test(seg, 0.5, 500, seed, workers);
    CHECK(multi.violated == res.violated);
    CHECK(multi.direction_index == res.direction_index);
    CHECK(multi.support_value == res.support_value);
  }

  // a healthy random polytope passes at radius zero
  const auto sample = randpoly::sample_polytope(PolytopeKind::spherical, 6, 100, 3);
  const ContainmentResult ok = randpoly::inscribed_ball_test(sample, 0.0, 2000, 3);
  CHECK_FALSE(ok.violated);
  CHECK(ok.direction_index == -1);
  const ContainmentResult ok3 = randpoly::inscribed_ball_test(sample, 0.0, 2000, 3, 3);
  CHECK_FALSE(ok3.violated);

  CHECK_THROWS_AS(randpoly::inscribed_ball_test(seg, -0.1, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(randpoly::inscribed_ball_test(seg, 0.5, 0, 1), std::invalid_argument);
}

TEST_CASE("containment tail exponent formula") {
  const double cap = randpoly::cap_measure_exact(1.0 / (2.0 * std::sqrt(8.0)), 8);
  CHECK(randpoly::containment_tail_exponent(8, 2000, cap) ==
        doctest::Approx(std::log(2.0) + 8.0 * std::log(2000.0) - 2000.0 * cap).epsilon(1e-13));
  // more vertices eventually drive the failure bound down
  CHECK(randpoly::containment_tail_exponent(8, 4000, cap) <
        randpoly::containment_tail_exponent(8, 2000, cap));
  CHECK_THROWS_AS(randpoly::containment_tail_exponent(8, 100, 1.5), std::invalid_argument);
}

TEST_CASE("spherical pipeline wires the advertised quantities together") {
  const int d = 8, m = 2000;
  const double delta = 0.25;
  const std::uint64_t seed = 5;
  const auto report = randpoly::randpoly_bound_pipeline(PolytopeKind::spherical, d, m, delta,
                                                        seed, 2000);
  CHECK(report.formula == bounds::Formula::random_polytope);

  const double r = 1.0 / (2.0 * std::sqrt(static_cast<double>(d)));
  const double eps = std::sqrt(delta / (4.0 * d));
  CHECK(report.eps == doctest::Approx(eps).epsilon(1e-15));
  CHECK(report.varv_root == doctest::Approx(r).epsilon(1e-15));
  CHECK(report.normalization == 1.0);

  const auto direct = bounds::lower_bound_volume(r, d, std::log(static_cast<double>(m)), eps);
  CHECK(report.value == doctest::Approx(direct.value).epsilon(1e-14));
  CHECK(report.tail_exponent ==
        doctest::Approx(randpoly::containment_tail_exponent(
                            d, m, randpoly::cap_measure_exact(r, d)))
            .epsilon(1e-13));

  const auto sample = randpoly::sample_polytope(PolytopeKind::spherical, d, m, seed);
  const auto cont = randpoly::inscribed_ball_test(sample, r, 2000, seed);
  CHECK(report.containment_refuted == cont.violated);
}

TEST_CASE("gaussian pipeline rescales by the measured max norm") {
  const int d = 8, m = 30;
  const std::uint64_t seed = 9;
  const auto report =
      randpoly::randpoly_bound_pipeline(PolytopeKind::gaussian, d, m, 0.25, seed, 500);

  const auto sample = randpoly::sample_polytope(PolytopeKind::gaussian, d, m, seed);
  double R = 1.0;
  for (const auto& v : sample.vertices) R = std::max(R, v.norm());
  CHECK(report.normalization == doctest::Approx(R).epsilon(1e-15));
  CHECK(report.varv_root == doctest::Approx(std::min(1.0, 1.0 / R)).epsilon(1e-15));
  CHECK(report.tail_exponent ==
        doctest::Approx(randpoly::containment_tail_exponent(d, m, gauss_upper_tail(1.0)))
            .epsilon(1e-13));

  const auto cont = randpoly::inscribed_ball_test(sample, 1.0, 500, seed);
  CHECK(report.containment_refuted == cont.violated);
}

TEST_CASE("pipeline guards its dimension range") {
  CHECK_THROWS_WITH(randpoly::randpoly_bound_pipeline(PolytopeKind::spherical, 4, 10, 0.25, 1),
                    "randpoly: pipeline needs d >= 6");
  CHECK_THROWS_AS(randpoly::randpoly_bound_pipeline(PolytopeKind::spherical, 8, 100, 0.0, 1),
                  std::invalid_argument);
}
