#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

namespace sparsefw {

// Counter-based generator: every output is a pure function of (key, counter),
// so a stream keyed by (master_seed, trial, tag) produces the same sequence no
// matter which worker thread runs the trial or in what order trials finish.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t tag)
      : key_(derive_key(master_seed, trial, tag)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return scramble(key_ ^ mult(counter_++)); }

  // Uniform on (0,1): 53-bit mantissa, never exactly 0 or 1.
  double uniform01() {
    const double u = static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    return u == 0.0 ? 0x1.0p-53 : u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller; consumes exactly two uniforms per call (no cached spare, so
  // the draw count stays a simple function of usage).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  std::uint64_t below(std::uint64_t n) { return (*this)() % n; }

  Eigen::VectorXd gaussian_vector(int d) {
    Eigen::VectorXd g(d);
    for (int i = 0; i < d; ++i) g[i] = normal();
    return g;
  }

  Eigen::VectorXd unit_vector(int d) {
    Eigen::VectorXd g = gaussian_vector(d);
    double n = g.norm();
    while (n == 0.0) {
      g = gaussian_vector(d);
      n = g.norm();
    }
    return g / n;
  }

  // Uniform on the probability simplex via exponential spacings.
  Eigen::VectorXd simplex_uniform(int d) {
    Eigen::VectorXd w(d);
    for (int i = 0; i < d; ++i) w[i] = -std::log(uniform01());
    return w / w.sum();
  }

  // Uniform on the boundary of the l1 ball: simplex weights with random signs.
  Eigen::VectorXd l1_boundary(int d) {
    Eigen::VectorXd w = simplex_uniform(d);
    for (int i = 0; i < d; ++i)
      if ((*this)() & 1u) w[i] = -w[i];
    return w;
  }

  // Uniform in the closed l1 ball.
  Eigen::VectorXd l1_interior(int d) {
    return l1_boundary(d) * std::pow(uniform01(), 1.0 / d);
  }

 private:
  static std::uint64_t mult(std::uint64_t c) {
    return (c + 1) * 0x9E3779B97F4A7C15ull;
  }
  static std::uint64_t scramble(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }
  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t trial, std::uint64_t tag) {
    std::uint64_t k = scramble(seed ^ 0xA0761D6478BD642Full);
    k = scramble(k ^ trial * 0xE7037ED1A0B428DBull);
    k = scramble(k ^ tag * 0x8EBC6AF09C88C6E3ull);
    return k;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Stream tags keep the draws of unrelated components from colliding even when
// they share (master_seed, trial).
namespace stream {
inline constexpr std::uint64_t kTarget = 1;
inline constexpr std::uint64_t kNoise = 2;
inline constexpr std::uint64_t kLmoStart = 3;
inline constexpr std::uint64_t kDirection = 4;
inline constexpr std::uint64_t kVertices = 5;
inline constexpr std::uint64_t kDictionary = 6;
inline constexpr std::uint64_t kPlacement = 7;
inline constexpr std::uint64_t kMisc = 8;
}  // namespace stream

}  // namespace sparsefw
