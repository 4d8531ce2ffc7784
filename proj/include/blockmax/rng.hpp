#ifndef BLOCKMAX_RNG_HPP
#define BLOCKMAX_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace blockmax {

/// SplitMix64 finalizer; used to derive well-separated substream seeds.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seeded random stream. The engine is std::mt19937_64, which the standard
/// pins bit-exactly, and every variate transform below is hand-rolled, so a
/// given seed reproduces the same stream on any platform.
///
/// Substreams are derived by hashing (master_seed, index) through SplitMix64;
/// consumers own their stream, the library keeps no global RNG state.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : eng_(splitmix64(seed)) {}

  static RngStream substream(uint64_t master_seed, uint64_t index) {
    return RngStream(splitmix64(master_seed ^ splitmix64(index + 1)));
  }

  uint64_t next_u64() { return eng_(); }

  /// Uniform on the open interval (0,1).
  double uniform() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exponential with rate 1.
  double exponential() { return -std::log(uniform()); }

  /// Standard normal (Box-Muller, second value cached).
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double t = 2.0 * 3.14159265358979323846 * uniform();
    cached_ = r * std::sin(t);
    have_cached_ = true;
    return r * std::cos(t);
  }

  /// Gamma(shape, scale 1) via Marsaglia-Tsang; shape < 1 handled by boosting.
  double gamma(double shape) {
    if (shape <= 0) return std::numeric_limits<double>::quiet_NaN();
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi_square(double df) { return 2.0 * gamma(0.5 * df); }

  /// log of a Gamma(shape, scale 1) draw; stable for tiny shapes where the
  /// draw itself would underflow.
  double log_gamma_draw(double shape) {
    if (shape >= 1.0) return std::log(gamma(shape));
    const double u = uniform();
    return std::log(gamma(shape + 1.0)) + std::log(u) / shape;
  }

  /// Positive alpha-stable with Laplace transform exp(-t^alpha), alpha in (0,1].
  /// Kanter's representation; alpha == 1 is the unit point mass.
  double positive_stable(double alpha) { return std::exp(log_positive_stable(alpha)); }

  double log_positive_stable(double alpha) {
    if (alpha >= 1.0) return 0.0;
    const double pi = 3.14159265358979323846;
    const double w = pi * uniform();
    const double e = exponential();
    // log a(w) = log sin((1-alpha)w) + [alpha/(1-alpha)] log sin(alpha w)
    //            - [1/(1-alpha)] log sin(w)
    const double la = std::log(std::sin((1.0 - alpha) * w)) +
                      alpha / (1.0 - alpha) * std::log(std::sin(alpha * w)) -
                      1.0 / (1.0 - alpha) * std::log(std::sin(w));
    return (1.0 - alpha) / alpha * (la - std::log(e));
  }

 private:
  std::mt19937_64 eng_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace blockmax

#endif  // BLOCKMAX_RNG_HPP
