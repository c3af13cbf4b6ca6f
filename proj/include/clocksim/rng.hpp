// Deterministic random variate generation.
//
// Engine: std::mt19937_64 (fully specified by the standard). All transforms are
// hand-rolled so that streams are bit-reproducible across platforms and
// standard-library versions; replica sub-streams come from a splitmix64-style
// mix of (master seed, replica index), so results do not depend on how replicas
// are scheduled across worker threads.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace clocksim {

// splitmix64 finalizer; also used to derive independent sub-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed for sub-stream `index` of a master seed. Distinct indices land in
// distinct splitmix64 streams, which is the standard splittable construction.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + index * 0x9E3779B97F4A7C15ULL);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1); never returns 0 or 1, so logs are safe.
  double u01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via the polar (Marsaglia) method with one cached spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * u01() - 1.0;
      v = 2.0 * u01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Exponential with rate `rate` (mean 1/rate).
  double exponential(double rate = 1.0) { return -std::log(u01()) / rate; }

  // Gamma(shape, scale 1) via Marsaglia-Tsang, with the shape<1 boost.
  double gamma(double shape) {
    if (shape < 1.0) {
      // X_a = X_{a+1} * U^{1/a}.
      return gamma(shape + 1.0) * std::pow(u01(), 1.0 / shape);
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
      const double u = u01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
  }

  double beta_prime(double a, double b) { return gamma(a) / gamma(b); }

  // One-sided positive stable S with index beta in (0,1), normalized so that
  // E exp(-lambda S) = exp(-lambda^beta). Kanter's construction from one
  // uniform and one exponential variate.
  double positive_stable(double beta) {
    const double u = M_PI * u01();
    const double e = exponential();
    const double ratio = beta / (1.0 - beta);
    const double log_a = ratio * std::log(std::sin(beta * u)) +
                         std::log(std::sin((1.0 - beta) * u)) -
                         (1.0 + ratio) * std::log(std::sin(u));
    return std::exp((log_a - std::log(e)) / ratio);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace clocksim
