#include "clocksim/clock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "clocksim/errors.hpp"

namespace clocksim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log((exp(z) - 1) / z), continuous through z = 0, safe for |z| up to ~1e308.
double log_expm1_over(double z) {
  if (std::fabs(z) < 1e-8) return 0.5 * z;  // next term z^2/24 < 1e-17
  if (z > 0.0) {
    if (z > 36.0) return z + std::log1p(-std::exp(-z)) - std::log(z);
    return std::log(std::expm1(z)) - std::log(z);
  }
  return std::log(-std::expm1(z)) - std::log(-z);
}

}  // namespace

double log_segment_mass(double c, double x0, double slope, double len) {
  // integral_0^len exp(c(x0 + slope s)) ds = exp(c x0) len (exp(z)-1)/z, z = c slope len.
  const double z = c * slope * len;
  return c * x0 + std::log(len) + (slope == 0.0 ? 0.0 : log_expm1_over(z));
}

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double log_sub_exp(double a, double b) {
  if (b == kNegInf) return a;
  if (a < b) throw std::invalid_argument("log_sub_exp: needs a >= b");
  if (a == b) return kNegInf;
  return a + std::log1p(-std::exp(b - a));
}

std::optional<double> ClockScanner::advance_to(double log_target) {
  if (log_target <= log_mass_) {
    // Level already passed (duplicate or zero-level query): clamp to the end
    // of the consumed region. Queries must be nondecreasing.
    return path_->knot_time(seg_);
  }
  while (seg_ < path_->segment_count()) {
    const double x0 = path_->seg_start_value(seg_);
    const double slope = path_->seg_slope(seg_);
    const double len = path_->seg_length(seg_);
    const double log_c = log_segment_mass(alpha_, x0, slope, len);
    const double log_total = log_add_exp(log_mass_, log_c);
    if (log_total >= log_target) {
      // Solve within this segment for the remaining mass R = y - A(t_seg):
      // exp(c x0)(exp(c mu r) - 1)/(c mu) = R.
      const double log_r = log_sub_exp(log_target, log_mass_);
      const double c = alpha_;
      const double mu = slope;
      double r;
      if (mu == 0.0) {
        r = std::exp(log_r - c * x0 - std::log(len)) * len;
      } else {
        const double w = log_r - c * x0 + std::log(std::fabs(c * mu));
        if (c * mu > 0.0) {
          // r = log1p(exp(w)) / (c mu), with the softplus overflow guard.
          const double sp = w > 0.0 ? w + std::log1p(std::exp(-w))
                                    : std::log1p(std::exp(w));
          r = sp / (c * mu);
        } else {
          // Decaying segment: w < 0 is guaranteed because the target lies
          // strictly inside this segment's mass.
          r = std::log1p(-std::exp(std::min(w, -1e-300))) / (c * mu);
        }
      }
      r = std::clamp(r, 0.0, len);
      return path_->seg_start_time(seg_) + r;
    }
    log_mass_ = log_total;
    ++seg_;
  }
  return std::nullopt;
}

double log_exp_functional_A(const PiecewiseLinearPath& path, double alpha, double u) {
  if (u < 0.0 || u > path.horizon()) {
    throw std::invalid_argument("exp_functional_A: time outside [0, horizon]");
  }
  double log_mass = kNegInf;
  for (std::size_t i = 0; i < path.segment_count(); ++i) {
    const double t0 = path.seg_start_time(i);
    if (t0 >= u) break;
    const double len = std::min(path.seg_length(i), u - t0);
    log_mass = log_add_exp(log_mass, log_segment_mass(alpha, path.seg_start_value(i),
                                                      path.seg_slope(i), len));
  }
  return log_mass;
}

double exp_functional_A(const PiecewiseLinearPath& path, double alpha, double u) {
  return std::exp(log_exp_functional_A(path, alpha, u));
}

namespace {

// Shared lazy-inversion loop for LazyClock and inverse_tau.
double invert_with_extension(PiecewiseLinearPath& path, ClockScanner& scanner,
                             double alpha, double log_level,
                             const PathExtender& extend, RngStream& rng,
                             const ExtensionPolicy& policy, int& extensions) {
  if (log_level == kNegInf) return 0.0;
  for (;;) {
    if (auto u = scanner.advance_to(log_level)) return *u;
    if (extensions >= policy.max_extensions) {
      std::ostringstream msg;
      msg << "extension cap " << policy.max_extensions
          << " reached before the exponential functional hit log-level " << log_level
          << " (log A = " << scanner.log_mass_consumed() << " at horizon "
          << path.horizon() << ")";
      throw ExtensionLimitError(msg.str());
    }
    // log A grows at rate ~ alpha p per unit Levy time once the drift
    // dominates; ask for twice the remaining growth as a safety factor.
    const double log_now = scanner.log_mass_consumed();
    const double remaining =
        log_now == kNegInf ? log_level : std::max(log_level - log_now, 0.0);
    const double rate = std::max(alpha * policy.p_hint, 1e-6);
    const double chunk =
        std::clamp(2.0 * (remaining + 1.0) / rate, policy.min_chunk, policy.max_chunk);
    extend(path, chunk, rng);
    ++extensions;
  }
}

}  // namespace

LazyClock::LazyClock(const LevyFamily& family, double alpha, RngStream& rng, double dt,
                     ExtensionPolicy policy)
    : extend_(make_extender(family, dt)),
      rng_(&rng),
      alpha_(alpha),
      policy_(policy),
      scanner_(&path_, alpha) {}

double LazyClock::value_at_log_level(double log_level) {
  return invert_with_extension(path_, scanner_, alpha_, log_level, extend_, *rng_,
                               policy_, extensions_);
}

double inverse_tau(PiecewiseLinearPath& path, double alpha, double y,
                   const PathExtender& extend, RngStream& rng,
                   const ExtensionPolicy& policy) {
  if (!(y >= 0.0)) throw std::invalid_argument("inverse_tau: level must be >= 0");
  if (y == 0.0) return 0.0;
  ClockScanner scanner(&path, alpha);
  int extensions = 0;
  return invert_with_extension(path, scanner, alpha, std::log(y), extend, rng, policy,
                               extensions);
}

ClockResult clock_value(PiecewiseLinearPath& path, double alpha, double a, double t,
                        const PathExtender& extend, RngStream& rng,
                        const ExtensionPolicy& policy) {
  if (!(a > 0.0)) throw std::invalid_argument("clock_value: start must be > 0");
  if (!(t >= 0.0)) throw std::invalid_argument("clock_value: time must be >= 0");
  ClockScanner scanner(&path, alpha);
  int extensions = 0;
  const double log_level = t == 0.0 ? kNegInf : std::log(t) - alpha * std::log(a);
  const double u = invert_with_extension(path, scanner, alpha, log_level, extend, rng,
                                         policy, extensions);
  return ClockResult{u, u, extensions};
}

double reconstruct_X(const PiecewiseLinearPath& path, double alpha, double a, double t) {
  if (t == 0.0) return a;
  ClockScanner scanner(&path, alpha);
  const auto u = scanner.advance_to(std::log(t) - alpha * std::log(a));
  if (!u) throw std::invalid_argument("reconstruct_X: path too short for time t");
  return a * std::exp(path.value_at(*u));
}

std::vector<double> ou_path(PiecewiseLinearPath& path, double alpha, double a,
                            const std::vector<double>& t_grid,
                            const PathExtender& extend, RngStream& rng,
                            const ExtensionPolicy& policy) {
  ClockScanner scanner(&path, alpha);
  int extensions = 0;
  std::vector<double> out;
  out.reserve(t_grid.size());
  double prev = -std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    if (t < prev) throw std::invalid_argument("ou_path: t_grid must be nondecreasing");
    prev = t;
    // X(e^t) = a exp(xi_{tau(e^t a^-alpha)}): log-level t - alpha log a.
    const double u = invert_with_extension(path, scanner, alpha,
                                           t - alpha * std::log(a), extend, rng,
                                           policy, extensions);
    out.push_back(std::exp(-t / alpha) * a * std::exp(path.value_at(u)));
  }
  return out;
}

std::vector<double> ou_path_from_value_at_one(PiecewiseLinearPath& path, double alpha,
                                              double x1,
                                              const std::vector<double>& t_grid,
                                              const PathExtender& extend, RngStream& rng,
                                              const ExtensionPolicy& policy) {
  ClockScanner scanner(&path, alpha);
  int extensions = 0;
  std::vector<double> out;
  out.reserve(t_grid.size());
  double prev = -std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    if (t < prev) throw std::invalid_argument("ou_path: t_grid must be nondecreasing");
    prev = t;
    // U(t) = e^{-t/alpha} X'(e^t - 1), X' started at x1: level (e^t - 1) x1^-alpha,
    // in logs: t + log1p(-e^{-t}) - alpha log x1.
    double u = 0.0;
    if (t > 0.0) {
      const double log_level = t + std::log1p(-std::exp(-t)) - alpha * std::log(x1);
      u = invert_with_extension(path, scanner, alpha, log_level, extend, rng, policy,
                                extensions);
    }
    out.push_back(std::exp(-t / alpha) * x1 * std::exp(path.value_at(u)));
  }
  return out;
}

}  // namespace clocksim
