#include "clocksim/path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clocksim {

void PiecewiseLinearPath::extend_linear(double dt, double slope) {
  if (!(dt > 0.0)) throw std::invalid_argument("extend_linear: dt must be > 0");
  knot_t_.push_back(knot_t_.back() + dt);
  knot_value_.push_back(knot_value_.back() + slope * dt);
  slope_.push_back(slope);
  jump_.push_back(0.0);
}

void PiecewiseLinearPath::add_jump(double size) {
  knot_value_.back() += size;
  jump_.back() += size;
}

double PiecewiseLinearPath::value_at(double u) const {
  if (u < 0.0 || u > horizon()) {
    throw std::invalid_argument("value_at: time outside [0, horizon]");
  }
  // Index of the segment whose half-open interval [t_i, t_{i+1}) contains u.
  const auto it = std::upper_bound(knot_t_.begin(), knot_t_.end(), u);
  const std::size_t i = static_cast<std::size_t>(it - knot_t_.begin()) - 1;
  if (i >= slope_.size()) return knot_value_.back();  // u == horizon
  return knot_value_[i] + slope_[i] * (u - knot_t_[i]);
}

void PiecewiseLinearPath::reserve_segments(std::size_t n) {
  knot_t_.reserve(n + 1);
  knot_value_.reserve(n + 1);
  slope_.reserve(n);
  jump_.reserve(n + 1);
}

namespace {

// Upper bound on segments appended per extension chunk; keeps a single lazy
// extension from pre-allocating far past what the level query needs.
constexpr double kMaxChunkSegments = 1e6;

struct CpParams {
  double drift;
  double rate;       // jump intensity
  double jump_mean;  // 1/b
  double jump_sign;  // +1 or -1
};

CpParams cp_params(const LevyFamily& family) {
  if (const auto* f = std::get_if<CpPosDrift>(&family.kind)) {
    return {f->d, f->a, 1.0 / f->b, +1.0};
  }
  if (const auto* f = std::get_if<CpNegDrift>(&family.kind)) {
    return {-1.0, f->a, 1.0 / f->b, +1.0};
  }
  if (const auto* f = std::get_if<SawTooth>(&family.kind)) {
    return {+1.0, f->a, 1.0 / f->b, -1.0};
  }
  throw std::invalid_argument("not a compound-Poisson family");
}

void append_cp(PiecewiseLinearPath& path, const CpParams& cp, double levy_time,
               RngStream& rng) {
  // The exponential gap is memoryless, so restarting the gap clock at the
  // current horizon is distributionally exact.
  double remaining = levy_time;
  while (remaining > 0.0) {
    const double gap = rng.exponential(cp.rate);
    if (gap >= remaining) {
      path.extend_linear(remaining, cp.drift);
      break;
    }
    path.extend_linear(gap, cp.drift);
    path.add_jump(cp.jump_sign * rng.exponential(1.0) * cp.jump_mean);
    remaining -= gap;
  }
}

void append_bm(PiecewiseLinearPath& path, double nu, double levy_time,
               RngStream& rng, double dt) {
  // xi = 2B + 2 nu t: increment over dt is N(2 nu dt, 4 dt).
  const auto steps = static_cast<std::size_t>(std::ceil(levy_time / dt));
  const double sd = 2.0 * std::sqrt(dt);
  const double mean = 2.0 * nu * dt;
  path.reserve_segments(path.segment_count() + steps);
  for (std::size_t k = 0; k + 1 < steps; ++k) {
    const double inc = mean + sd * rng.normal();
    path.extend_linear(dt, inc / dt);
  }
  // Last step may be shorter so the horizon advances by exactly levy_time.
  const double last = levy_time - dt * static_cast<double>(steps - 1);
  const double inc = 2.0 * nu * last + 2.0 * std::sqrt(last) * rng.normal();
  path.extend_linear(last, inc / last);
}

}  // namespace

PiecewiseLinearPath sample_cp_path(const LevyFamily& family, double horizon,
                                   RngStream& rng) {
  if (!(horizon > 0.0)) throw std::invalid_argument("sample_cp_path: horizon must be > 0");
  PiecewiseLinearPath path;
  append_cp(path, cp_params(family), horizon, rng);
  return path;
}

PiecewiseLinearPath sample_bm_path(const LevyFamily& family, double horizon,
                                   RngStream& rng, double dt) {
  const auto* f = std::get_if<BrownianDrift>(&family.kind);
  if (f == nullptr) throw std::invalid_argument("sample_bm_path: not the Brownian family");
  if (!(dt > 0.0) || !(horizon >= dt)) {
    throw std::invalid_argument("sample_bm_path: need dt > 0 and horizon >= dt");
  }
  PiecewiseLinearPath path;
  append_bm(path, f->nu, horizon, rng, dt);
  return path;
}

PiecewiseLinearPath sample_path(const LevyFamily& family, double horizon,
                                RngStream& rng, double dt) {
  if (std::holds_alternative<BrownianDrift>(family.kind)) {
    return sample_bm_path(family, horizon, rng, dt);
  }
  return sample_cp_path(family, horizon, rng);
}

PathExtender make_extender(const LevyFamily& family, double dt) {
  if (std::holds_alternative<BrownianDrift>(family.kind)) {
    const double nu = std::get<BrownianDrift>(family.kind).nu;
    return [nu, dt](PiecewiseLinearPath& path, double levy_time, RngStream& rng) {
      const double capped = std::min(levy_time, kMaxChunkSegments * dt);
      append_bm(path, nu, std::max(capped, dt), rng, dt);
    };
  }
  const CpParams cp = cp_params(family);
  return [cp](PiecewiseLinearPath& path, double levy_time, RngStream& rng) {
    const double capped = std::min(levy_time, kMaxChunkSegments / cp.rate);
    append_cp(path, cp, capped, rng);
  };
}

}  // namespace clocksim
