// Piecewise-linear cadlag paths and exact Levy path samplers.
//
// A path starts at value 0 at time 0 and is a sequence of linear segments with
// jumps at segment boundaries (right-continuous). Compound-Poisson-plus-drift
// families are simulated exactly (exponential gaps, exponential jump sizes);
// the Brownian family is simulated with exact Gaussian marginals on a uniform
// grid and linear interpolation in between (bias is O(dt) and covered by a
// step-halving test).

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "clocksim/levy_family.hpp"
#include "clocksim/rng.hpp"

namespace clocksim {

class PiecewiseLinearPath {
 public:
  PiecewiseLinearPath() : knot_t_{0.0}, knot_value_{0.0}, jump_{0.0} {}

  // Appends a linear segment of length dt continuing from the right endpoint.
  void extend_linear(double dt, double slope);

  // Adds a jump at the current horizon (the next segment starts displaced).
  void add_jump(double size);

  [[nodiscard]] double horizon() const { return knot_t_.back(); }
  [[nodiscard]] std::size_t segment_count() const { return slope_.size(); }
  [[nodiscard]] double end_value() const { return knot_value_.back(); }

  // xi(u), right-continuous; u must lie in [0, horizon].
  [[nodiscard]] double value_at(double u) const;

  // Segment accessors (i < segment_count()).
  [[nodiscard]] double seg_start_time(std::size_t i) const { return knot_t_[i]; }
  [[nodiscard]] double seg_length(std::size_t i) const {
    return knot_t_[i + 1] - knot_t_[i];
  }
  [[nodiscard]] double seg_start_value(std::size_t i) const { return knot_value_[i]; }
  [[nodiscard]] double seg_slope(std::size_t i) const { return slope_[i]; }

  [[nodiscard]] std::size_t knot_count() const { return knot_t_.size(); }
  [[nodiscard]] double knot_time(std::size_t i) const { return knot_t_[i]; }
  [[nodiscard]] double knot_value(std::size_t i) const { return knot_value_[i]; }
  [[nodiscard]] double knot_jump(std::size_t i) const { return jump_[i]; }

  void reserve_segments(std::size_t n);

 private:
  std::vector<double> knot_t_;      // t_0 = 0 < t_1 < ... < t_n
  std::vector<double> knot_value_;  // xi(t_i+) (post-jump)
  std::vector<double> slope_;       // slope on [t_i, t_{i+1})
  std::vector<double> jump_;        // jump at t_i (jump_[0] = 0)
};

// Extends `path` by (approximately) `levy_time` more path, drawing from `rng`.
// Exact for the memoryless compound-Poisson gap structure; the Brownian sampler
// appends whole grid steps of size dt.
using PathExtender =
    std::function<void(PiecewiseLinearPath& path, double levy_time, RngStream& rng)>;

// Exact compound-Poisson-plus-drift path up to `horizon`.
PiecewiseLinearPath sample_cp_path(const LevyFamily& family, double horizon,
                                   RngStream& rng);

// Brownian-with-drift path with exact Gaussian grid marginals at step dt.
PiecewiseLinearPath sample_bm_path(const LevyFamily& family, double horizon,
                                   RngStream& rng, double dt = 1e-3);

// Uniform entry point for the four path-simulable families. Throws
// std::invalid_argument for exponent-only families.
PiecewiseLinearPath sample_path(const LevyFamily& family, double horizon,
                                RngStream& rng, double dt = 1e-3);

// Extender continuing the same family from the current horizon.
PathExtender make_extender(const LevyFamily& family, double dt = 1e-3);

}  // namespace clocksim
