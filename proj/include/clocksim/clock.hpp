// Exponential functional of a path and its inverse (the additive clock).
//
//   A(u) = integral_0^u exp(alpha xi_s) ds,   tau(y) = inf{u : A(u) >= y}.
//
// The clock of the self-similar process started at a is T(t) = tau(t a^-alpha).
// Levels are supplied in log-space throughout: the verification regime needs
// y = exp(L t) with L up to 1e4, far beyond double range, so per-segment masses
// and the running total are kept as logarithms (segment masses have a closed
// form, the running sum is a streaming log-sum-exp, and the within-segment
// inversion is solved directly on log quantities).

#pragma once

#include <limits>
#include <optional>

#include "clocksim/path.hpp"
#include "clocksim/rng.hpp"

namespace clocksim {

// log( integral_0^len exp(c * (x0 + slope s)) ds ) for c != 0; stable for any
// magnitude of c*slope*len.
double log_segment_mass(double c, double x0, double slope, double len);

// log(exp(a) + exp(b)) with -inf handled.
double log_add_exp(double a, double b);

// log(exp(a) - exp(b)) for a >= b.
double log_sub_exp(double a, double b);

// Forward scanner over a path: answers nondecreasing level queries
// A(u) = exp(log_target) with a single pass, keeping O(1) state. The path may
// grow (append-only) between calls.
class ClockScanner {
 public:
  ClockScanner(const PiecewiseLinearPath* path, double alpha)
      : path_(path), alpha_(alpha) {}

  // Levy time u with A(u) = exp(log_target); std::nullopt if the path ends
  // first (caller should extend the path and retry). Queries must not decrease.
  std::optional<double> advance_to(double log_target);

  // log A at the last fully consumed knot.
  [[nodiscard]] double log_mass_consumed() const { return log_mass_; }

 private:
  const PiecewiseLinearPath* path_;
  double alpha_;
  std::size_t seg_ = 0;
  double log_mass_ = -std::numeric_limits<double>::infinity();
};

// A(u) for moderate paths (linear-space convenience; may overflow for long
// drifting paths — use log_exp_functional_A then).
double exp_functional_A(const PiecewiseLinearPath& path, double alpha, double u);
double log_exp_functional_A(const PiecewiseLinearPath& path, double alpha, double u);

struct ExtensionPolicy {
  double p_hint = 1.0;        // expected growth rate of log A per unit Levy time is alpha*p
  int max_extensions = 256;
  double min_chunk = 1.0;     // Levy time
  double max_chunk = 1e6;     // Levy time (segment caps live in the extender)
};

// Lazily extended clock: owns the path, extends it on demand to answer
// nondecreasing log-level queries. Throws ExtensionLimitError when the policy
// cap is exhausted before the level is reached.
class LazyClock {
 public:
  LazyClock(const LevyFamily& family, double alpha, RngStream& rng,
            double dt = 1e-3, ExtensionPolicy policy = {});

  // Levy time tau(exp(log_level)); log_level = -inf returns 0.
  double value_at_log_level(double log_level);

  [[nodiscard]] const PiecewiseLinearPath& path() const { return path_; }
  [[nodiscard]] int extensions() const { return extensions_; }

 private:
  PiecewiseLinearPath path_;
  PathExtender extend_;
  RngStream* rng_;
  double alpha_;
  ExtensionPolicy policy_;
  ClockScanner scanner_;
  int extensions_ = 0;
};

struct ClockResult {
  double clock;           // tau at the requested level = Levy time consumed
  double levy_time_used;  // equals clock
  int extensions;
};

// tau(y) on an existing path, extending via `extend` as needed.
double inverse_tau(PiecewiseLinearPath& path, double alpha, double y,
                   const PathExtender& extend, RngStream& rng,
                   const ExtensionPolicy& policy = {});

// Clock T(t) = tau(t a^-alpha) of the self-similar process started at a.
ClockResult clock_value(PiecewiseLinearPath& path, double alpha, double a, double t,
                        const PathExtender& extend, RngStream& rng,
                        const ExtensionPolicy& policy = {});

// X(t) = a exp(xi_{tau(t a^-alpha)}) on an already long-enough path.
double reconstruct_X(const PiecewiseLinearPath& path, double alpha, double a, double t);

// U(t) = exp(-t/alpha) X(exp(t)) evaluated on a grid (literal definition; the
// start is X at time 1, not the time-0 value).
std::vector<double> ou_path(PiecewiseLinearPath& path, double alpha, double a,
                            const std::vector<double>& t_grid,
                            const PathExtender& extend, RngStream& rng,
                            const ExtensionPolicy& policy = {});

// Stationary variant started from a draw x1 of the time-1 marginal: the time
// shift U(t) = exp(-t/alpha) X'(exp(t) - 1) with X'(0) = x1 keeps U(0) = x1 and
// makes the marginal law exactly t-independent when x1 has the invariant law.
std::vector<double> ou_path_from_value_at_one(PiecewiseLinearPath& path, double alpha,
                                              double x1,
                                              const std::vector<double>& t_grid,
                                              const PathExtender& extend, RngStream& rng,
                                              const ExtensionPolicy& policy = {});

}  // namespace clocksim
