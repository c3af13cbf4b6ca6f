// Mellin transform M(z) = E[I^{-z}] of the exponential functional
// I = integral_0^inf exp(-alpha xi_s) ds.
//
// M satisfies the recursion  psi(alpha z) M(z) = z M(z+1)  on the strip where
// both sides are finite, with M(0) = 1 and M(1) = E[1/I] = alpha p.  The
// asymptotic variance of the additive clock obeys
//   v^2 = 2 (alpha p)^{-2} ( -M'(0) + (alpha p)^{-1} M'(1) ),
// which gives an analytic route to v^2 that is independent of the cumulant
// formula v^2 = sigma^2 / (alpha p^3).

#pragma once

#include <functional>
#include <optional>

#include "clocksim/levy_family.hpp"

namespace clocksim {

class MellinFunction {
 public:
  // Closed form, available exactly when the exponential functional has a
  // closed-form law (Brownian at any alpha; the compound-Poisson families at
  // alpha = 1, with cp+ further requiring d = 1; conditioned stable at
  // alpha = alpha_s).
  static std::optional<MellinFunction> closed_form(const LevyFamily& family);

  // Monte Carlo estimate from n common draws of I: M(z) = mean of I^{-z}
  // over one stored sample, so values at different z are positively coupled.
  // Valid on [-0.5, 2.5]; draws use the truncated-MC sampler when no closed
  // form applies.
  static MellinFunction monte_carlo(const LevyFamily& family, std::uint64_t seed,
                                    int n, double dt = 1e-3);

  double operator()(double z) const;

  [[nodiscard]] const Interval& domain() const { return domain_; }
  [[nodiscard]] bool is_closed_form() const { return closed_; }

 private:
  MellinFunction() = default;
  std::function<double(double)> eval_;
  Interval domain_{0.0, 0.0};
  bool closed_ = false;
};

// Relative residual of psi(alpha z) M(z) - z M(z+1), normalized by the larger
// side's magnitude. Requires z, z+1 in M's domain and alpha z in psi's.
double mellin_recursion_residual(const MellinFunction& M, const LevyFamily& family,
                                 double z);

// v^2 from M' at 0 and 1 by Richardson-extrapolated central differences.
// check_rel_tol guards the extrapolation: if the extrapolated derivative and
// the finer central difference disagree by more than this (relatively),
// throws PrecisionError. Pass a large value for noisy (Monte Carlo) M.
double v2_via_mellin(const MellinFunction& M, double alpha, double p,
                     double step = 1e-4, double check_rel_tol = 1e-4);

}  // namespace clocksim
