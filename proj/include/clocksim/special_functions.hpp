// Gamma-family special functions used throughout the Levy-exponent catalog.
//
// Accuracy contract: absolute error <= 1e-12 for x > 0 (tested against
// high-precision reference values). log_gamma uses a Lanczos approximation;
// digamma uses the ascending recurrence plus the asymptotic series.

#pragma once

namespace clocksim::special {

// log |Gamma(x)| together with the sign of Gamma(x); defined for any
// non-pole real x (x not in {0, -1, -2, ...}).
struct SignedLogGamma {
  double log_abs;
  int sign;  // +1 or -1
};

// log Gamma(x) for x > 0. Throws DomainError for x <= 0.
double log_gamma(double x);

// Gamma(x) for x > 0 (exp of log_gamma; overflows to +inf for large x).
double gamma_fn(double x);

// digamma(x) = d/dx log Gamma(x) for x > 0. Throws DomainError for x <= 0.
double digamma(double x);

// Signed log-gamma for negative non-integer (and positive) arguments via the
// reflection formula. Throws DomainError at poles.
SignedLogGamma log_gamma_signed(double x);

// Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

}  // namespace clocksim::special
