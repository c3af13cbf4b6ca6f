#include "clocksim/ergodicity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "clocksim/errors.hpp"
#include "clocksim/special_functions.hpp"

namespace clocksim {

using special::gamma_fn;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr int kGridPoints = 512;
constexpr double kBisectTol = 1e-6;

// Strict-interior margin so witnesses stay evaluable.
double interior_margin(double bound) {
  return 1e-9 * std::max(1.0, std::fabs(bound));
}

bool strictly_inside(const Interval& dom, double m) {
  const bool above = std::isinf(dom.lo) || m > dom.lo + interior_margin(dom.lo);
  const bool below = std::isinf(dom.hi) || m < dom.hi - interior_margin(dom.hi);
  return above && below;
}

struct SignSearch {
  bool found = false;
  double witness = 0.0;
};

// Looks for psi of the wanted sign on the open interval (lo, hi) intersected
// with the strict interior of dom psi. Grid offsets are log-spaced from lo so
// thin admissible slivers hugging lo are still seen; a maximal run of
// same-sign grid points is refined by bisection at both edges and the witness
// is its midpoint.
SignSearch search_sign(const LevyFamily& family, double lo, double hi,
                       int want_sign) {
  const Interval dom = psi_domain(family);
  double hi_eff = std::min(hi, dom.hi);
  if (!std::isinf(hi_eff)) hi_eff -= interior_margin(hi_eff);
  if (std::isinf(hi_eff)) hi_eff = lo + 1000.0;
  if (!(hi_eff > lo)) return {};

  auto sign_at = [&](double m) {
    const double v = psi_eval(family, m);
    return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
  };

  const double span = hi_eff - lo;
  std::vector<double> grid(kGridPoints);
  const double log_gmin = std::log(1e-6);
  for (int k = 0; k < kGridPoints; ++k) {
    const double g =
        std::exp(log_gmin + (static_cast<double>(k) / (kGridPoints - 1)) * (-log_gmin));
    grid[static_cast<std::size_t>(k)] = lo + g * span;
  }

  int first = -1;
  for (int k = 0; k < kGridPoints; ++k) {
    const double m = grid[static_cast<std::size_t>(k)];
    if (!strictly_inside(dom, m)) continue;
    if (sign_at(m) == want_sign) {
      first = k;
      break;
    }
  }
  if (first < 0) return {};

  int last = first;
  while (last + 1 < kGridPoints &&
         strictly_inside(dom, grid[static_cast<std::size_t>(last + 1)]) &&
         sign_at(grid[static_cast<std::size_t>(last + 1)]) == want_sign) {
    ++last;
  }

  auto bisect_edge = [&](double inside, double outside) {
    // Shrinks toward the boundary of the wanted-sign region; returns the
    // inside-side endpoint after refinement to kBisectTol.
    while (std::fabs(inside - outside) > kBisectTol) {
      const double mid = 0.5 * (inside + outside);
      if (strictly_inside(dom, mid) && sign_at(mid) == want_sign) {
        inside = mid;
      } else {
        outside = mid;
      }
    }
    return inside;
  };

  double left = grid[static_cast<std::size_t>(first)];
  if (first > 0) left = bisect_edge(left, grid[static_cast<std::size_t>(first - 1)]);
  double right = grid[static_cast<std::size_t>(last)];
  if (last + 1 < kGridPoints) {
    right = bisect_edge(right, grid[static_cast<std::size_t>(last + 1)]);
  }

  SignSearch out;
  out.found = true;
  out.witness = 0.5 * (left + right);
  if (!strictly_inside(dom, out.witness) || sign_at(out.witness) != want_sign) {
    out.witness = grid[static_cast<std::size_t>(first)];  // already verified
  }
  return out;
}

double default_drift_rate(double alpha, double m) {
  return 0.5 * std::min(m, m / alpha);
}

// Adaptive Simpson with an absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

double generator_U_power(const LevyFamily& family, double m, double x) {
  if (!(x > 0.0)) throw DomainError("generator_U_power: x must be positive");
  if (m == 0.0) return 0.0;
  const double alpha = family.alpha;
  return psi_eval(family, m) * std::pow(x, m - alpha) -
         (m / alpha) * std::pow(x, m);
}

double generator_U_log(const LevyFamily& family, double x) {
  if (!(x > 0.0)) throw DomainError("generator_U_log: x must be positive");
  const double alpha = family.alpha;
  return cumulants_closed(family).p * std::pow(x, -alpha) - 1.0 / alpha;
}

ErgodicityVerdict quenched_criterion(const LevyFamily& family) {
  const double alpha = family.alpha;
  const Interval dom = psi_domain(family);
  ErgodicityVerdict verdict;

  // (2b): psi(m) > 0 for some m > alpha strictly inside dom psi.
  {
    const double preferred = alpha + 1.0;
    bool found = false;
    double witness = 0.0;
    if (strictly_inside(dom, preferred) && psi_eval(family, preferred) > 0.0) {
      found = true;
      witness = preferred;
    } else {
      const SignSearch s = search_sign(family, alpha, dom.hi, +1);
      found = s.found;
      witness = s.witness;
    }
    if (found && witness > alpha && strictly_inside(dom, witness) &&
        psi_eval(family, witness) > 0.0) {
      verdict.classification = ErgodicityClass::kExpErgodicVia2b;
      verdict.witness_m = witness;
      verdict.lyapunov =
          lyapunov_constants(family, witness, default_drift_rate(alpha, witness));
      return verdict;
    }
  }

  // (2a): psi(m) < 0 for some m > 0 strictly inside dom psi.
  {
    const SignSearch s = search_sign(family, 0.0, dom.hi, -1);
    if (s.found && s.witness > 0.0 && strictly_inside(dom, s.witness) &&
        psi_eval(family, s.witness) < 0.0) {
      verdict.classification = ErgodicityClass::kExpErgodicVia2a;
      verdict.witness_m = s.witness;
      verdict.lyapunov = lyapunov_constants(
          family, s.witness, default_drift_rate(alpha, s.witness));
      return verdict;
    }
  }

  verdict.classification = ErgodicityClass::kCriterionFails;
  return verdict;
}

LyapunovConstants lyapunov_constants(const LevyFamily& family, double m, double C) {
  const double alpha = family.alpha;
  const double psi_m = psi_eval(family, m);
  if (!(C > 0.0 && C < alpha * m)) {
    throw DomainError("lyapunov_constants: need C in (0, alpha*m)");
  }
  LyapunovConstants out;
  out.m = m;
  out.C = C;

  const bool case_2b = psi_m > 0.0;
  if (case_2b) {
    if (!(m > alpha)) {
      throw DomainError("lyapunov_constants: psi(m) > 0 requires witness m > alpha");
    }
    if (!(m - alpha * C > 0.0)) {
      throw DomainError("lyapunov_constants: need C < m/alpha for a real x_max");
    }
    out.x_max = std::pow((m - alpha) * psi_m / (m * (m - alpha * C)), 1.0 / alpha);
    out.x0 = std::pow(psi_m / (m - alpha * C), 1.0 / alpha);
    out.K = psi_m / (m - C);
    const double hx = psi_m * std::pow(out.x_max, m - alpha) +
                      (C - alpha * m) * std::pow(out.x_max, m);
    out.D = hx;
  } else {
    out.x_max = kNan;
    out.x0 = kNan;
    out.K = 0.0;
    out.D = 0.0;
  }

  // Sweep: h_m(x) = psi(m) x^{m-alpha} + (C - alpha m) x^m must stay <= D on
  // [0, K] and <= 0 beyond, up to roundoff slack scaled by the term sizes.
  const int n_sweep = 601;
  for (int i = 0; i < n_sweep; ++i) {
    const double lx = -3.0 + 6.0 * static_cast<double>(i) / (n_sweep - 1);
    const double x = std::pow(10.0, lx);
    const double t1 = psi_m * std::pow(x, m - alpha);
    const double t2 = (C - alpha * m) * std::pow(x, m);
    const double h = t1 + t2;
    const double slack = 1e-12 * (std::fabs(t1) + std::fabs(t2)) + 1e-300;
    const double bound = (x <= out.K) ? out.D : 0.0;
    if (h > bound + slack) {
      out.violations.emplace_back(x, h);
    }
  }
  return out;
}

double cbi_log_moment(double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw DomainError("cbi_log_moment: kappa must lie in (0,1)");
  }
  // Substituting u = log z turns the integral into
  // integral_0^inf u exp(-(kappa+1)u) du = 1/(kappa+1)^2.
  const double rate = kappa + 1.0;
  const double u_max = 60.0 / rate;
  const std::function<double(double)> f = [rate](double u) {
    return u * std::exp(-rate * u);
  };
  const double quad = integrate(f, 0.0, u_max, 1e-12);
  const double prefactor = rate / gamma_fn(1.0 - kappa);
  const double value = prefactor * quad;
  const double closed = 1.0 / (gamma_fn(1.0 - kappa) * rate);
  if (std::fabs(value - closed) > 1e-8 * std::max(1.0, std::fabs(closed))) {
    throw InconsistencyError("cbi_log_moment: quadrature disagrees with closed form");
  }
  return value;
}

}  // namespace clocksim
