#include "clocksim/mellin.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "clocksim/errors.hpp"
#include "clocksim/exp_functional.hpp"
#include "clocksim/rng.hpp"
#include "clocksim/special_functions.hpp"

namespace clocksim {

using special::log_gamma;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double central_diff(const std::function<double(double)>& f, double z, double h) {
  return (f(z + h) - f(z - h)) / (2.0 * h);
}

}  // namespace

std::optional<MellinFunction> MellinFunction::closed_form(const LevyFamily& family) {
  MellinFunction M;
  M.closed_ = true;
  const double alpha = family.alpha;
  if (const auto* f = std::get_if<BrownianDrift>(&family.kind)) {
    const double u = f->nu / alpha;
    const double log_scale = std::log(2.0 * alpha * alpha);
    M.domain_ = {-u, kInf};
    M.eval_ = [u, log_scale](double z) {
      return std::exp(z * log_scale + log_gamma(u + z) - log_gamma(u));
    };
    return M;
  }
  if (const auto* f = std::get_if<CpPosDrift>(&family.kind)) {
    if (alpha != 1.0 || f->d != 1.0) return std::nullopt;
    const double b = f->b, a = f->a;
    M.domain_ = {-kInf, 1.0 + b};
    M.eval_ = [a, b](double z) {
      return std::exp(log_gamma(1.0 + b - z) - log_gamma(1.0 + b) +
                      log_gamma(1.0 + b + a) - log_gamma(1.0 + b + a - z));
    };
    return M;
  }
  if (const auto* f = std::get_if<CpNegDrift>(&family.kind)) {
    if (alpha != 1.0) return std::nullopt;
    const double b = f->b, a = f->a;
    M.domain_ = {-(a - b), 1.0 + b};
    M.eval_ = [a, b](double z) {
      return std::exp(log_gamma(1.0 + b - z) - log_gamma(1.0 + b) +
                      log_gamma(a - b + z) - log_gamma(a - b));
    };
    return M;
  }
  if (const auto* f = std::get_if<SawTooth>(&family.kind)) {
    if (alpha != 1.0) return std::nullopt;
    const double b = f->b, u = f->b - f->a;
    M.domain_ = {-u, kInf};
    M.eval_ = [b, u](double z) {
      return std::exp(log_gamma(u + z) - log_gamma(u) + log_gamma(b) -
                      log_gamma(b + z));
    };
    return M;
  }
  if (const auto* f = std::get_if<ConditionedStable>(&family.kind)) {
    if (alpha != f->alpha_s) return std::nullopt;
    const double s = f->alpha_s;
    M.domain_ = {-1.0 / s, kInf};
    M.eval_ = [s](double z) {
      return std::exp(log_gamma(s * z + 1.0) - log_gamma(z + 1.0));
    };
    return M;
  }
  return std::nullopt;
}

MellinFunction MellinFunction::monte_carlo(const LevyFamily& family,
                                           std::uint64_t seed, int n, double dt) {
  const IInfLaw law = i_inf_sampler(family, dt);
  RngStream rng(seed);
  auto log_samples = std::make_shared<std::vector<double>>();
  log_samples->reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    log_samples->push_back(std::log(sample_i_inf(law, rng)));
  }
  MellinFunction M;
  M.closed_ = false;
  M.domain_ = {-0.5, 2.5};
  M.eval_ = [log_samples](double z) {
    double acc = 0.0;
    for (double lx : *log_samples) acc += std::exp(-z * lx);
    return acc / static_cast<double>(log_samples->size());
  };
  return M;
}

double MellinFunction::operator()(double z) const {
  if (!(z > domain_.lo && z < domain_.hi) && z != 0.0) {
    throw DomainError("Mellin transform evaluated outside its strip");
  }
  return z == 0.0 ? 1.0 : eval_(z);
}

double mellin_recursion_residual(const MellinFunction& M, const LevyFamily& family,
                                 double z) {
  const double lhs = psi_eval(family, family.alpha * z) * M(z);
  const double rhs = z * M(z + 1.0);
  const double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
  return std::fabs(lhs - rhs) / scale;
}

double v2_via_mellin(const MellinFunction& M, double alpha, double p, double step,
                     double check_rel_tol) {
  auto f = [&M](double z) { return M(z); };
  auto deriv = [&](double z) {
    const double coarse = central_diff(f, z, step);
    const double fine = central_diff(f, z, step / 2.0);
    const double extrap = (4.0 * fine - coarse) / 3.0;
    const double err = std::fabs(extrap - fine);
    if (err > check_rel_tol * std::max(1.0, std::fabs(extrap))) {
      throw PrecisionError("Mellin derivative: Richardson levels disagree");
    }
    return extrap;
  };
  const double ap = alpha * p;
  return 2.0 / (ap * ap) * (-deriv(0.0) + deriv(1.0) / ap);
}

}  // namespace clocksim
