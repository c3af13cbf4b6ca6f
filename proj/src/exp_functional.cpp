#include "clocksim/exp_functional.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "clocksim/clock.hpp"
#include "clocksim/errors.hpp"

namespace clocksim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

std::optional<IInfLaw> i_inf_closed_form(const LevyFamily& family) {
  IInfLaw law;
  law.family = family;
  if (const auto* f = std::get_if<BrownianDrift>(&family.kind)) {
    // Valid at every alpha (Dufresne time change): 1/I ~ 2 alpha^2 Gamma(nu/alpha).
    law.kind = IInfLawKind::kGammaReciprocal;
    law.u = f->nu / family.alpha;
    law.scale = 2.0 * family.alpha * family.alpha;
    return law;
  }
  if (const auto* f = std::get_if<CpPosDrift>(&family.kind)) {
    if (family.alpha == 1.0 && f->d == 1.0) {
      law.kind = IInfLawKind::kBetaScaled;
      law.u = 1.0 + f->b;
      law.v = f->a;
      law.scale = 1.0;
      return law;
    }
    return std::nullopt;
  }
  if (const auto* f = std::get_if<CpNegDrift>(&family.kind)) {
    if (family.alpha == 1.0) {
      law.kind = IInfLawKind::kBetaPrime;
      law.u = 1.0 + f->b;
      law.v = f->a - f->b;
      return law;
    }
    return std::nullopt;
  }
  if (const auto* f = std::get_if<SawTooth>(&family.kind)) {
    if (family.alpha == 1.0) {
      law.kind = IInfLawKind::kBetaReciprocal;
      law.u = f->b - f->a;
      law.v = f->a;
      return law;
    }
    return std::nullopt;
  }
  if (const auto* f = std::get_if<ConditionedStable>(&family.kind)) {
    if (family.alpha == f->alpha_s) {
      law.kind = IInfLawKind::kPositiveStable;
      law.u = 1.0 / f->alpha_s;
      return law;
    }
    return std::nullopt;
  }
  return std::nullopt;
}

IInfLaw i_inf_sampler(const LevyFamily& family, double dt) {
  if (auto law = i_inf_closed_form(family)) return *law;
  if (path_simulable(family)) {
    IInfLaw law;
    law.kind = IInfLawKind::kMcTruncated;
    law.family = family;
    law.dt = dt;
    return law;
  }
  throw DomainError(std::string("no exponential-functional sampler for ") +
                    format_family(family) + " at this index");
}

double sample_i_inf(const IInfLaw& law, RngStream& rng) {
  switch (law.kind) {
    case IInfLawKind::kGammaReciprocal:
      return 1.0 / (law.scale * rng.gamma(law.u));
    case IInfLawKind::kBetaScaled:
      return law.scale * rng.beta(law.u, law.v);
    case IInfLawKind::kBetaPrime:
      return rng.beta_prime(law.u, law.v);
    case IInfLawKind::kBetaReciprocal:
      return 1.0 / rng.beta(law.u, law.v);
    case IInfLawKind::kPositiveStable:
      return rng.positive_stable(law.u);
    case IInfLawKind::kMcTruncated:
      return sample_i_inf_mc(law.family, rng, law.dt, law.tail_rel_tol);
  }
  throw std::logic_error("unreachable");
}

double sample_i_inf_mc(const LevyFamily& family, RngStream& rng, double dt,
                       double tail_rel_tol) {
  if (!path_simulable(family)) {
    throw DomainError("sample_i_inf_mc: family has no path simulator");
  }
  const double alpha = family.alpha;
  const double p = cumulants_closed(family).p;
  const PathExtender extend = make_extender(family, dt);
  PiecewiseLinearPath path;
  double log_mass = kNegInf;
  std::size_t consumed = 0;
  // One Levy-time unit per chunk; tail bound checked between chunks. The bound
  // E[remaining tail | xi(H)] = exp(-alpha xi(H)) / (alpha p) holds in the mean
  // from the stationarity of increments; the factor 2 is slack.
  const int max_chunks = 4096;
  for (int chunk = 0; chunk < max_chunks; ++chunk) {
    extend(path, 1.0, rng);
    for (; consumed < path.segment_count(); ++consumed) {
      log_mass = log_add_exp(
          log_mass, log_segment_mass(-alpha, path.seg_start_value(consumed),
                                     path.seg_slope(consumed),
                                     path.seg_length(consumed)));
    }
    const double log_tail_bound =
        -alpha * path.end_value() + std::log(2.0 / (alpha * p));
    if (log_mass != kNegInf &&
        log_tail_bound < log_mass + std::log(tail_rel_tol)) {
      return std::exp(log_mass);
    }
  }
  throw ExtensionLimitError("sample_i_inf_mc: tail cutoff not reached");
}

EntranceSampler::EntranceSampler(const LevyFamily& family, std::uint64_t pool_seed,
                                 int pool_size, double ess_floor_fraction, double dt)
    : family_(family) {
  if (const auto* f = std::get_if<BrownianDrift>(&family.kind)) {
    // Size-biasing 1/I ~ scale*Gamma(shape) by its value shifts the shape by 1.
    closed_form_ = GammaEntrance{f->nu / family.alpha + 1.0,
                                 2.0 * family.alpha * family.alpha,
                                 1.0 / family.alpha};
    ess_ = static_cast<double>(pool_size);
    return;
  }
  const IInfLaw law = i_inf_sampler(family, dt);
  RngStream pool_rng(pool_seed);
  pool_.resize(static_cast<std::size_t>(pool_size));
  std::vector<double> w(pool_.size());
  const double inv_alpha = 1.0 / family.alpha;
  for (std::size_t i = 0; i < pool_.size(); ++i) {
    const double I = sample_i_inf(law, pool_rng);
    pool_[i] = std::pow(I, -inv_alpha);
    w[i] = 1.0 / I;
  }
  double sum = 0.0, sum2 = 0.0;
  for (double wi : w) {
    sum += wi;
    sum2 += wi * wi;
  }
  ess_ = sum * sum / sum2;
  if (ess_ < ess_floor_fraction * static_cast<double>(pool_.size())) {
    std::ostringstream msg;
    msg << "entrance sampler for " << format_family(family)
        << ": effective sample size " << ess_ << " below floor "
        << ess_floor_fraction * static_cast<double>(pool_.size()) << " (weights 1/I too heavy-tailed)";
    throw ResamplingError(msg.str());
  }
  cum_w_.resize(w.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i] / sum;
    cum_w_[i] = acc;
  }
  cum_w_.back() = 1.0;
}

double EntranceSampler::sample(RngStream& rng) const {
  if (closed_form_) {
    return std::pow(closed_form_->scale * rng.gamma(closed_form_->shape),
                    closed_form_->inv_alpha);
  }
  const double u = rng.u01();
  const auto it = std::lower_bound(cum_w_.begin(), cum_w_.end(), u);
  return pool_[static_cast<std::size_t>(it - cum_w_.begin())];
}

double sample_entrance_x1(const LevyFamily& family, RngStream& rng) {
  if (std::holds_alternative<BrownianDrift>(family.kind)) {
    EntranceSampler sampler(family, 0);
    return sampler.sample(rng);
  }
  // Deterministic pool derived from the caller's stream.
  EntranceSampler sampler(family, rng.raw(), 16384);
  return sampler.sample(rng);
}

}  // namespace clocksim
