#include <cmath>
#include <vector>

#include "doctest.h"

#include "clocksim/clock.hpp"
#include "clocksim/errors.hpp"
#include "clocksim/exp_functional.hpp"
#include "clocksim/levy_family.hpp"
#include "clocksim/path.hpp"
#include "clocksim/rng.hpp"
#include "clocksim/special_functions.hpp"
#include "clocksim/stats.hpp"

using namespace clocksim;

namespace {

struct MeanSe {
  double mean;
  double se;
};

MeanSe mc_mean(const std::vector<double>& x) {
  return {sample_mean(x), std::sqrt(sample_variance(x) / x.size())};
}

std::vector<double> draw_i_inf(const LevyFamily& fam, unsigned long long seed, int n,
                               double dt = 1e-3) {
  const IInfLaw law = i_inf_sampler(fam, dt);
  RngStream rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = sample_i_inf(law, rng);
  return out;
}

}  // namespace

TEST_CASE("closed-form perpetuity gates are exactly as catalogued") {
  CHECK(i_inf_closed_form(make_family(BrownianDrift{1.0}))->kind ==
        IInfLawKind::kGammaReciprocal);
  CHECK(i_inf_closed_form(make_family(BrownianDrift{1.0}, 2.0))->kind ==
        IInfLawKind::kGammaReciprocal);
  CHECK(i_inf_closed_form(make_family(CpPosDrift{1.0, 2.0, 3.0}))->kind ==
        IInfLawKind::kBetaScaled);
  CHECK(i_inf_closed_form(make_family(CpNegDrift{3.0, 1.0}))->kind ==
        IInfLawKind::kBetaPrime);
  CHECK(i_inf_closed_form(make_family(SawTooth{1.0, 2.0}))->kind ==
        IInfLawKind::kBetaReciprocal);
  CHECK(i_inf_closed_form(make_family(ConditionedStable{1.5}))->kind ==
        IInfLawKind::kPositiveStable);

  // Gates close away from their preconditions.
  CHECK_FALSE(i_inf_closed_form(make_family(CpPosDrift{1.0, 2.0, 3.0}, 2.0)).has_value());
  CHECK_FALSE(i_inf_closed_form(make_family(CpPosDrift{2.0, 2.0, 3.0})).has_value());
  CHECK_FALSE(i_inf_closed_form(make_family(CpNegDrift{3.0, 1.0}, 0.5)).has_value());
  CHECK_FALSE(i_inf_closed_form(make_family(SawTooth{1.0, 2.0}, 2.0)).has_value());

  // Fallback for path-simulable families; hard error for exponent-only ones.
  CHECK(i_inf_sampler(make_family(CpPosDrift{1.0, 2.0, 3.0}, 2.0)).kind ==
        IInfLawKind::kMcTruncated);
  CHECK_THROWS_AS((void)i_inf_sampler(make_family(HypergeometricStable{2.5, 4.0})),
                  DomainError);
  CHECK_THROWS_AS((void)i_inf_sampler(make_family(Cbi{0.5, 0.9, 1.0})), DomainError);
}

TEST_CASE("mean of 1/I reproduces alpha p for every closed-form law") {
  const char* specs[] = {"bessel(nu=1)", "bessel(nu=1)@alpha=2",
                         "cp+(d=1,a=2,b=3)", "cp-(a=3,b=1)", "saw(a=1,b=2)",
                         "condstable(alpha=1.5)"};
  int stream = 100;
  for (const char* spec : specs) {
    CAPTURE(spec);
    const auto fam = parse_family(spec);
    const double target = fam.alpha * cumulants_closed(fam).p;
    const auto draws = draw_i_inf(fam, substream_seed(4242, stream++), 20000);
    std::vector<double> inv(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) inv[i] = 1.0 / draws[i];
    const auto [mean, se] = mc_mean(inv);
    CHECK(std::fabs(mean - target) <= 3.5 * se);
  }
}

TEST_CASE("truncated-MC perpetuity matches alpha p off the closed-form gates") {
  // cp+ at alpha=2 has no closed form; only the path route covers it.
  const auto fam = make_family(CpPosDrift{1.0, 2.0, 3.0}, 2.0);
  const double target = 2.0 * (5.0 / 3.0);
  RngStream rng(substream_seed(515, 0));
  const int n = 4000;
  std::vector<double> inv(n);
  for (auto& v : inv) v = 1.0 / sample_i_inf_mc(fam, rng);
  const auto [mean, se] = mc_mean(inv);
  CHECK(std::fabs(mean - target) <= 4.0 * se);
}

TEST_CASE("truncated-MC perpetuity agrees in law with the closed form") {
  for (const char* spec : {"cp+(d=1,a=2,b=3)", "saw(a=1,b=2)", "bessel(nu=1)"}) {
    CAPTURE(spec);
    const auto fam = parse_family(spec);
    const int n = 1500;
    const auto closed = draw_i_inf(fam, substream_seed(616, 1), n);
    RngStream rng(substream_seed(616, 2));
    std::vector<double> mc(n);
    for (auto& v : mc) v = sample_i_inf_mc(fam, rng);
    const auto ks = ks_test_two_sample(closed, mc);
    CHECK(ks.p_value > 0.01);
  }
}

TEST_CASE("positive stable draws have the known fractional moment") {
  // One-sided stable with index 2/3: E[S^-q] = Gamma(1 + q/beta)/Gamma(1 + q).
  RngStream rng(substream_seed(808, 3));
  const int n = 20000;
  std::vector<double> vals(n);
  for (auto& v : vals) v = std::pow(rng.positive_stable(2.0 / 3.0), -0.7);
  const auto [mean, se] = mc_mean(vals);
  CHECK(std::fabs(mean - 1.1249569734179011) <= 3.5 * se);
}

TEST_CASE("Brownian entrance law is the exact shifted-shape gamma") {
  // nu=1, alpha=1: X1 = 2 Gamma(2), so E X1 = 4, E X1^2 = 24.
  {
    const auto fam = make_family(BrownianDrift{1.0});
    EntranceSampler entrance(fam, 0);
    CHECK(entrance.uses_closed_form());
    RngStream rng(substream_seed(909, 1));
    const int n = 20000;
    std::vector<double> x(n), x2(n);
    for (int i = 0; i < n; ++i) {
      x[i] = entrance.sample(rng);
      x2[i] = x[i] * x[i];
    }
    const auto m1 = mc_mean(x);
    CHECK(std::fabs(m1.mean - 4.0) <= 3.5 * m1.se);
    const auto m2 = mc_mean(x2);
    CHECK(std::fabs(m2.mean - 24.0) <= 3.5 * m2.se);
  }
  // nu=1, alpha=2: X1 = (8 Gamma(1.5))^{1/2}; E sqrt(X1) pinned by the
  // gamma Mellin transform.
  {
    const auto fam = make_family(BrownianDrift{1.0}, 2.0);
    EntranceSampler entrance(fam, 0);
    CHECK(entrance.uses_closed_form());
    RngStream rng(substream_seed(909, 2));
    const int n = 20000;
    std::vector<double> r(n);
    for (auto& v : r) v = std::sqrt(entrance.sample(rng));
    const auto [mean, se] = mc_mean(r);
    CHECK(std::fabs(mean - 1.7441049510573557) <= 3.5 * se);
  }
}

TEST_CASE("resampled entrance law satisfies the size-bias identity") {
  // E g(X1) = E[ g(I^{-1/alpha}) / I ] / E[ 1/I ], checked against an
  // independent importance estimate from plain perpetuity draws.
  struct GCase {
    const char* label;
    double (*g)(double);
  };
  const GCase gs[] = {
      {"g(x)=x", [](double x) { return x; }},
      {"g(x)=1/(1+x)", [](double x) { return 1.0 / (1.0 + x); }},
  };
  const auto fam = make_family(CpPosDrift{1.0, 2.0, 3.0});
  EntranceSampler entrance(fam, /*pool_seed=*/12345, /*pool_size=*/65536);
  CHECK_FALSE(entrance.uses_closed_form());
  CHECK(entrance.effective_sample_size() > 0.1 * 65536);

  RngStream rng(substream_seed(111, 7));
  const int n = 40000;
  std::vector<double> draws(n);
  for (auto& v : draws) v = entrance.sample(rng);

  const auto ref = draw_i_inf(fam, substream_seed(111, 8), 40000);
  for (const auto& gc : gs) {
    CAPTURE(gc.label);
    std::vector<double> gx(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) gx[i] = gc.g(draws[i]);
    const auto lhs = mc_mean(gx);

    double num = 0.0, den = 0.0;
    for (double I : ref) {
      num += gc.g(std::pow(I, -1.0 / fam.alpha)) / I;
      den += 1.0 / I;
    }
    const double rhs = num / den;
    // Pool resampling reuses 65536 support points, so allow a generous band.
    CHECK(std::fabs(lhs.mean - rhs) <= 6.0 * lhs.se + 0.01 * std::fabs(rhs));
  }

  // Hard oracle for the first moment: with I ~ Beta(4,2),
  // E X1 = E[I^-2]/E[I^-1] = (10/3)/(5/3) = 2.
  const auto m1 = mc_mean(draws);
  CHECK(std::fabs(m1.mean - 2.0) <= 6.0 * m1.se);
}

TEST_CASE("entrance pool enforces its effective-sample-size floor") {
  const auto fam = make_family(CpPosDrift{1.0, 2.0, 3.0});
  // ESS fraction for this family is ~0.83; a floor of 0.99 must trip.
  CHECK_THROWS_AS(EntranceSampler(fam, 1, 4096, 0.99), ResamplingError);
  CHECK_NOTHROW(EntranceSampler(fam, 1, 4096, 0.5));
}

TEST_CASE("entrance draw seeds the stationary scaled process") {
  // Start the scaled process from an entrance draw; the rescaled value at
  // every later time keeps the same law. Compare t=1 against t=3 and against
  // fresh entrance draws.
  const auto fam = make_family(BrownianDrift{1.0});
  EntranceSampler entrance(fam, 0);
  const std::vector<double> grid = {0.0, 1.0, 3.0};
  const int n = 600;
  RngStream rng(substream_seed(2222, 5));
  std::vector<double> u1, u3, fresh;
  auto extend = make_extender(fam, 1e-3);
  for (int i = 0; i < n; ++i) {
    const double x1 = entrance.sample(rng);
    PiecewiseLinearPath path;
    const auto u = ou_path_from_value_at_one(path, fam.alpha, x1, grid, extend, rng);
    u1.push_back(u[1]);
    u3.push_back(u[2]);
    fresh.push_back(entrance.sample(rng));
  }
  CHECK(ks_test_two_sample(u1, u3).p_value > 0.01);
  CHECK(ks_test_two_sample(u3, fresh).p_value > 0.01);
}
