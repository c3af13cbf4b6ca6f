// The exponential functional I = integral_0^inf exp(-alpha xi_s) ds and the
// laws built from it.
//
// Key identities (all testable): E[1/I] = alpha p; the invariant law of the
// Ornstein-Uhlenbeck transform of the self-similar process is the law of
// I^{-1/alpha} size-biased by I^{-1}, which is also the time-1 marginal of the
// process entering from 0+.
//
// Closed forms carried by the catalog:
//   Brownian(nu), any alpha:  1/I =(d) 2 alpha^2 Gamma(nu/alpha)
//   cp+(d=1,a,b), alpha=1:    I  =(d) Beta(1+b, a)
//   cp-(a,b),     alpha=1:    I  =(d) BetaPrime(1+b, a-b)
//   saw(a,b),     alpha=1:    1/I =(d) Beta(b-a, a)
//   condstable(s), alpha=s:   I  =(d) one-sided stable, index 1/s, E e^{-l I}=e^{-l^{1/s}}
// The compound-Poisson laws satisfy the Mellin recursion only at alpha = 1, so
// they are gated there; other parameters fall back to a truncated Monte Carlo
// integral over a lazily extended path.

#pragma once

#include <optional>
#include <vector>

#include "clocksim/levy_family.hpp"
#include "clocksim/path.hpp"
#include "clocksim/rng.hpp"

namespace clocksim {

enum class IInfLawKind {
  kGammaReciprocal,   // 1/I ~ scale * Gamma(shape)
  kBetaScaled,        // I ~ scale * Beta(u, v)
  kBetaPrime,         // I ~ BetaPrime(u, v)
  kBetaReciprocal,    // 1/I ~ Beta(u, v)
  kPositiveStable,    // I ~ one-sided stable(index), E e^{-l I} = e^{-l^index}
  kMcTruncated,       // simulate xi, integrate exp(-alpha xi) to a tail cutoff
};

struct IInfLaw {
  IInfLawKind kind;
  double u = 0.0;      // shape / first Beta parameter / stable index
  double v = 0.0;      // second Beta parameter
  double scale = 1.0;
  LevyFamily family{BrownianDrift{1.0}, 1.0};  // used by kMcTruncated
  double dt = 1e-3;                            // Brownian grid step for kMcTruncated
  double tail_rel_tol = 1e-6;

  [[nodiscard]] bool closed_form() const { return kind != IInfLawKind::kMcTruncated; }
};

// The closed-form law when the catalog provides one and its preconditions
// hold; otherwise a truncated-MC law for path-simulable families. Throws
// DomainError for exponent-only families without a closed form at this alpha.
IInfLaw i_inf_sampler(const LevyFamily& family, double dt = 1e-3);

// Closed-form law only (nullopt when the gate fails).
std::optional<IInfLaw> i_inf_closed_form(const LevyFamily& family);

double sample_i_inf(const IInfLaw& law, RngStream& rng);

// One truncated-MC draw: extends the path chunk-by-chunk until the current
// upper bound on the remaining tail, exp(-alpha xi(H)) / (alpha p) * 2, drops
// below tail_rel_tol of the accumulated integral.
double sample_i_inf_mc(const LevyFamily& family, RngStream& rng, double dt = 1e-3,
                       double tail_rel_tol = 1e-6);

// Draw of the time-1 marginal of the process entering from 0+ (equivalently
// the invariant law of the OU transform): I^{-1/alpha} size-biased by I^{-1}.
// Brownian uses the exact closed form (Gamma shape shifts by 1 under the size
// bias); other families use self-normalized importance resampling over a pool
// of plain I draws, with an effective-sample-size floor.
class EntranceSampler {
 public:
  // pool_seed feeds the resampling pool so draws stay deterministic regardless
  // of which replica asks first.
  EntranceSampler(const LevyFamily& family, std::uint64_t pool_seed,
                  int pool_size = 65536, double ess_floor_fraction = 0.1,
                  double dt = 1e-3);

  // Thread-safe: reads only the immutable pool; all randomness comes from rng.
  double sample(RngStream& rng) const;

  [[nodiscard]] bool uses_closed_form() const { return closed_form_.has_value(); }
  [[nodiscard]] double effective_sample_size() const { return ess_; }

 private:
  LevyFamily family_;
  // Closed-form path: X1 = (scale * Gamma(shape+1))^{1/alpha}.
  struct GammaEntrance {
    double shape;
    double scale;
    double inv_alpha;
  };
  std::optional<GammaEntrance> closed_form_;
  std::vector<double> pool_;     // values x1 = I^{-1/alpha}
  std::vector<double> cum_w_;    // cumulative normalized weights (I^{-1})
  double ess_ = 0.0;
};

// Convenience single draw (builds a pool per call for non-Brownian families;
// prefer holding an EntranceSampler in hot loops).
double sample_entrance_x1(const LevyFamily& family, RngStream& rng);

}  // namespace clocksim
