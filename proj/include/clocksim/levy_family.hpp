// Catalog of Levy processes driving the positive self-similar Markov processes
// under study, described through their Laplace exponent psi:
//
//   E exp(m xi_t) = exp(t psi(m))  for m strictly inside dom(psi).
//
// Everything downstream is derived from psi: the mean rate p = psi'(0) > 0, the
// variance rate sigma2 = psi''(0), and the limit variance v2 = sigma2/(alpha p^3)
// of the rescaled additive clock. Closed-form cumulants are always cross-checked
// against Richardson-extrapolated finite differences of psi; a disagreement is a
// catalog bug and raises InconsistencyError.
//
// Some published values for these families disagree with psi''(0) (typically by
// a factor of 2 from the expansion psi(m) = pm + sigma2 m^2/2 + ...). Those are
// retained as "quoted" values purely so reports can show the discrepancy; they
// are never used in computations.

#pragma once

#include <optional>
#include <string>
#include <variant>

namespace clocksim {

// xi_t = 2 B_t + 2 nu t  (log of a squared Bessel process of dimension 2+2nu).
// psi(m) = 2 m (m + nu), dom = (-inf, inf).
struct BrownianDrift {
  double nu;
};

// xi_t = d t + compound Poisson(rate a, Exp(b) positive jumps).
// psi(m) = m (d + a/(b - m)), dom = (-inf, b).
struct CpPosDrift {
  double d;
  double a;
  double b;
};

// xi_t = -t + compound Poisson(rate a, Exp(b) positive jumps), with b < a so
// that p > 0. psi(m) = m (-1 + a/(b - m)), dom = (-inf, b).
struct CpNegDrift {
  double a;
  double b;
};

// xi_t = t - compound Poisson(rate a, Exp(b) jumps), with b > a.
// psi(m) = m (1 - a/(b + m)), dom = (-b, inf).
struct SawTooth {
  double a;
  double b;
};

// Levy process of a strictly stable process of index alpha_s in (1,2)
// conditioned to stay positive. psi(m) = Gamma(m + alpha_s)/Gamma(m),
// dom = (-alpha_s, inf). Exponent-level only (no path sampler).
struct ConditionedStable {
  double alpha_s;
};

// Radial part of a d-dimensional isotropic stable process (hypergeometric
// stable class). psi(m) = -2^alpha Gamma((alpha-m)/2)/Gamma(-m/2) *
// Gamma((m+d)/2)/Gamma((m+d-alpha)/2), dom = (-d, alpha). Exponent-level only.
struct HypergeometricStable {
  double alpha_h;
  double dim;
};

// Continuous-state branching process with immigration, self-similar of index
// kappa. psi(m) = c (kappa - (kappa+1) delta - m) Gamma(kappa - m)/Gamma(-m),
// dom = (-inf, kappa). Requires kappa in (0,1), delta > kappa/(kappa+1), c > 0.
// Exponent-level only.
struct Cbi {
  double kappa;
  double delta;
  double c;
};

using FamilyKind = std::variant<BrownianDrift, CpPosDrift, CpNegDrift, SawTooth,
                                ConditionedStable, HypergeometricStable, Cbi>;

// Open interval; endpoints may be +-infinity.
struct Interval {
  double lo;
  double hi;
  [[nodiscard]] bool contains(double x) const { return x > lo && x < hi; }
};

struct Cumulants {
  double p;       // psi'(0)
  double sigma2;  // psi''(0)
  double v2;      // sigma2 / (alpha p^3)
};

// Values quoted elsewhere for cross-reference; present only where they differ
// from the psi-derived cumulants.
struct QuotedCumulants {
  std::optional<double> sigma2;
  std::optional<double> v2;
};

// A Levy exponent together with the self-similarity index alpha of the
// associated positive self-similar Markov process.
struct LevyFamily {
  FamilyKind kind;
  double alpha;

  [[nodiscard]] const char* name() const;
};

// Validates parameters and resolves the default index when alpha is not given
// (1 for the Brownian/compound-Poisson families, the stable index for the two
// stable families, kappa for the branching family). Throws std::invalid_argument
// on bad parameters, including a CBI index override different from kappa.
LevyFamily make_family(const FamilyKind& kind,
                       std::optional<double> alpha = std::nullopt);

// Grammar: name(key=value,...) with optional suffix @alpha=value, e.g.
//   bessel(nu=1)  cp+(d=1,a=2,b=3)  cp-(a=3,b=1)  saw(a=1,b=2)
//   condstable(alpha=1.5)  hgstable(alpha=2.5,dim=4)  cbi(kappa=0.5,delta=0.9,c=1)
// Unknown or missing keys are errors (std::invalid_argument).
LevyFamily parse_family(const std::string& text);

// Canonical text form; parse_family(format_family(f)) reproduces f.
std::string format_family(const LevyFamily& family);

// Laplace exponent at m. Throws DomainError unless m is strictly inside
// psi_domain(family). psi(0) == 0 exactly.
double psi_eval(const LevyFamily& family, double m);

// Analytic continuation of psi(m)/m (removable singularity at 0); equals p at 0.
double psi_over_m(const LevyFamily& family, double m);

Interval psi_domain(const LevyFamily& family);

// Closed-form cumulants only (no cross-check).
Cumulants cumulants_closed(const LevyFamily& family);

// Closed-form cumulants cross-checked against Richardson finite differences of
// psi (base step 1e-3 scaled to the distance to the domain boundary, two
// Richardson levels). Relative disagreement beyond `tol` raises
// InconsistencyError.
Cumulants cumulants(const LevyFamily& family, double tol = 1e-6);

// Finite-difference side only (exposed for tests and reports).
struct FdCumulants {
  double p;
  double sigma2;
  double p_err_est;       // Richardson level disagreement
  double sigma2_err_est;
};
FdCumulants cumulants_fd(const LevyFamily& family);

QuotedCumulants quoted_cumulants(const LevyFamily& family);

// True for families with an exact path-level simulator (Brownian and the three
// compound-Poisson families).
bool path_simulable(const LevyFamily& family);

}  // namespace clocksim
