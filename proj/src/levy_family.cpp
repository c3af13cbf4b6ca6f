#include "clocksim/levy_family.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "clocksim/errors.hpp"
#include "clocksim/special_functions.hpp"

namespace clocksim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using special::digamma;
using special::gamma_fn;
using special::kEulerGamma;
using special::log_gamma;
using special::log_gamma_signed;

// Ratio of two Gammas that may individually change sign, via signed log-gamma.
double gamma_ratio(double num, double den) {
  const auto n = log_gamma_signed(num);
  const auto d = log_gamma_signed(den);
  return n.sign * d.sign * std::exp(n.log_abs - d.log_abs);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// psi(m)/m via the pole-free form of each exponent. Every branch is finite on
// the open domain, including m = 0 where it equals p.
double psi_ratio(const FamilyKind& kind, double m) {
  return std::visit(
      Overloaded{
          [&](const BrownianDrift& f) { return 2.0 * (m + f.nu); },
          [&](const CpPosDrift& f) { return f.d + f.a / (f.b - m); },
          [&](const CpNegDrift& f) { return -1.0 + f.a / (f.b - m); },
          [&](const SawTooth& f) { return 1.0 - f.a / (f.b + m); },
          [&](const ConditionedStable& f) {
            // Gamma(m + a)/Gamma(m + 1); for m <= -1 shift once more so all
            // log-gamma arguments stay positive.
            if (m + 1.0 > 0.0) {
              return std::exp(log_gamma(m + f.alpha_s) - log_gamma(m + 1.0));
            }
            return (m + 1.0) * std::exp(log_gamma(m + f.alpha_s) - log_gamma(m + 2.0));
          },
          [&](const HypergeometricStable& f) {
            // 2^{a-1} Gamma((a-m)/2) Gamma((m+d)/2) / (Gamma(1-m/2) Gamma((m+d-a)/2)).
            const auto g1 = log_gamma_signed((f.alpha_h - m) / 2.0);
            const auto g2 = log_gamma_signed((m + f.dim) / 2.0);
            const auto g3 = log_gamma_signed(1.0 - m / 2.0);
            const auto g4 = log_gamma_signed((m + f.dim - f.alpha_h) / 2.0);
            const int sign = g1.sign * g2.sign * g3.sign * g4.sign;
            return sign * std::exp((f.alpha_h - 1.0) * std::numbers::ln2 +
                                   g1.log_abs + g2.log_abs - g3.log_abs - g4.log_abs);
          },
          [&](const Cbi& f) {
            const double shifted = (f.kappa + 1.0) * f.delta - f.kappa + m;
            return f.c * shifted *
                   std::exp(log_gamma(f.kappa - m) - log_gamma(1.0 - m));
          },
      },
      kind);
}

Interval domain_of(const FamilyKind& kind) {
  return std::visit(
      Overloaded{
          [](const BrownianDrift&) { return Interval{-kInf, kInf}; },
          [](const CpPosDrift& f) { return Interval{-kInf, f.b}; },
          [](const CpNegDrift& f) { return Interval{-kInf, f.b}; },
          [](const SawTooth& f) { return Interval{-f.b, kInf}; },
          [](const ConditionedStable& f) { return Interval{-f.alpha_s, kInf}; },
          [](const HypergeometricStable& f) { return Interval{-f.dim, f.alpha_h}; },
          [](const Cbi& f) { return Interval{-kInf, f.kappa}; },
      },
      kind);
}

void validate(const FamilyKind& kind) {
  std::visit(
      Overloaded{
          [](const BrownianDrift& f) {
            if (!(f.nu > 0.0)) throw std::invalid_argument("bessel: need nu > 0");
          },
          [](const CpPosDrift& f) {
            if (!(f.d >= 0.0) || !(f.a > 0.0) || !(f.b > 0.0)) {
              throw std::invalid_argument("cp+: need d >= 0, a > 0, b > 0");
            }
          },
          [](const CpNegDrift& f) {
            if (!(f.a > 0.0) || !(f.b > 0.0) || !(f.b < f.a)) {
              throw std::invalid_argument("cp-: need a > 0, 0 < b < a (mean rate > 0)");
            }
          },
          [](const SawTooth& f) {
            if (!(f.a > 0.0) || !(f.b > f.a)) {
              throw std::invalid_argument("saw: need 0 < a < b (mean rate > 0)");
            }
          },
          [](const ConditionedStable& f) {
            if (!(f.alpha_s > 1.0) || !(f.alpha_s < 2.0)) {
              throw std::invalid_argument("condstable: need alpha in (1,2)");
            }
          },
          [](const HypergeometricStable& f) {
            if (!(f.alpha_h > 0.0) || !(f.dim > f.alpha_h)) {
              throw std::invalid_argument("hgstable: need 0 < alpha < dim");
            }
          },
          [](const Cbi& f) {
            if (!(f.kappa > 0.0) || !(f.kappa < 1.0)) {
              throw std::invalid_argument("cbi: need kappa in (0,1)");
            }
            if (!(f.delta > f.kappa / (f.kappa + 1.0))) {
              throw std::invalid_argument("cbi: need delta > kappa/(kappa+1)");
            }
            if (!(f.c > 0.0)) throw std::invalid_argument("cbi: need c > 0");
          },
      },
      kind);
}

double default_alpha(const FamilyKind& kind) {
  return std::visit(
      Overloaded{
          [](const BrownianDrift&) { return 1.0; },
          [](const CpPosDrift&) { return 1.0; },
          [](const CpNegDrift&) { return 1.0; },
          [](const SawTooth&) { return 1.0; },
          [](const ConditionedStable& f) { return f.alpha_s; },
          [](const HypergeometricStable& f) { return f.alpha_h; },
          [](const Cbi& f) { return f.kappa; },
      },
      kind);
}

// Step for finite differences at 0: base 1e-3, shrunk when the domain boundary
// is close so that all stencil points at +-2h stay well inside.
double fd_step(const LevyFamily& family) {
  const Interval dom = psi_domain(family);
  const double dist = std::min(std::isinf(dom.lo) ? kInf : -dom.lo,
                               std::isinf(dom.hi) ? kInf : dom.hi);
  return 1e-3 * std::min(1.0, dist / 10.0);
}

struct RichardsonResult {
  double value;
  double err_est;
};

// Richardson extrapolation of a central difference D(h) with error O(h^2):
// two levels h and h/2, extrapolated value (4 D(h/2) - D(h))/3.
template <typename F>
RichardsonResult richardson_central(F&& deriv, double h) {
  const double d1 = deriv(h);
  const double d2 = deriv(h / 2.0);
  const double extrap = (4.0 * d2 - d1) / 3.0;
  return {extrap, std::fabs(extrap - d2)};
}

}  // namespace

const char* LevyFamily::name() const {
  return std::visit(Overloaded{
                        [](const BrownianDrift&) { return "bessel"; },
                        [](const CpPosDrift&) { return "cp+"; },
                        [](const CpNegDrift&) { return "cp-"; },
                        [](const SawTooth&) { return "saw"; },
                        [](const ConditionedStable&) { return "condstable"; },
                        [](const HypergeometricStable&) { return "hgstable"; },
                        [](const Cbi&) { return "cbi"; },
                    },
                    kind);
}

LevyFamily make_family(const FamilyKind& kind, std::optional<double> alpha) {
  validate(kind);
  double a = alpha.value_or(default_alpha(kind));
  if (!(a > 0.0)) throw std::invalid_argument("self-similarity index must be > 0");
  if (const auto* cbi = std::get_if<Cbi>(&kind)) {
    if (std::fabs(a - cbi->kappa) > 1e-12) {
      throw std::invalid_argument("cbi: the self-similarity index is kappa; "
                                  "an @alpha override must equal kappa");
    }
    a = cbi->kappa;
  }
  return LevyFamily{kind, a};
}

double psi_eval(const LevyFamily& family, double m) {
  if (m == 0.0) return 0.0;
  if (!psi_domain(family).contains(m)) {
    throw DomainError("psi_eval: m = " + std::to_string(m) +
                      " outside the exponent domain of " + family.name());
  }
  return m * psi_ratio(family.kind, m);
}

double psi_over_m(const LevyFamily& family, double m) {
  if (!psi_domain(family).contains(m)) {
    throw DomainError("psi_over_m: m outside the exponent domain");
  }
  return psi_ratio(family.kind, m);
}

Interval psi_domain(const LevyFamily& family) { return domain_of(family.kind); }

Cumulants cumulants_closed(const LevyFamily& family) {
  const double alpha = family.alpha;
  const auto [p, sigma2] = std::visit(
      Overloaded{
          [](const BrownianDrift& f) {
            return std::pair{2.0 * f.nu, 4.0};
          },
          [](const CpPosDrift& f) {
            return std::pair{f.d + f.a / f.b, 2.0 * f.a / (f.b * f.b)};
          },
          [](const CpNegDrift& f) {
            return std::pair{(f.a - f.b) / f.b, 2.0 * f.a / (f.b * f.b)};
          },
          [](const SawTooth& f) {
            return std::pair{(f.b - f.a) / f.b, 2.0 * f.a / (f.b * f.b)};
          },
          [](const ConditionedStable& f) {
            const double g = gamma_fn(f.alpha_s);
            return std::pair{g, 2.0 * g * (digamma(f.alpha_s) + kEulerGamma)};
          },
          [](const HypergeometricStable& f) {
            const double p = std::exp((f.alpha_h - 1.0) * std::numbers::ln2 +
                                      log_gamma(f.alpha_h / 2.0) +
                                      log_gamma(f.dim / 2.0) -
                                      log_gamma((f.dim - f.alpha_h) / 2.0));
            const double s2 = p * (digamma(f.dim / 2.0) - kEulerGamma -
                                   digamma(f.alpha_h / 2.0) -
                                   digamma((f.dim - f.alpha_h) / 2.0));
            return std::pair{p, s2};
          },
          [](const Cbi& f) {
            const double drift = (f.kappa + 1.0) * f.delta - f.kappa;
            const double g = gamma_fn(f.kappa);
            const double p = f.c * drift * g;
            const double s2 =
                2.0 * f.c * g * (1.0 - drift * (digamma(f.kappa) + kEulerGamma));
            return std::pair{p, s2};
          },
      },
      family.kind);
  return Cumulants{p, sigma2, sigma2 / (alpha * p * p * p)};
}

FdCumulants cumulants_fd(const LevyFamily& family) {
  const double h = fd_step(family);
  // p from a central difference of psi itself.
  const auto p = richardson_central(
      [&](double step) {
        return (psi_eval(family, step) - psi_eval(family, -step)) / (2.0 * step);
      },
      h);
  // sigma2 = 2 d/dm [psi(m)/m] at 0; differentiating the pole-free ratio avoids
  // the cancellation of a second difference of psi.
  const auto s2 = richardson_central(
      [&](double step) {
        return (psi_over_m(family, step) - psi_over_m(family, -step)) / step;
      },
      h);
  return FdCumulants{p.value, s2.value, p.err_est, s2.err_est};
}

Cumulants cumulants(const LevyFamily& family, double tol) {
  const Cumulants closed = cumulants_closed(family);
  const FdCumulants fd = cumulants_fd(family);
  const double p_rel = std::fabs(closed.p - fd.p) / std::max(std::fabs(closed.p), 1e-300);
  const double s2_rel =
      std::fabs(closed.sigma2 - fd.sigma2) / std::max(std::fabs(closed.sigma2), 1e-300);
  if (p_rel > tol || s2_rel > tol) {
    std::ostringstream msg;
    msg << "cumulants(" << format_family(family) << "): closed form and finite "
        << "differences disagree: p " << closed.p << " vs " << fd.p << " (rel "
        << p_rel << "), sigma2 " << closed.sigma2 << " vs " << fd.sigma2
        << " (rel " << s2_rel << "), tol " << tol;
    throw InconsistencyError(msg.str());
  }
  return closed;
}

QuotedCumulants quoted_cumulants(const LevyFamily& family) {
  return std::visit(
      Overloaded{
          [](const BrownianDrift& f) {
            // Quoted clock variance 1/(4 nu^3); psi-derived value is 1/(2 nu^3).
            return QuotedCumulants{std::nullopt, 1.0 / (4.0 * f.nu * f.nu * f.nu)};
          },
          [](const CpPosDrift& f) {
            return QuotedCumulants{
                f.a / (f.b * f.b),
                f.a * f.b * f.b * f.b /
                    std::pow(f.a + f.d * f.b, 3.0)};
          },
          [](const CpNegDrift& f) {
            return QuotedCumulants{f.a / (f.b * f.b),
                                   f.a * f.b / std::pow(f.a - f.b, 3.0)};
          },
          [](const SawTooth& f) {
            return QuotedCumulants{f.a / (f.b * f.b),
                                   f.a * f.b / std::pow(f.b - f.a, 3.0)};
          },
          [](const ConditionedStable&) { return QuotedCumulants{}; },
          [](const HypergeometricStable& f) {
            const double p = std::exp((f.alpha_h - 1.0) * std::numbers::ln2 +
                                      log_gamma(f.alpha_h / 2.0) +
                                      log_gamma(f.dim / 2.0) -
                                      log_gamma((f.dim - f.alpha_h) / 2.0));
            return QuotedCumulants{
                p * (1.0 - kEulerGamma - digamma((f.dim - f.alpha_h) / 2.0) -
                     digamma(f.alpha_h / 2.0)),
                std::nullopt};
          },
          [](const Cbi& f) {
            const double g = gamma_fn(f.kappa);
            const double drift = (f.kappa + 1.0) * f.delta - f.kappa;
            return QuotedCumulants{
                f.c * g * (1.0 - drift * (digamma(f.kappa) + kEulerGamma)),
                std::nullopt};
          },
      },
      family.kind);
}

bool path_simulable(const LevyFamily& family) {
  return std::holds_alternative<BrownianDrift>(family.kind) ||
         std::holds_alternative<CpPosDrift>(family.kind) ||
         std::holds_alternative<CpNegDrift>(family.kind) ||
         std::holds_alternative<SawTooth>(family.kind);
}

// ===== Family grammar ========================================================

namespace {

struct ParsedSpec {
  std::string name;
  std::map<std::string, double> args;
  std::optional<double> alpha;
};

[[noreturn]] void parse_fail(const std::string& text, const std::string& why) {
  throw std::invalid_argument("bad family spec '" + text + "': " + why);
}

ParsedSpec parse_spec(const std::string& text) {
  ParsedSpec out;
  const auto open = text.find('(');
  const auto close = text.find(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    parse_fail(text, "expected name(key=value,...)");
  }
  out.name = text.substr(0, open);
  const std::string body = text.substr(open + 1, close - open - 1);
  std::string tail = text.substr(close + 1);
  if (!tail.empty()) {
    if (tail.rfind("@alpha=", 0) != 0) parse_fail(text, "expected @alpha=... suffix");
    try {
      out.alpha = std::stod(tail.substr(7));
    } catch (const std::exception&) {
      parse_fail(text, "bad @alpha value");
    }
  }
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) parse_fail(text, "expected key=value in '" + item + "'");
    const std::string key = item.substr(0, eq);
    double value;
    try {
      value = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      parse_fail(text, "bad numeric value in '" + item + "'");
    }
    if (!out.args.emplace(key, value).second) parse_fail(text, "duplicate key " + key);
  }
  return out;
}

// Pops required/optional keys; anything left over afterwards is unknown.
class ArgReader {
 public:
  ArgReader(const std::string& text, std::map<std::string, double> args)
      : text_(text), args_(std::move(args)) {}
  double require(const std::string& key) {
    const auto it = args_.find(key);
    if (it == args_.end()) parse_fail(text_, "missing key " + key);
    const double v = it->second;
    args_.erase(it);
    return v;
  }
  double optional(const std::string& key, double fallback) {
    const auto it = args_.find(key);
    if (it == args_.end()) return fallback;
    const double v = it->second;
    args_.erase(it);
    return v;
  }
  void finish() {
    if (!args_.empty()) parse_fail(text_, "unknown key " + args_.begin()->first);
  }

 private:
  const std::string& text_;
  std::map<std::string, double> args_;
};

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  std::string s = out.str();
  // Trim to the shortest representation that round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    std::ostringstream probe;
    probe.precision(prec);
    probe << v;
    if (std::stod(probe.str()) == v) return probe.str();
  }
  return s;
}

}  // namespace

LevyFamily parse_family(const std::string& text) {
  ParsedSpec spec = parse_spec(text);
  ArgReader args(text, spec.args);
  FamilyKind kind;
  if (spec.name == "bessel") {
    kind = BrownianDrift{args.require("nu")};
  } else if (spec.name == "cp+") {
    kind = CpPosDrift{args.require("d"), args.require("a"), args.require("b")};
  } else if (spec.name == "cp-") {
    kind = CpNegDrift{args.require("a"), args.require("b")};
  } else if (spec.name == "saw") {
    kind = SawTooth{args.require("a"), args.require("b")};
  } else if (spec.name == "condstable") {
    kind = ConditionedStable{args.require("alpha")};
  } else if (spec.name == "hgstable") {
    kind = HypergeometricStable{args.require("alpha"), args.require("dim")};
  } else if (spec.name == "cbi") {
    kind = Cbi{args.require("kappa"), args.require("delta"), args.optional("c", 1.0)};
  } else {
    parse_fail(text, "unknown family name '" + spec.name + "'");
  }
  args.finish();
  return make_family(kind, spec.alpha);
}

std::string format_family(const LevyFamily& family) {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const BrownianDrift& f) {
                   out << "bessel(nu=" << format_double(f.nu) << ")";
                 },
                 [&](const CpPosDrift& f) {
                   out << "cp+(d=" << format_double(f.d) << ",a=" << format_double(f.a)
                       << ",b=" << format_double(f.b) << ")";
                 },
                 [&](const CpNegDrift& f) {
                   out << "cp-(a=" << format_double(f.a) << ",b=" << format_double(f.b)
                       << ")";
                 },
                 [&](const SawTooth& f) {
                   out << "saw(a=" << format_double(f.a) << ",b=" << format_double(f.b)
                       << ")";
                 },
                 [&](const ConditionedStable& f) {
                   out << "condstable(alpha=" << format_double(f.alpha_s) << ")";
                 },
                 [&](const HypergeometricStable& f) {
                   out << "hgstable(alpha=" << format_double(f.alpha_h)
                       << ",dim=" << format_double(f.dim) << ")";
                 },
                 [&](const Cbi& f) {
                   out << "cbi(kappa=" << format_double(f.kappa)
                       << ",delta=" << format_double(f.delta)
                       << ",c=" << format_double(f.c) << ")";
                 },
             },
             family.kind);
  if (family.alpha != default_alpha(family.kind)) {
    out << "@alpha=" << format_double(family.alpha);
  }
  return out.str();
}

}  // namespace clocksim
