// Acceptance gate: nine end-to-end criteria, one verdict line each.
//
// Every criterion prints exactly one line
//   [PASS] criterion N: <summary>
//   [FAIL] criterion N: <summary>
// and the process exits nonzero if any criterion fails. Criteria 5-7 share
// the expensive replica matrices, so the whole gate stays well inside a
// 15-minute budget even on a single core.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <string>
#include <vector>

#include "clocksim/ergodicity.hpp"
#include "clocksim/errors.hpp"
#include "clocksim/exp_functional.hpp"
#include "clocksim/harness.hpp"
#include "clocksim/levy_family.hpp"
#include "clocksim/mellin.hpp"
#include "clocksim/report.hpp"
#include "clocksim/rng.hpp"
#include "clocksim/special_functions.hpp"
#include "clocksim/stats.hpp"

using namespace clocksim;

namespace {

int g_failures = 0;

void verdict(int index, bool pass, const std::string& summary) {
  if (!pass) ++g_failures;
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", index,
              summary.c_str());
  std::fflush(stdout);
}

template <typename Fn>
void criterion(int index, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    verdict(index, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(double x) { return format_shortest(x); }

// ---------------------------------------------------------------------------
// 1. Closed-form cumulants vs finite differences across the whole catalog.
void criterion_cumulants() {
  const auto catalog = representative_catalog();
  int checked = 0;
  int discrepancies = 0;
  double worst_rel = 0.0;
  for (const auto& fam : catalog) {
    const Cumulants closed = cumulants_closed(fam);
    (void)cumulants(fam, 1e-6);  // throws InconsistencyError on disagreement
    const FdCumulants fd = cumulants_fd(fam);
    worst_rel = std::max(worst_rel, std::fabs(fd.p - closed.p) /
                                        std::max(1.0, std::fabs(closed.p)));
    worst_rel = std::max(worst_rel, std::fabs(fd.sigma2 - closed.sigma2) /
                                        std::max(1.0, std::fabs(closed.sigma2)));
    ++checked;
    const auto quoted = quoted_cumulants(fam);
    if (quoted.sigma2 &&
        std::fabs(*quoted.sigma2 - closed.sigma2) > 1e-9 * closed.sigma2) {
      ++discrepancies;
    } else if (quoted.v2 && std::fabs(*quoted.v2 - closed.v2) > 1e-9 * closed.v2) {
      ++discrepancies;
    }
  }
  std::ostringstream os;
  os << checked << "/7 families: closed-form p and sigma^2 confirmed by finite "
     << "differences at 1e-6 (worst rel dev " << fmt(worst_rel) << "); "
     << discrepancies << " quoted-value discrepancies reported in the "
     << "cumulants CSV, computed values used throughout";
  verdict(1, checked == 7 && discrepancies >= 1, os.str());
}

// ---------------------------------------------------------------------------
// 2. Mellin recursion residual and the Mellin route to v^2.
void criterion_mellin() {
  bool pass = true;
  double worst_residual = 0.0;
  double worst_v2_rel = 0.0;
  for (const char* spec : {"bessel(nu=1)", "condstable(alpha=1.5)"}) {
    const auto fam = parse_family(spec);
    const auto M = MellinFunction::closed_form(fam);
    if (!M) {
      pass = false;
      continue;
    }
    for (int i = 1; i <= 20; ++i) {
      const double z = 0.1 * i;
      const double r = mellin_recursion_residual(*M, fam, z);
      worst_residual = std::max(worst_residual, r);
      if (r >= 1e-10) pass = false;
    }
    const Cumulants c = cumulants_closed(fam);
    const double v2 = v2_via_mellin(*M, fam.alpha, c.p);
    const double rel = std::fabs(v2 - c.v2) / c.v2;
    worst_v2_rel = std::max(worst_v2_rel, rel);
    if (rel > 1e-6) pass = false;
  }
  std::ostringstream os;
  os << "Mellin recursion residual < 1e-10 on z = 0.1..2.0 for the Brownian "
     << "and conditioned-stable transforms (worst " << fmt(worst_residual)
     << "); derivative route reproduces v^2 to 1e-6 (worst rel "
     << fmt(worst_v2_rel) << ")";
  verdict(2, pass, os.str());
}

// ---------------------------------------------------------------------------
// 3. Perpetuity law: E[1/I] = alpha p and closed-form vs path-MC agreement.
void criterion_perpetuity() {
  const char* specs[] = {"bessel(nu=1)", "cp+(d=1,a=2,b=3)", "cp-(a=3,b=1)",
                         "saw(a=1,b=2)"};
  bool pass = true;
  std::ostringstream os;
  os << "E[1/I] = alpha p within 3 SE at n = 1e5 and closed-vs-simulated KS "
     << "p > 0.01 at n = 1e4:";
  int stream = 0;
  for (const char* spec : specs) {
    const auto fam = parse_family(spec);
    const double target = fam.alpha * cumulants_closed(fam).p;
    const IInfLaw law = i_inf_sampler(fam);

    RngStream rng(substream_seed(3001, stream++));
    const int n = 100000;
    std::vector<double> inv(n);
    for (auto& v : inv) v = 1.0 / sample_i_inf(law, rng);
    const double mean = sample_mean(inv);
    const double se = std::sqrt(sample_variance(inv) / n);
    const bool mean_ok = std::fabs(mean - target) <= 3.0 * se;

    const int m = 10000;
    RngStream rng_closed(substream_seed(3001, 100 + stream));
    RngStream rng_mc(substream_seed(3001, 200 + stream));
    std::vector<double> closed(m), mc(m);
    for (auto& v : closed) v = sample_i_inf(law, rng_closed);
    for (auto& v : mc) v = sample_i_inf_mc(fam, rng_mc);
    const auto ks = ks_test_two_sample(closed, mc);
    const bool ks_ok = ks.p_value > 0.01;

    pass = pass && mean_ok && ks_ok;
    os << " " << fam.name() << " (dev " << fmt(std::fabs(mean - target))
       << " vs 3SE " << fmt(3.0 * se) << ", KS p " << fmt(ks.p_value) << ")";
  }
  verdict(3, pass, os.str());
}

// ---------------------------------------------------------------------------
// 4. Single-path long-horizon clock average.
void criterion_lln() {
  const std::vector<double> levels = {10.0, 100.0, 1000.0, 10000.0};
  bool pass = true;
  std::ostringstream os;
  os << "single-path clock/L at L = 1e4 within 5 sqrt(v^2/L) of 1/(alpha p):";
  std::uint64_t seed = 4001;
  for (const char* spec : {"bessel(nu=1)", "saw(a=1,b=2)"}) {
    const auto fam = parse_family(spec);
    const auto report = lln_check(fam, 1.0, levels, seed++);
    pass = pass && report.all_pass();
    const auto& last = report.rows.back();
    os << " " << fam.name() << " (" << fmt(last.mean) << " vs "
       << fmt(last.target) << ", tol " << fmt(5.0 * last.se) << ")";
  }
  verdict(4, pass, os.str());
}

// ---------------------------------------------------------------------------
// 5-7. Replica experiments, shared between the marginal CLT, the functional
// CLT, and the entrance-regime comparison.
struct ExperimentSet {
  SampleMatrix bessel_qa, saw_qa, cpn_qa, bessel_q0;
};

ExperimentSet run_experiments() {
  ExperimentConfig config;
  config.log_T = 400.0;
  config.replicas = 4000;

  ExperimentSet set;
  config.family = parse_family("bessel(nu=1)");
  config.seed = 5101;
  set.bessel_qa = run_experiment(config);

  config.family = parse_family("saw(a=1,b=2)");
  config.seed = 5102;
  set.saw_qa = run_experiment(config);

  config.family = parse_family("cp-(a=3,b=1)");
  config.seed = 5103;
  set.cpn_qa = run_experiment(config);

  config.family = parse_family("bessel(nu=1)");
  config.regime = Regime::kQ0;
  config.seed = 5104;
  set.bessel_q0 = run_experiment(config);
  return set;
}

void criterion_clt(const ExperimentSet& set) {
  struct Case {
    const char* label;
    const SampleMatrix* samples;
    double v2;
  };
  const Case cases[] = {{"bessel", &set.bessel_qa, 0.5},
                        {"saw", &set.saw_qa, 4.0},
                        {"cp-", &set.cpn_qa, 0.75}};
  bool pass = true;
  std::ostringstream os;
  os << "W(1) variance and normality at L = 400, n = 4000:";
  for (const auto& c : cases) {
    const auto w1 = c.samples->column(c.samples->find_t(1.0));
    const auto report = clt_test(w1, c.v2, 400.0);
    pass = pass && report.all_pass();
    os << " " << c.label << " (var " << fmt(report.rows[0].var) << " vs "
       << fmt(c.v2) << ", KS p " << fmt(report.ks_p_value) << ")";
  }
  // The Brownian variance estimate must also exclude the halved value 0.25:
  // the identical band test against 0.25 has to fail.
  const auto w1 = set.bessel_qa.column(set.bessel_qa.find_t(1.0));
  const auto wrong = clt_test(w1, 0.25, 400.0);
  const bool excluded = !wrong.all_pass();
  pass = pass && excluded;
  os << "; same test against v^2 = 0.25 fails as required ("
     << (excluded ? "excluded" : "NOT excluded") << ")";
  verdict(5, pass, os.str());
}

void criterion_fclt(const ExperimentSet& set) {
  struct Case {
    const char* label;
    const SampleMatrix* samples;
    double v2;
  };
  const Case cases[] = {{"bessel", &set.bessel_qa, 0.5},
                        {"saw", &set.saw_qa, 4.0},
                        {"cp-", &set.cpn_qa, 0.75}};
  bool pass = true;
  std::ostringstream os;
  os << "all 15 grid-pair covariances within 4 jackknife SE of v^2 min(s,t), "
     << "diagonal variances in the marginal band, increment W(2)-W(1) "
     << "Gaussian:";
  for (const auto& c : cases) {
    const auto report = fclt_covariance_test(*c.samples, c.v2, 400.0);
    pass = pass && report.all_pass();
    os << " " << c.label << " (increment KS p " << fmt(report.ks_p_value) << ")";
  }
  verdict(6, pass, os.str());
}

void criterion_entrance(const ExperimentSet& set) {
  bool pass = true;
  std::ostringstream os;

  // The Brownian entrance marginal is the doubled gamma with shifted shape:
  // X1 =(d) 2 Z_{nu+1} at alpha = 1, nu = 1.
  const auto fam = parse_family("bessel(nu=1)");
  EntranceSampler entrance(fam, 0);
  RngStream rng(substream_seed(7001, 1));
  const int n = 10000;
  std::vector<double> drawn(n), reference(n);
  for (auto& v : drawn) v = entrance.sample(rng);
  for (auto& v : reference) v = 2.0 * rng.gamma(2.0);
  const auto ks_gamma = ks_test_two_sample(drawn, reference);
  pass = pass && ks_gamma.p_value > 0.01;
  os << "entrance marginal matches 2 Gamma(nu+1) (KS p " << fmt(ks_gamma.p_value)
     << ");";

  // Same CLT/FCLT verdicts under the entrance regime.
  const auto w1 = set.bessel_q0.column(set.bessel_q0.find_t(1.0));
  const auto clt = clt_test(w1, 0.5, 400.0);
  const auto fclt = fclt_covariance_test(set.bessel_q0, 0.5, 400.0);
  pass = pass && clt.all_pass() && fclt.all_pass();
  os << " entrance-regime CLT (var " << fmt(clt.rows[0].var) << ", KS p "
     << fmt(clt.ks_p_value) << ") "
     << (clt.all_pass() ? "passes" : "fails") << ", FCLT "
     << (fclt.all_pass() ? "passes" : "fails") << ";";

  // And the two regimes agree in law at t = 1.
  const auto w1_qa = set.bessel_qa.column(set.bessel_qa.find_t(1.0));
  const auto ks_regimes = ks_test_two_sample(w1, w1_qa);
  pass = pass && ks_regimes.p_value > 0.01;
  os << " entrance-vs-fixed-start KS p " << fmt(ks_regimes.p_value);
  verdict(7, pass, os.str());
}

// ---------------------------------------------------------------------------
// 8. Drift-criterion classification across the catalog.
void criterion_ergodicity() {
  struct Expect {
    const char* spec;
    ErgodicityClass cls;
  };
  const Expect expects[] = {
      {"bessel(nu=1)", ErgodicityClass::kExpErgodicVia2b},
      {"cp+(d=1,a=2,b=3)", ErgodicityClass::kExpErgodicVia2b},
      {"cp+(d=1,a=1,b=0.5)", ErgodicityClass::kCriterionFails},
      {"cp-(a=3,b=1)", ErgodicityClass::kCriterionFails},
      {"cp-(a=3,b=1.5)", ErgodicityClass::kExpErgodicVia2b},
      {"saw(a=1,b=2)", ErgodicityClass::kExpErgodicVia2b},
      {"hgstable(alpha=2.5,dim=4)", ErgodicityClass::kExpErgodicVia2a},
      {"cbi(kappa=0.5,delta=0.9,c=1)", ErgodicityClass::kCriterionFails},
  };
  bool pass = true;
  int matched = 0;
  for (const auto& e : expects) {
    const auto v = quenched_criterion(parse_family(e.spec));
    if (v.classification == e.cls) {
      ++matched;
    } else {
      pass = false;
    }
  }

  // The negative-drift witness for the heavy-tailed family sits inside (2, 2.5).
  const auto hg = quenched_criterion(parse_family("hgstable(alpha=2.5,dim=4)"));
  const bool witness_ok =
      hg.witness_m && *hg.witness_m > 2.0 && *hg.witness_m < 2.5;
  pass = pass && witness_ok;

  // Failed criterion for the branching-immigration family comes with the
  // finite log-moment substitute, quadrature vs closed form to 1e-8.
  const double kappa = 0.5;
  const double quad = cbi_log_moment(kappa);
  const double closed = 1.0 / (special::gamma_fn(1.0 - kappa) * (kappa + 1.0));
  const bool logmoment_ok = std::fabs(quad - closed) <= 1e-8 * std::fabs(closed);
  pass = pass && logmoment_ok;

  std::ostringstream os;
  os << matched << "/8 expected classifications (2b for the drifting families, "
     << "2a for the heavy-tailed stable with witness "
     << (hg.witness_m ? fmt(*hg.witness_m) : "none") << " in (2, 2.5), "
     << "criterion fails where no admissible exponent exists); "
     << "branching-immigration log-moment " << fmt(quad)
     << " matches its closed form to 1e-8";
  verdict(8, pass, os.str());
}

// ---------------------------------------------------------------------------
// 9. Byte-identical result CSVs independent of the worker count.
void criterion_determinism() {
  ExperimentConfig config;
  config.family = parse_family("cp-(a=3,b=1)");
  config.log_T = 100.0;
  config.t_grid = {0.5, 1.0, 2.0};
  config.replicas = 1200;
  config.seed = 9001;

  config.workers = 1;
  const SampleMatrix serial = run_experiment(config);
  config.workers = 3;
  const SampleMatrix pooled = run_experiment(config);

  bool identical = serial.rows.size() == pooled.rows.size();
  for (std::size_t i = 0; identical && i < serial.rows.size(); ++i) {
    identical = serial.rows[i] == pooled.rows[i];
  }

  const auto render = [&](const SampleMatrix& m) {
    const auto report = fclt_covariance_test(m, 0.75, config.log_T);
    return csv_test_report(report) +
           csv_covariance_matrix(m.t_grid, report.covariance);
  };
  const std::string csv_serial = render(serial);
  const std::string csv_pooled = render(pooled);
  const bool bytes_equal = csv_serial == csv_pooled;

  std::ostringstream os;
  os << "1200-replica experiment with 1 vs 3 workers: sample matrices "
     << (identical ? "bitwise identical" : "DIFFER") << ", rendered report and "
     << "covariance CSVs " << (bytes_equal ? "byte-identical" : "DIFFER") << " ("
     << csv_serial.size() << " bytes)";
  verdict(9, identical && bytes_equal, os.str());
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  std::printf("acceptance gate: 9 criteria\n");

  criterion(1, criterion_cumulants);
  criterion(2, criterion_mellin);
  criterion(3, criterion_perpetuity);
  criterion(4, criterion_lln);

  ExperimentSet set;
  bool have_set = false;
  try {
    set = run_experiments();
    have_set = true;
  } catch (const std::exception& e) {
    verdict(5, false, std::string("experiment setup failed: ") + e.what());
    verdict(6, false, "experiment setup failed");
    verdict(7, false, "experiment setup failed");
  }
  if (have_set) {
    criterion(5, [&] { criterion_clt(set); });
    criterion(6, [&] { criterion_fclt(set); });
    criterion(7, [&] { criterion_entrance(set); });
  }

  criterion(8, criterion_ergodicity);
  criterion(9, criterion_determinism);

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d/9 criteria passed in %.1f s\n", 9 - g_failures, seconds);
  return g_failures == 0 ? 0 : 1;
}
