// Command-line runner: cumulant tables, exponential-functional checks, Mellin
// recursion checks, ergodicity classification, and the LLN/CLT/FCLT Monte
// Carlo experiments. All randomness flows from one master seed; outputs are
// CSV (byte-deterministic) plus a JSON summary per experiment.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "clocksim/clock.hpp"
#include "clocksim/ergodicity.hpp"
#include "clocksim/errors.hpp"
#include "clocksim/exp_functional.hpp"
#include "clocksim/harness.hpp"
#include "clocksim/levy_family.hpp"
#include "clocksim/mellin.hpp"
#include "clocksim/report.hpp"
#include "clocksim/rng.hpp"
#include "clocksim/stats.hpp"

namespace {

using namespace clocksim;

constexpr int kExitPass = 0;
constexpr int kExitVerificationFail = 1;
constexpr int kExitUsage = 2;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::uint64_t resolve_seed(const std::string& seed_text) {
  if (seed_text == "auto") {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  return std::stoull(seed_text);
}

void write_if_out(const std::string& out_dir, const std::string& filename,
                  const std::string& content) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  write_text_file((std::filesystem::path(out_dir) / filename).string(), content);
}

std::vector<LevyFamily> families_for(const std::string& family_spec, bool all) {
  if (all) return representative_catalog();
  if (family_spec.empty()) {
    throw std::invalid_argument("give --family <spec> or --all");
  }
  return {parse_family(family_spec)};
}

// ---------------------------------------------------------------- cumulants

int cmd_cumulants(const std::string& family_spec, bool all,
                  const std::string& out_dir) {
  const std::string csv = csv_cumulants(families_for(family_spec, all));
  std::cout << csv;
  write_if_out(out_dir, "cumulants.csv", csv);
  return kExitPass;
}

// ---------------------------------------------------------------- iinf-check

int cmd_iinf_check(const std::string& family_spec, bool all, int n, int ks_n,
                   std::uint64_t seed, double dt, const std::string& out_dir) {
  std::vector<LevyFamily> families;
  if (all) {
    for (const auto& fam : representative_catalog()) {
      if (i_inf_closed_form(fam) || path_simulable(fam)) families.push_back(fam);
    }
  } else {
    families = families_for(family_spec, false);
  }

  std::vector<IinfCheckRow> rows;
  bool pass = true;
  for (std::size_t fi = 0; fi < families.size(); ++fi) {
    const LevyFamily& fam = families[fi];
    const IInfLaw law = i_inf_sampler(fam, dt);  // throws if no sampler at all
    RngStream rng(substream_seed(seed, fi));
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double inv = 1.0 / sample_i_inf(law, rng);
      s1 += inv;
      s2 += inv * inv;
    }
    const double mean = s1 / n;
    const double var = (s2 - s1 * s1 / n) / (n - 1.0);
    const double se = std::sqrt(var / n);
    const double target = fam.alpha * cumulants_closed(fam).p;
    bool row_pass = std::fabs(mean - target) <= 3.0 * se;

    double ks_p = std::numeric_limits<double>::quiet_NaN();
    if (law.closed_form() && path_simulable(fam)) {
      RngStream rng_closed(substream_seed(seed, 1000 + fi));
      RngStream rng_mc(substream_seed(seed, 2000 + fi));
      std::vector<double> closed(static_cast<std::size_t>(ks_n));
      std::vector<double> mc(static_cast<std::size_t>(ks_n));
      for (int i = 0; i < ks_n; ++i) {
        closed[static_cast<std::size_t>(i)] = sample_i_inf(law, rng_closed);
        mc[static_cast<std::size_t>(i)] = sample_i_inf_mc(fam, rng_mc, dt);
      }
      const KsResult ks = ks_test_two_sample(closed, mc);
      ks_p = ks.p_value;
      row_pass = row_pass && ks.p_value > 0.01;
    }

    rows.push_back({fam.name(), fam.alpha, n, mean, target, se, ks_p});
    pass = pass && row_pass;
  }

  const std::string csv = csv_iinf(rows);
  std::cout << csv;
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  write_if_out(out_dir, "iinf_check.csv", csv);
  return pass ? kExitPass : kExitVerificationFail;
}

// --------------------------------------------------------------- mellin-check

int cmd_mellin_check(const std::string& family_spec, bool all,
                     const std::string& zgrid_text, int mc_n, std::uint64_t seed,
                     double dt, const std::string& out_dir) {
  std::vector<double> zgrid;
  if (zgrid_text.empty()) {
    for (int i = 1; i <= 20; ++i) zgrid.push_back(0.1 * i);
  } else {
    zgrid = parse_double_list(zgrid_text);
  }

  std::vector<LevyFamily> families;
  if (all) {
    for (const auto& fam : representative_catalog()) {
      if (MellinFunction::closed_form(fam)) families.push_back(fam);
    }
  } else {
    families = families_for(family_spec, false);
  }

  std::vector<MellinCheckRow> rows;
  bool pass = true;
  for (std::size_t fi = 0; fi < families.size(); ++fi) {
    const LevyFamily& fam = families[fi];
    auto closed = MellinFunction::closed_form(fam);
    const bool is_closed = closed.has_value();
    const MellinFunction M =
        is_closed ? *closed
                  : MellinFunction::monte_carlo(fam, substream_seed(seed, fi),
                                                mc_n, dt);
    const double tol = is_closed ? 1e-10 : 0.02;
    const Interval dom = psi_domain(fam);
    for (double z : zgrid) {
      if (!(M.domain().contains(z) && M.domain().contains(z + 1.0) &&
            dom.contains(fam.alpha * z))) {
        continue;
      }
      const double res = mellin_recursion_residual(M, fam, z);
      const bool ok = res < tol;
      rows.push_back({fam.name(), z, res, tol, ok});
      pass = pass && ok;
    }
    // Variance route: v^2 from M' agrees with sigma^2/(alpha p^3). Reported
    // under z = nan with a relative residual.
    const Cumulants cum = cumulants_closed(fam);
    const double step = is_closed ? 1e-4 : 1e-2;
    const double check = is_closed ? 1e-4 : 1e9;
    const double v2m = v2_via_mellin(M, fam.alpha, cum.p, step, check);
    const double v2_res = std::fabs(v2m - cum.v2) / cum.v2;
    const double v2_tol = is_closed ? 1e-6 : 0.05;
    const bool ok = v2_res < v2_tol;
    rows.push_back(
        {fam.name(), std::numeric_limits<double>::quiet_NaN(), v2_res, v2_tol, ok});
    pass = pass && ok;
  }

  const std::string csv = csv_mellin(rows);
  std::cout << csv;
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  write_if_out(out_dir, "mellin_check.csv", csv);
  return pass ? kExitPass : kExitVerificationFail;
}

// ---------------------------------------------------------------- ergodicity

int cmd_ergodicity(const std::string& family_spec, bool all,
                   const std::string& out_dir) {
  std::vector<std::pair<LevyFamily, ErgodicityVerdict>> verdicts;
  for (const auto& fam : families_for(family_spec, all)) {
    verdicts.emplace_back(fam, quenched_criterion(fam));
  }
  std::string csv = csv_ergodicity(verdicts);
  for (const auto& [fam, verdict] : verdicts) {
    (void)verdict;
    if (const auto* cbi = std::get_if<Cbi>(&fam.kind)) {
      csv += "# cbi log-moment (finite substitute condition) = " +
             format_shortest(cbi_log_moment(cbi->kappa)) + "\n";
    }
  }
  std::cout << csv;
  write_if_out(out_dir, "ergodicity.csv", csv);
  return kExitPass;
}

// ------------------------------------------------------------------- lln

int cmd_lln(const std::string& family_spec, double a,
            const std::string& levels_text, std::uint64_t seed, double dt,
            const std::string& out_dir) {
  if (family_spec.empty()) throw std::invalid_argument("give --family <spec>");
  const LevyFamily fam = parse_family(family_spec);
  std::vector<double> levels = levels_text.empty()
                                   ? std::vector<double>{10, 100, 1000, 10000}
                                   : parse_double_list(levels_text);
  const double t0 = now_seconds();
  const TestReport report = lln_check(fam, a, levels, seed, dt);
  const double runtime = now_seconds() - t0;

  const std::string csv = csv_test_report(report);
  std::cout << "seed=" << seed << "\n" << csv;
  for (const auto& note : report.notes) std::cout << "# " << note << "\n";
  std::cout << (report.all_pass() ? "PASS" : "FAIL") << "\n";

  ExperimentConfig echo;
  echo.family = fam;
  echo.a = a;
  echo.seed = seed;
  echo.dt = dt;
  echo.t_grid = levels;
  echo.log_T = levels.back();
  write_if_out(out_dir, "lln_report.csv", csv);
  write_if_out(out_dir, "lln_summary.json",
               json_summary("lln", echo, report, runtime));
  return report.all_pass() ? kExitPass : kExitVerificationFail;
}

// ----------------------------------------------------------------- clt/fclt

struct ExperimentFlags {
  std::string config_path;
  std::string family_spec;
  std::string regime_text;
  std::string tgrid_text;
  std::string seed_text;
  double a = 1.0;
  double log_T = 400.0;
  int n = 4000;
  double dt = 1e-3;
  int workers = 0;
  std::string out_dir;
  bool dump_paths = false;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f) {
  cmd->add_option("--config", f.config_path,
                  "flat key=value file or an emitted JSON summary to replay");
  cmd->add_option("--family", f.family_spec, "family spec, e.g. 'bessel(nu=1)'");
  cmd->add_option("--regime", f.regime_text, "Qa (start a>0) or Q0 (entrance)");
  cmd->add_option("--a", f.a, "start of the self-similar process (Qa)");
  cmd->add_option("--logT", f.log_T, "horizon L = log T");
  cmd->add_option("--n", f.n, "number of replicas");
  cmd->add_option("--tgrid", f.tgrid_text, "comma-separated time grid");
  cmd->add_option("--seed", f.seed_text, "master seed (integer or 'auto')");
  cmd->add_option("--dt", f.dt, "Brownian grid step");
  cmd->add_option("--workers", f.workers, "worker threads (0 = hardware)");
  cmd->add_option("--out", f.out_dir, "output directory");
  cmd->add_flag("--dump-paths", f.dump_paths, "dump replica 0's Levy path CSV");
}

ExperimentConfig resolve_config(const CLI::App* cmd, const ExperimentFlags& f) {
  ExperimentConfig config;
  if (!f.config_path.empty()) {
    const std::string text = read_text_file(f.config_path);
    const auto first = text.find_first_not_of(" \t\r\n");
    const bool is_json = first != std::string::npos && text[first] == '{';
    config = config_from_flat(is_json ? flat_config_from_json_text(text)
                                      : parse_flat_config(text));
  }
  if (cmd->count("--family") > 0) config.family = parse_family(f.family_spec);
  if (cmd->count("--regime") > 0) {
    if (f.regime_text == "Qa") {
      config.regime = Regime::kQa;
    } else if (f.regime_text == "Q0") {
      config.regime = Regime::kQ0;
    } else {
      throw std::invalid_argument("--regime must be Qa or Q0");
    }
  }
  if (cmd->count("--a") > 0) config.a = f.a;
  if (cmd->count("--logT") > 0) config.log_T = f.log_T;
  if (cmd->count("--n") > 0) config.replicas = f.n;
  if (cmd->count("--tgrid") > 0) config.t_grid = parse_double_list(f.tgrid_text);
  if (cmd->count("--seed") > 0) config.seed = resolve_seed(f.seed_text);
  if (cmd->count("--dt") > 0) config.dt = f.dt;
  if (cmd->count("--workers") > 0) config.workers = f.workers;
  return config;
}

void maybe_dump_replica0(const ExperimentConfig& config, bool dump,
                         const std::string& out_dir) {
  if (!dump) return;
  std::optional<EntranceSampler> entrance;
  if (config.regime == Regime::kQ0) {
    entrance.emplace(config.family, substream_seed(config.seed, kEntrancePoolStream),
                     65536, 0.1, config.dt);
  }
  PiecewiseLinearPath path;
  run_replica(config, 0, entrance ? &*entrance : nullptr, &path);
  const std::string csv = csv_path_dump(path);
  if (out_dir.empty()) {
    std::cout << csv;
  } else {
    write_if_out(out_dir, "path_replica0.csv", csv);
  }
}

int cmd_clt(const CLI::App* cmd, const ExperimentFlags& flags) {
  const ExperimentConfig config = resolve_config(cmd, flags);
  const double v2 = cumulants(config.family).v2;
  const double t0 = now_seconds();
  const SampleMatrix samples = run_experiment(config);
  const int t1 = samples.find_t(1.0);
  if (t1 < 0) throw std::invalid_argument("clt: t_grid must contain t = 1");
  const TestReport report =
      clt_test(samples.column(static_cast<std::size_t>(t1)), v2, config.log_T);
  const double runtime = now_seconds() - t0;

  const std::string csv = csv_test_report(report);
  std::cout << "seed=" << config.seed << "\n" << csv;
  for (const auto& note : report.notes) std::cout << "# " << note << "\n";
  std::cout << (report.all_pass() ? "PASS" : "FAIL") << "\n";
  write_if_out(flags.out_dir, "clt_report.csv", csv);
  write_if_out(flags.out_dir, "clt_summary.json",
               json_summary("clt", config, report, runtime));
  maybe_dump_replica0(config, flags.dump_paths, flags.out_dir);
  return report.all_pass() ? kExitPass : kExitVerificationFail;
}

int cmd_fclt(const CLI::App* cmd, const ExperimentFlags& flags) {
  const ExperimentConfig config = resolve_config(cmd, flags);
  const double v2 = cumulants(config.family).v2;
  const double t0 = now_seconds();
  const SampleMatrix samples = run_experiment(config);
  const TestReport report = fclt_covariance_test(samples, v2, config.log_T);
  const double runtime = now_seconds() - t0;

  const std::string csv = csv_test_report(report);
  const std::string cov_csv =
      csv_covariance_matrix(samples.t_grid, report.covariance);
  std::cout << "seed=" << config.seed << "\n" << csv << cov_csv;
  for (const auto& note : report.notes) std::cout << "# " << note << "\n";
  std::cout << (report.all_pass() ? "PASS" : "FAIL") << "\n";
  write_if_out(flags.out_dir, "fclt_report.csv", csv);
  write_if_out(flags.out_dir, "fclt_covariance.csv", cov_csv);
  write_if_out(flags.out_dir, "fclt_summary.json",
               json_summary("fclt", config, report, runtime));
  maybe_dump_replica0(config, flags.dump_paths, flags.out_dir);
  return report.all_pass() ? kExitPass : kExitVerificationFail;
}

// -------------------------------------------------------------- simulate-clock

int cmd_simulate_clock(const std::string& family_spec, double a, double t,
                       double log_t, bool have_t, bool have_log_t,
                       std::uint64_t seed, double dt, bool dump,
                       const std::string& out_dir) {
  if (family_spec.empty()) throw std::invalid_argument("give --family <spec>");
  if (have_t == have_log_t) {
    throw std::invalid_argument("give exactly one of --t and --logt");
  }
  if (!(a > 0.0)) throw std::invalid_argument("--a must be positive");
  const LevyFamily fam = parse_family(family_spec);
  const double log_time = have_t ? std::log(t) : log_t;

  RngStream rng(substream_seed(seed, 0));
  ExtensionPolicy policy;
  policy.p_hint = cumulants_closed(fam).p;
  LazyClock clock(fam, fam.alpha, rng, dt, policy);
  const double value =
      clock.value_at_log_level(log_time - fam.alpha * std::log(a));

  std::string csv = "family,alpha,a,log_t,clock,extensions\n";
  csv += std::string(fam.name()) + "," + format_shortest(fam.alpha) + "," +
         format_shortest(a) + "," + format_shortest(log_time) + "," +
         format_shortest(value) + "," + std::to_string(clock.extensions()) + "\n";
  std::cout << "seed=" << seed << "\n" << csv;
  write_if_out(out_dir, "simulate_clock.csv", csv);
  if (dump) {
    const std::string path_csv = csv_path_dump(clock.path());
    if (out_dir.empty()) {
      std::cout << path_csv;
    } else {
      write_if_out(out_dir, "simulate_clock_path.csv", path_csv);
    }
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Clock statistics of positive self-similar Markov processes: simulation "
      "and verification of the LLN/FCLT for the additive clock"};
  app.require_subcommand(1);

  // cumulants
  std::string cum_family, cum_out;
  bool cum_all = false;
  auto* cum = app.add_subcommand("cumulants", "p, sigma^2, v^2 per family");
  cum->add_option("--family", cum_family, "family spec");
  cum->add_flag("--all", cum_all, "whole representative catalog");
  cum->add_option("--out", cum_out, "output directory");

  // iinf-check
  std::string iinf_family, iinf_seed = "1", iinf_out;
  bool iinf_all = false;
  int iinf_n = 100000, iinf_ksn = 10000;
  double iinf_dt = 1e-3;
  auto* iinf = app.add_subcommand(
      "iinf-check", "E[1/I] = alpha p and closed-form vs Monte Carlo law");
  iinf->add_option("--family", iinf_family, "family spec");
  iinf->add_flag("--all", iinf_all, "all samplable catalog families");
  iinf->add_option("--n", iinf_n, "draws for the mean check");
  iinf->add_option("--ksn", iinf_ksn, "draws per sampler for the KS check");
  iinf->add_option("--seed", iinf_seed, "master seed (integer or 'auto')");
  iinf->add_option("--dt", iinf_dt, "Brownian grid step");
  iinf->add_option("--out", iinf_out, "output directory");

  // mellin-check
  std::string mel_family, mel_zgrid, mel_seed = "1", mel_out;
  bool mel_all = false;
  int mel_n = 20000;
  double mel_dt = 1e-3;
  auto* mel = app.add_subcommand("mellin-check",
                                 "recursion residual and the v^2 route");
  mel->add_option("--family", mel_family, "family spec");
  mel->add_flag("--all", mel_all, "all closed-form catalog families");
  mel->add_option("--zgrid", mel_zgrid, "comma-separated z values");
  mel->add_option("--n", mel_n, "draws for the Monte Carlo Mellin estimate");
  mel->add_option("--seed", mel_seed, "master seed (integer or 'auto')");
  mel->add_option("--dt", mel_dt, "Brownian grid step");
  mel->add_option("--out", mel_out, "output directory");

  // ergodicity
  std::string erg_family, erg_out;
  bool erg_all = false;
  auto* erg = app.add_subcommand("ergodicity", "drift-criterion classification");
  erg->add_option("--family", erg_family, "family spec");
  erg->add_flag("--all", erg_all, "whole representative catalog");
  erg->add_option("--out", erg_out, "output directory");

  // lln
  std::string lln_family, lln_levels, lln_seed = "1", lln_out;
  double lln_a = 1.0, lln_dt = 1e-3;
  auto* lln = app.add_subcommand("lln", "single-path clock/L check");
  lln->add_option("--family", lln_family, "family spec");
  lln->add_option("--a", lln_a, "start of the self-similar process");
  lln->add_option("--levels", lln_levels, "comma-separated ascending horizons L");
  lln->add_option("--seed", lln_seed, "master seed (integer or 'auto')");
  lln->add_option("--dt", lln_dt, "Brownian grid step");
  lln->add_option("--out", lln_out, "output directory");

  // clt / fclt
  ExperimentFlags clt_flags;
  auto* clt = app.add_subcommand("clt", "marginal CLT of the rescaled clock");
  add_experiment_flags(clt, clt_flags);
  ExperimentFlags fclt_flags;
  auto* fclt = app.add_subcommand("fclt", "covariance structure of the limit");
  add_experiment_flags(fclt, fclt_flags);

  // simulate-clock
  std::string sim_family, sim_seed = "1", sim_out;
  double sim_a = 1.0, sim_t = 0.0, sim_logt = 0.0, sim_dt = 1e-3;
  bool sim_dump = false;
  auto* sim = app.add_subcommand("simulate-clock", "one clock value T(t)");
  sim->add_option("--family", sim_family, "family spec");
  sim->add_option("--a", sim_a, "start of the self-similar process");
  auto* sim_t_opt = sim->add_option("--t", sim_t, "time t");
  auto* sim_logt_opt =
      sim->add_option("--logt", sim_logt, "log t (for very large times)");
  sim->add_option("--seed", sim_seed, "master seed (integer or 'auto')");
  sim->add_option("--dt", sim_dt, "Brownian grid step");
  sim->add_flag("--dump-paths", sim_dump, "dump the Levy path CSV");
  sim->add_option("--out", sim_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (cum->parsed()) return cmd_cumulants(cum_family, cum_all, cum_out);
    if (iinf->parsed()) {
      const std::uint64_t seed = resolve_seed(iinf_seed);
      std::cout << "seed=" << seed << "\n";
      return cmd_iinf_check(iinf_family, iinf_all, iinf_n, iinf_ksn, seed,
                            iinf_dt, iinf_out);
    }
    if (mel->parsed()) {
      const std::uint64_t seed = resolve_seed(mel_seed);
      std::cout << "seed=" << seed << "\n";
      return cmd_mellin_check(mel_family, mel_all, mel_zgrid, mel_n, seed,
                              mel_dt, mel_out);
    }
    if (erg->parsed()) return cmd_ergodicity(erg_family, erg_all, erg_out);
    if (lln->parsed()) {
      return cmd_lln(lln_family, lln_a, lln_levels, resolve_seed(lln_seed),
                     lln_dt, lln_out);
    }
    if (clt->parsed()) return cmd_clt(clt, clt_flags);
    if (fclt->parsed()) return cmd_fclt(fclt, fclt_flags);
    if (sim->parsed()) {
      return cmd_simulate_clock(sim_family, sim_a, sim_t, sim_logt,
                                sim_t_opt->count() > 0, sim_logt_opt->count() > 0,
                                resolve_seed(sim_seed), sim_dt, sim_dump, sim_out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerificationFail;
  }
  return kExitUsage;
}
