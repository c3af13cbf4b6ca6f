// Deterministic result emission: CSV builders (shortest round-trip number
// formatting, byte-identical across runs and worker counts) and helpers for
// the flat key=value configuration format and its JSON echo.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "clocksim/ergodicity.hpp"
#include "clocksim/harness.hpp"
#include "clocksim/levy_family.hpp"
#include "clocksim/path.hpp"

namespace clocksim {

// Shortest decimal string that round-trips to the same double (to_chars);
// locale-independent. NaN prints "nan", infinities "inf"/"-inf".
std::string format_shortest(double x);

// Writes content to path, throwing std::runtime_error with the path in the
// message on failure.
void write_text_file(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

// The seven representative catalog entries used by whole-catalog commands.
std::vector<LevyFamily> representative_catalog();

// One line per family: `name,alpha,p=..,sigma2=..,v2=..`; where a quoted
// value disagrees with the computed one, a `#`-comment line reporting the
// discrepancy follows the row.
std::string csv_cumulants(const std::vector<LevyFamily>& families);

// Header `t,mean,var,se,target,pass`, one row per report entry; pass is 1/0.
std::string csv_test_report(const TestReport& report);

// Covariance matrix with row/column headers equal to the time grid.
std::string csv_covariance_matrix(const std::vector<double>& t_grid,
                                  const std::vector<std::vector<double>>& cov);

struct IinfCheckRow {
  std::string family;
  double alpha = 0.0;
  int n = 0;
  double mean_inv_iinf = 0.0;
  double alpha_p = 0.0;
  double se = 0.0;
  double ks_p_closed_vs_mc = 0.0;  // NaN when no second sampler exists
};
std::string csv_iinf(const std::vector<IinfCheckRow>& rows);

struct MellinCheckRow {
  std::string family;
  double z = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};
std::string csv_mellin(const std::vector<MellinCheckRow>& rows);

std::string csv_ergodicity(
    const std::vector<std::pair<LevyFamily, ErgodicityVerdict>>& verdicts);

// One row per breakpoint: `t,xi,slope,jump` (slope of the outgoing segment;
// 0 for the final breakpoint).
std::string csv_path_dump(const PiecewiseLinearPath& path);

// Flat `key=value` lines; '#' comments and blank lines ignored; repeated keys
// are errors, as is any line without '='.
std::map<std::string, std::string> parse_flat_config(const std::string& text);

// The canonical flat form of an experiment configuration (keys family,
// regime, a, logT, tgrid, n, seed, dt, workers).
std::map<std::string, std::string> config_to_flat(const ExperimentConfig& config);

// Strict inverse: unknown keys are errors; missing keys keep defaults.
ExperimentConfig config_from_flat(const std::map<std::string, std::string>& flat);

// JSON text of a summary: resolved config, verdict, notes, and caller-supplied
// extras (e.g. runtimes — the one field exempt from byte-identity).
std::string json_summary(const std::string& subcommand,
                         const ExperimentConfig& config, const TestReport& report,
                         double runtime_seconds);

// Extracts the "config" object of an emitted JSON summary back into flat form.
std::map<std::string, std::string> flat_config_from_json_text(const std::string& text);

std::vector<double> parse_double_list(const std::string& csv_list);
std::string format_double_list(const std::vector<double>& values);

}  // namespace clocksim
