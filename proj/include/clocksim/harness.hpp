// Monte Carlo verification harness for the law of large numbers and the
// functional central limit theorem of the additive clock.
//
// For the self-similar process started at a > 0 the rescaled clock is
//   W_T(t) = L^{-1/2} ( integral_1^{T^t} dr / X_r^alpha  -  t L / (alpha p) ),
// with L = log T; it converges to v W with W a standard Brownian motion and
// v^2 = sigma^2/(alpha p^3). The integral from 1 (not 0) matches the entrance
// regime, makes W_T(0) = 0 exactly, and differs from the start-at-0 variant by
// an O(L^{-1/2}) term. Started from 0+ ("Q0") the first factor is replaced by
// a draw of the time-1 marginal X1 and the Markov property:
//   integral_1^{T^t} dr / X_r^alpha  =  clock of a fresh copy started at X1,
//   run to time T^t - 1.
// All levels are handled in log-space so L up to 1e4 is reachable.

#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "clocksim/exp_functional.hpp"
#include "clocksim/levy_family.hpp"

namespace clocksim {

enum class Regime { kQa, kQ0 };

std::string regime_name(Regime regime);

struct ExperimentConfig {
  LevyFamily family{BrownianDrift{1.0}, 1.0};
  Regime regime = Regime::kQa;
  double a = 1.0;  // start of the self-similar process (regime Qa)
  double log_T = 400.0;
  std::vector<double> t_grid{0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
  int replicas = 4000;
  std::uint64_t seed = 1;
  double dt = 1e-3;  // Brownian grid step
  int workers = 0;   // 0 = hardware concurrency

  void validate() const;  // throws DomainError on violations
};

// One replica's W_T values on the config's t_grid.
using RescaledClockPath = std::vector<double>;

// Replica seed is substream_seed(config.seed, replica_index); the entrance
// sampler (regime Q0 only, else pass nullptr) must be shared so its pool does
// not depend on the replica. dump_path, when given, receives a copy of the
// underlying Levy path (debug/plotting).
RescaledClockPath run_replica(const ExperimentConfig& config, int replica_index,
                              const EntranceSampler* entrance,
                              PiecewiseLinearPath* dump_path = nullptr);

struct SampleMatrix {
  std::vector<double> t_grid;
  std::vector<RescaledClockPath> rows;  // rows[replica][t index]

  [[nodiscard]] std::vector<double> column(std::size_t t_index) const;
  // Index of an exact grid value, or -1.
  [[nodiscard]] int find_t(double t) const;
};

// Runs all replicas on a worker pool; the result is a deterministic function
// of (config) alone — independent of worker count and scheduling.
SampleMatrix run_experiment(const ExperimentConfig& config);

// Entrance-pool substream index; far above any replica index.
inline constexpr std::uint64_t kEntrancePoolStream = 1ULL << 32;

struct CheckRow {
  double t = 0.0;  // grid time (the horizon L for LLN rows)
  double mean = 0.0;
  double var = 0.0;
  double se = 0.0;
  double target = 0.0;
  bool pass = false;
};

struct TestReport {
  std::vector<CheckRow> rows;
  std::vector<std::vector<double>> covariance;  // filled by the FCLT test
  double ks_statistic = std::numeric_limits<double>::quiet_NaN();
  double ks_p_value = std::numeric_limits<double>::quiet_NaN();
  double v2_target = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> notes;
  bool overall_pass = false;

  [[nodiscard]] bool all_pass() const { return overall_pass; }
};

// Single-path clock(T)/log T against 1/(alpha p) at each L in ascending
// L_list; the verdict is taken at the largest horizon with tolerance
// 5 sqrt(v^2/L) (a five-sigma CLT-scale band).
TestReport lln_check(const LevyFamily& family, double a,
                     const std::vector<double>& L_list, std::uint64_t seed,
                     double dt = 1e-3);

// Marginal test at t = 1: variance within 4 jackknife SE of v^2 plus an
// explicit finite-horizon allowance 3 v^2 / sqrt(L), and Kolmogorov-Smirnov
// of W/v against the standard normal with pass at p > 0.01.
TestReport clt_test(const std::vector<double>& w1_samples, double v2_target,
                    double log_T);

// Covariance of (W(s), W(t)) against v^2 min(s,t) within 4 jackknife SE for
// every grid pair; per-t variance rows use the clt_test tolerance; the
// increment W(2) - W(1) (when both grid points exist) is tested for
// Gaussianity by KS.
TestReport fclt_covariance_test(const SampleMatrix& samples, double v2_target,
                                double log_T);

}  // namespace clocksim
