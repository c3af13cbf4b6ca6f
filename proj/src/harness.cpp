#include "clocksim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "clocksim/clock.hpp"
#include "clocksim/errors.hpp"
#include "clocksim/rng.hpp"
#include "clocksim/stats.hpp"

namespace clocksim {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

std::string regime_name(Regime regime) {
  return regime == Regime::kQa ? "Qa" : "Q0";
}

void ExperimentConfig::validate() const {
  if (!(log_T > 0.0)) throw DomainError("config: log_T must be positive");
  if (replicas < 2) throw DomainError("config: need at least 2 replicas");
  if (t_grid.empty()) throw DomainError("config: empty t_grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0.0)) throw DomainError("config: t_grid entries must be >= 0");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) {
      throw DomainError("config: t_grid must be strictly increasing");
    }
  }
  if (regime == Regime::kQa && !(a > 0.0)) {
    throw DomainError("config: start a must be positive under Qa");
  }
  if (!(dt > 0.0)) throw DomainError("config: dt must be positive");
  if (workers < 0) throw DomainError("config: workers must be >= 0");
  if (!path_simulable(family)) {
    throw DomainError("config: family " + format_family(family) +
                      " has no path simulator");
  }
}

RescaledClockPath run_replica(const ExperimentConfig& config, int replica_index,
                              const EntranceSampler* entrance,
                              PiecewiseLinearPath* dump_path) {
  RngStream rng(substream_seed(config.seed, static_cast<std::uint64_t>(replica_index)));
  const double alpha = config.family.alpha;
  const Cumulants cum = cumulants_closed(config.family);
  const double inv_ap = 1.0 / (alpha * cum.p);
  const double L = config.log_T;
  const double sqrt_L = std::sqrt(L);

  // Q0 draws its start before any path randomness so the substream layout is
  // fixed by (seed, replica_index) alone.
  double log_x1 = 0.0;
  if (config.regime == Regime::kQ0) {
    if (entrance == nullptr) {
      throw DomainError("run_replica: regime Q0 needs an entrance sampler");
    }
    log_x1 = std::log(entrance->sample(rng));
  }

  ExtensionPolicy policy;
  policy.p_hint = cum.p;
  LazyClock clock(config.family, alpha, rng, config.dt, policy);

  RescaledClockPath w(config.t_grid.size());
  if (config.regime == Regime::kQa) {
    const double log_a = std::log(config.a);
    const double base = clock.value_at_log_level(-alpha * log_a);
    for (std::size_t i = 0; i < config.t_grid.size(); ++i) {
      const double t = config.t_grid[i];
      const double increment =
          clock.value_at_log_level(L * t - alpha * log_a) - base;
      w[i] = (increment - t * L * inv_ap) / sqrt_L;
    }
  } else {
    for (std::size_t i = 0; i < config.t_grid.size(); ++i) {
      const double t = config.t_grid[i];
      const double lt = L * t;
      // log(e^{Lt} - 1) - alpha log x1, safe for lt near 0 and huge lt.
      const double level =
          lt + std::log1p(-std::exp(-lt)) - alpha * log_x1;
      const double increment = clock.value_at_log_level(level);
      w[i] = (increment - t * L * inv_ap) / sqrt_L;
    }
  }
  if (dump_path != nullptr) *dump_path = clock.path();
  return w;
}

std::vector<double> SampleMatrix::column(std::size_t t_index) const {
  std::vector<double> out(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) out[r] = rows[r][t_index];
  return out;
}

int SampleMatrix::find_t(double t) const {
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] == t) return static_cast<int>(i);
  }
  return -1;
}

SampleMatrix run_experiment(const ExperimentConfig& config) {
  config.validate();

  std::optional<EntranceSampler> entrance;
  if (config.regime == Regime::kQ0) {
    entrance.emplace(config.family,
                     substream_seed(config.seed, kEntrancePoolStream),
                     /*pool_size=*/65536, /*ess_floor_fraction=*/0.1, config.dt);
  }
  const EntranceSampler* entrance_ptr = entrance ? &*entrance : nullptr;

  SampleMatrix m;
  m.t_grid = config.t_grid;
  m.rows.resize(static_cast<std::size_t>(config.replicas));

  int workers = config.workers > 0
                    ? config.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, config.replicas);

  std::atomic<int> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto work = [&]() {
    for (;;) {
      if (stop.load(std::memory_order_relaxed)) return;
      const int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= config.replicas) return;
      try {
        m.rows[static_cast<std::size_t>(i)] =
            run_replica(config, i, entrance_ptr);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        stop.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int k = 0; k < workers; ++k) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return m;
}

TestReport lln_check(const LevyFamily& family, double a,
                     const std::vector<double>& L_list, std::uint64_t seed,
                     double dt) {
  if (L_list.empty()) throw DomainError("lln_check: empty horizon list");
  for (std::size_t i = 1; i < L_list.size(); ++i) {
    if (!(L_list[i] > L_list[i - 1])) {
      throw DomainError("lln_check: horizons must be strictly increasing");
    }
  }
  if (!(a > 0.0)) throw DomainError("lln_check: start a must be positive");
  if (!path_simulable(family)) {
    throw DomainError("lln_check: family has no path simulator");
  }

  const double alpha = family.alpha;
  const Cumulants cum = cumulants_closed(family);
  const double target = 1.0 / (alpha * cum.p);
  RngStream rng(substream_seed(seed, 0));
  ExtensionPolicy policy;
  policy.p_hint = cum.p;
  LazyClock clock(family, alpha, rng, dt, policy);
  const double log_a = std::log(a);

  TestReport rep;
  rep.v2_target = cum.v2;
  for (double L : L_list) {
    const double value = clock.value_at_log_level(L - alpha * log_a);
    const double ratio = value / L;
    const double scale = std::sqrt(cum.v2 / L);
    CheckRow row;
    row.t = L;
    row.mean = ratio;
    row.var = 0.0;
    row.se = scale;
    row.target = target;
    row.pass = std::fabs(ratio - target) <= 5.0 * scale;
    rep.rows.push_back(row);
  }
  rep.overall_pass = rep.rows.back().pass;
  std::ostringstream note;
  note << "clock/L at L=" << fmt(L_list.back()) << ": " << fmt(rep.rows.back().mean)
       << " vs 1/(alpha p) = " << fmt(target) << ", tolerance "
       << fmt(5.0 * rep.rows.back().se);
  rep.notes.push_back(note.str());
  return rep;
}

TestReport clt_test(const std::vector<double>& w1_samples, double v2_target,
                    double log_T) {
  if (w1_samples.size() < 100) {
    throw DomainError("clt_test: need at least 100 samples");
  }
  TestReport rep;
  rep.v2_target = v2_target;

  const double mean = sample_mean(w1_samples);
  const double var = sample_variance(w1_samples);
  const double se = jackknife_se_variance(w1_samples);
  const double tolerance = 4.0 * se + 3.0 * v2_target / std::sqrt(log_T);
  const bool var_pass = std::fabs(var - v2_target) <= tolerance;

  // The KS check is location-free: the drift of the additive functional is
  // matched only to O(1), so the raw sample mean carries a Theta(L^{-1/2})
  // finite-horizon offset (for the test families, mean * sqrt(L) stays near a
  // nonzero constant as L grows).  At the pinned sample sizes a raw KS would
  // reject on that offset alone, while the shape is already Gaussian.  The
  // variance check above owns the scale verdict (with its own finite-horizon
  // allowance); here we remove the sample mean and test shape at scale v.
  const double v = std::sqrt(v2_target);
  std::vector<double> standardized(w1_samples);
  for (double& x : standardized) x = (x - mean) / v;
  const KsResult ks = ks_test(standardized, [](double x) { return normal_cdf(x); });
  const bool ks_pass = ks.p_value > 0.01;

  rep.ks_statistic = ks.statistic;
  rep.ks_p_value = ks.p_value;

  CheckRow row;
  row.t = 1.0;
  row.mean = mean;
  row.var = var;
  row.se = se;
  row.target = v2_target;
  row.pass = var_pass && ks_pass;
  rep.rows.push_back(row);

  {
    std::ostringstream note;
    note << "variance " << fmt(var) << " vs " << fmt(v2_target) << " +- "
         << fmt(tolerance) << " (4*SE + 3 v^2/sqrt(L)): "
         << (var_pass ? "pass" : "fail");
    rep.notes.push_back(note.str());
  }
  {
    std::ostringstream note;
    note << "KS of (W - mean)/v against standard normal: D = "
         << fmt(ks.statistic) << ", p = " << fmt(ks.p_value) << ": "
         << (ks_pass ? "pass" : "fail");
    rep.notes.push_back(note.str());
  }
  rep.overall_pass = var_pass && ks_pass;
  return rep;
}

TestReport fclt_covariance_test(const SampleMatrix& samples, double v2_target,
                                double log_T) {
  const std::size_t nt = samples.t_grid.size();
  if (samples.rows.size() < 1000) {
    throw DomainError("fclt_covariance_test: need at least 1000 replicas");
  }
  TestReport rep;
  rep.v2_target = v2_target;
  const double sqrt_L = std::sqrt(log_T);

  std::vector<std::vector<double>> cols(nt);
  for (std::size_t j = 0; j < nt; ++j) cols[j] = samples.column(j);

  rep.covariance.assign(nt, std::vector<double>(nt, 0.0));
  bool pairs_pass = true;
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = i; j < nt; ++j) {
      const double cov = sample_covariance(cols[i], cols[j]);
      rep.covariance[i][j] = cov;
      rep.covariance[j][i] = cov;
      if (j == i) continue;
      const double cov_target =
          v2_target * std::min(samples.t_grid[i], samples.t_grid[j]);
      const double se = jackknife_se_covariance(cols[i], cols[j]);
      const bool ok = std::fabs(cov - cov_target) <= 4.0 * se;
      pairs_pass = pairs_pass && ok;
      std::ostringstream note;
      note << "Cov(W(" << fmt(samples.t_grid[i]) << "), W("
           << fmt(samples.t_grid[j]) << ")) = " << fmt(cov) << " vs "
           << fmt(cov_target) << " +- " << fmt(4.0 * se) << ": "
           << (ok ? "pass" : "fail");
      rep.notes.push_back(note.str());
    }
  }

  for (std::size_t j = 0; j < nt; ++j) {
    const double t = samples.t_grid[j];
    CheckRow row;
    row.t = t;
    row.mean = sample_mean(cols[j]);
    row.var = rep.covariance[j][j];
    row.se = jackknife_se_variance(cols[j]);
    row.target = v2_target * t;
    row.pass = std::fabs(row.var - row.target) <=
               4.0 * row.se + 3.0 * row.target / sqrt_L;
    rep.rows.push_back(row);
  }
  const bool diag_pass = std::all_of(rep.rows.begin(), rep.rows.end(),
                                     [](const CheckRow& r) { return r.pass; });

  bool incr_pass = true;
  const int i1 = samples.find_t(1.0);
  const int i2 = samples.find_t(2.0);
  if (i1 >= 0 && i2 >= 0) {
    std::vector<double> incr(samples.rows.size());
    for (std::size_t r = 0; r < samples.rows.size(); ++r) {
      incr[r] = samples.rows[r][static_cast<std::size_t>(i2)] -
                samples.rows[r][static_cast<std::size_t>(i1)];
    }
    // Same location-free convention as clt_test: test the increment's shape
    // at scale v after removing its Theta(L^{-1/2}) sample mean.
    const double v = std::sqrt(v2_target);
    const double incr_mean = sample_mean(incr);
    for (double& x : incr) x = (x - incr_mean) / v;
    const KsResult ks = ks_test(incr, [](double x) { return normal_cdf(x); });
    rep.ks_statistic = ks.statistic;
    rep.ks_p_value = ks.p_value;
    incr_pass = ks.p_value > 0.01;
    std::ostringstream note;
    note << "KS of mean-centered (W(2)-W(1))/v against standard normal: D = "
         << fmt(ks.statistic) << ", p = " << fmt(ks.p_value) << ": "
         << (incr_pass ? "pass" : "fail");
    rep.notes.push_back(note.str());
  } else {
    rep.notes.emplace_back(
        "increment Gaussianity skipped: t_grid lacks 1.0 and 2.0");
  }

  rep.overall_pass = pairs_pass && diag_pass && incr_pass;
  return rep;
}

}  // namespace clocksim
