#include <cmath>
#include <vector>

#include "doctest.h"

#include "clocksim/errors.hpp"
#include "clocksim/exp_functional.hpp"
#include "clocksim/harness.hpp"
#include "clocksim/levy_family.hpp"
#include "clocksim/path.hpp"
#include "clocksim/rng.hpp"
#include "clocksim/stats.hpp"

using namespace clocksim;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig config;
  config.family = make_family(CpNegDrift{3.0, 1.0});
  config.regime = Regime::kQa;
  config.a = 1.0;
  config.log_T = 50.0;
  config.t_grid = {0.0, 0.5, 1.0};
  config.replicas = 24;
  config.seed = 20240601;
  return config;
}

}  // namespace

TEST_CASE("config validation rejects malformed experiments") {
  ExperimentConfig config = small_config();
  CHECK_NOTHROW(config.validate());
  config.replicas = 0;
  CHECK_THROWS_AS(config.validate(), DomainError);
  config = small_config();
  config.log_T = -1.0;
  CHECK_THROWS_AS(config.validate(), DomainError);
  config = small_config();
  config.t_grid.clear();
  CHECK_THROWS_AS(config.validate(), DomainError);
  config = small_config();
  config.t_grid = {0.5, -0.25};
  CHECK_THROWS_AS(config.validate(), DomainError);
  config = small_config();
  config.a = 0.0;
  CHECK_THROWS_AS(config.validate(), DomainError);
  config = small_config();
  config.dt = 0.0;
  CHECK_THROWS_AS(config.validate(), DomainError);
  config = small_config();
  config.workers = -1;
  CHECK_THROWS_AS(config.validate(), DomainError);
}

TEST_CASE("sample matrix helpers") {
  SampleMatrix m;
  m.t_grid = {0.25, 1.0, 2.0};
  m.rows = {{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}};
  CHECK(m.find_t(1.0) == 1);
  CHECK(m.find_t(0.75) == -1);
  const auto col = m.column(2);
  REQUIRE(col.size() == 2);
  CHECK(col[0] == 3.0);
  CHECK(col[1] == 6.0);
}

TEST_CASE("experiment results are bitwise independent of worker count") {
  for (Regime regime : {Regime::kQa, Regime::kQ0}) {
    CAPTURE(regime_name(regime));
    ExperimentConfig config = small_config();
    config.family = make_family(SawTooth{1.0, 2.0});
    config.regime = regime;

    config.workers = 1;
    const SampleMatrix serial = run_experiment(config);
    config.workers = 3;
    const SampleMatrix pooled = run_experiment(config);

    REQUIRE(serial.rows.size() == pooled.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
      REQUIRE(serial.rows[i].size() == pooled.rows[i].size());
      for (std::size_t j = 0; j < serial.rows[i].size(); ++j) {
        CHECK(serial.rows[i][j] == pooled.rows[i][j]);  // exact, not approx
      }
    }
  }
}

TEST_CASE("replicas are reproducible one-by-one from the master seed") {
  const ExperimentConfig config = small_config();
  const SampleMatrix matrix = run_experiment(config);
  for (int i : {0, 7, 23}) {
    const auto row = run_replica(config, i, nullptr);
    REQUIRE(row.size() == matrix.rows[i].size());
    for (std::size_t j = 0; j < row.size(); ++j) CHECK(row[j] == matrix.rows[i][j]);
  }
}

TEST_CASE("rescaled clock starts at zero in the fixed-start regime") {
  const ExperimentConfig config = small_config();
  const SampleMatrix matrix = run_experiment(config);
  REQUIRE(matrix.t_grid[0] == 0.0);
  for (const auto& row : matrix.rows) CHECK(row[0] == 0.0);
}

TEST_CASE("centering is right at depth L=400") {
  ExperimentConfig config;
  config.family = make_family(CpNegDrift{3.0, 1.0});  // v2 = 0.75
  config.log_T = 400.0;
  config.t_grid = {1.0};
  config.replicas = 600;
  config.seed = 5150;
  const SampleMatrix matrix = run_experiment(config);
  const auto w1 = matrix.column(0);
  const double se = std::sqrt(sample_variance(w1) / w1.size());
  CHECK(std::fabs(sample_mean(w1)) <= 4.0 * se);
  CHECK(sample_variance(w1) == doctest::Approx(0.75).epsilon(0.35));
}

TEST_CASE("start level only shifts the clock by a vanishing correction") {
  // W_T under a = 1 and a = e must agree in law up to O(L^-1/2).
  ExperimentConfig config;
  config.family = make_family(CpNegDrift{3.0, 1.0});
  config.log_T = 400.0;
  config.t_grid = {1.0};
  config.replicas = 600;
  config.seed = 31007;
  const auto w_a1 = run_experiment(config).column(0);
  config.a = std::exp(1.0);
  config.seed = 31008;
  const auto w_ae = run_experiment(config).column(0);
  CHECK(ks_test_two_sample(w_a1, w_ae).p_value > 0.01);
}

TEST_CASE("entrance regime matches the fixed-start regime in law") {
  ExperimentConfig config;
  config.family = make_family(SawTooth{1.0, 2.0});  // v2 = 4
  config.log_T = 400.0;
  config.t_grid = {1.0};
  config.replicas = 500;
  config.seed = 8080;
  config.regime = Regime::kQa;
  const auto w_qa = run_experiment(config).column(0);
  config.regime = Regime::kQ0;
  config.seed = 8081;
  const auto w_q0 = run_experiment(config).column(0);
  CHECK(ks_test_two_sample(w_qa, w_q0).p_value > 0.01);
  // Both distributions center near zero with variance near v^2 = 4.
  CHECK(std::fabs(sample_mean(w_q0)) <=
        4.0 * std::sqrt(sample_variance(w_q0) / w_q0.size()));
  CHECK(sample_variance(w_q0) == doctest::Approx(4.0).epsilon(0.35));
}

TEST_CASE("replica dump exposes the underlying path") {
  const ExperimentConfig config = small_config();
  PiecewiseLinearPath path;
  (void)run_replica(config, 0, nullptr, &path);
  CHECK(path.horizon() > 0.0);
  CHECK(path.segment_count() > 0);
  // The path reaches at least the Levy time needed for the deepest level:
  // tau(exp(L t_max)) ~ L t_max/(alpha p) = 50/2.
  CHECK(path.horizon() >= 0.5 * 50.0 / 2.0);
}

TEST_CASE("single-path long-horizon average converges at CLT scale") {
  const auto fam = make_family(CpNegDrift{3.0, 1.0});
  const std::vector<double> levels = {10.0, 100.0, 1000.0};
  const auto report = lln_check(fam, 1.0, levels, 424242);
  REQUIRE(report.rows.size() == levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    CHECK(report.rows[i].t == levels[i]);
    CHECK(report.rows[i].target == doctest::Approx(0.5));  // 1/(alpha p)
  }
  // Verdict taken at the deepest horizon.
  CHECK(report.overall_pass == report.rows.back().pass);
  CHECK(report.rows.back().pass);
  const double dev = std::fabs(report.rows.back().mean - 0.5);
  CHECK(dev <= 5.0 * std::sqrt(0.75 / 1000.0));
}

TEST_CASE("marginal test calibration on synthetic samples") {
  const double v2 = 0.5;
  const double log_T = 400.0;
  RngStream rng(1212);
  const int n = 4000;
  std::vector<double> good(n), inflated(n), uniformish(n);
  for (int i = 0; i < n; ++i) {
    good[i] = std::sqrt(v2) * rng.normal();
    inflated[i] = std::sqrt(2.0 * v2) * rng.normal();
    uniformish[i] = std::sqrt(3.0 * v2) * (2.0 * rng.u01() - 1.0);
  }
  const auto ok = clt_test(good, v2, log_T);
  CHECK(ok.all_pass());
  CHECK(ok.v2_target == v2);
  REQUIRE(ok.rows.size() == 1);
  CHECK(ok.rows[0].t == 1.0);
  CHECK(ok.ks_p_value > 0.01);

  CHECK_FALSE(clt_test(inflated, v2, log_T).all_pass());
  CHECK_FALSE(clt_test(uniformish, v2, log_T).all_pass());

  std::vector<double> too_few(good.begin(), good.begin() + 50);
  CHECK_THROWS_AS((void)clt_test(too_few, v2, log_T), DomainError);
}

TEST_CASE("covariance test calibration on synthetic Brownian samples") {
  const double v2 = 2.0;
  const double log_T = 400.0;
  const std::vector<double> grid = {0.5, 1.0, 2.0};
  RngStream rng(77);
  const int n = 1500;

  SampleMatrix brownian, degenerate;
  brownian.t_grid = grid;
  degenerate.t_grid = grid;
  for (int i = 0; i < n; ++i) {
    // Exact scaled Brownian motion on the grid.
    double w = 0.0, prev_t = 0.0;
    RescaledClockPath row;
    for (double t : grid) {
      w += std::sqrt(v2 * (t - prev_t)) * rng.normal();
      prev_t = t;
      row.push_back(w);
    }
    brownian.rows.push_back(row);
    // Same marginal variances, wrong joint law: one shared Gaussian factor.
    const double z = rng.normal();
    degenerate.rows.push_back(
        {std::sqrt(v2 * 0.5) * z, std::sqrt(v2) * z, std::sqrt(v2 * 2.0) * z});
  }

  const auto ok = fclt_covariance_test(brownian, v2, log_T);
  CHECK(ok.all_pass());
  REQUIRE(ok.covariance.size() == grid.size());
  CHECK(ok.covariance[0][2] == doctest::Approx(v2 * 0.5).epsilon(0.2));
  CHECK(ok.ks_p_value > 0.01);  // increment W(2) - W(1)

  const auto bad = fclt_covariance_test(degenerate, v2, log_T);
  CHECK_FALSE(bad.all_pass());
}
