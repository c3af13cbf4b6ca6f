// Sample statistics used by the verification harness: moments, jackknife
// standard errors for variance/covariance estimates, and Kolmogorov-Smirnov
// tests with the asymptotic Kolmogorov p-value.

#pragma once

#include <functional>
#include <vector>

namespace clocksim {

double sample_mean(const std::vector<double>& x);

// Unbiased (n-1 denominator).
double sample_variance(const std::vector<double>& x);

double sample_covariance(const std::vector<double>& x, const std::vector<double>& y);

// Jackknife standard error of the unbiased sample variance (leave-one-out).
double jackknife_se_variance(const std::vector<double>& x);

// Jackknife standard error of the sample covariance.
double jackknife_se_covariance(const std::vector<double>& x,
                               const std::vector<double>& y);

double normal_cdf(double x);

// Survival function of the Kolmogorov distribution, P(K > lambda); two-series
// evaluation so both tails are accurate.
double kolmogorov_p(double lambda);

struct KsResult {
  double statistic = 0.0;  // sup-norm distance D
  double p_value = 1.0;    // asymptotic, with the standard effective-n argument
};

// One-sample KS of x against a continuous CDF.
KsResult ks_test(const std::vector<double>& x,
                 const std::function<double(double)>& cdf);

// Two-sample KS.
KsResult ks_test_two_sample(const std::vector<double>& x,
                            const std::vector<double>& y);

}  // namespace clocksim
