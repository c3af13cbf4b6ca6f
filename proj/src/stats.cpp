#include "clocksim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace clocksim {

namespace {

struct Sums {
  double n = 0.0, s1 = 0.0, s2 = 0.0;
};

Sums sums_of(const std::vector<double>& x) {
  Sums s;
  s.n = static_cast<double>(x.size());
  for (double v : x) {
    s.s1 += v;
    s.s2 += v * v;
  }
  return s;
}

double ks_lambda(double d, double effective_n) {
  const double en = std::sqrt(effective_n);
  return (en + 0.12 + 0.11 / en) * d;
}

}  // namespace

double sample_mean(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("sample_mean: empty sample");
  const Sums s = sums_of(x);
  return s.s1 / s.n;
}

double sample_variance(const std::vector<double>& x) {
  if (x.size() < 2) throw std::invalid_argument("sample_variance: need n >= 2");
  const double mu = sample_mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - mu) * (v - mu);
  return acc / (static_cast<double>(x.size()) - 1.0);
}

double sample_covariance(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("sample_covariance: need matching n >= 2");
  }
  const double mx = sample_mean(x), my = sample_mean(y);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - mx) * (y[i] - my);
  return acc / (static_cast<double>(x.size()) - 1.0);
}

double jackknife_se_variance(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("jackknife_se_variance: need n >= 3");
  const Sums s = sums_of(x);
  const double np = s.n - 1.0;
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s1 = s.s1 - x[i];
    const double s2 = s.s2 - x[i] * x[i];
    loo[i] = (s2 - s1 * s1 / np) / (np - 1.0);
  }
  const double mu = sample_mean(loo);
  double acc = 0.0;
  for (double v : loo) acc += (v - mu) * (v - mu);
  return std::sqrt(np / s.n * acc);
}

double jackknife_se_covariance(const std::vector<double>& x,
                               const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (y.size() != n || n < 3) {
    throw std::invalid_argument("jackknife_se_covariance: need matching n >= 3");
  }
  double s1x = 0.0, s1y = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s1x += x[i];
    s1y += y[i];
    sxy += x[i] * y[i];
  }
  const double np = static_cast<double>(n) - 1.0;
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = s1x - x[i];
    const double ay = s1y - y[i];
    const double axy = sxy - x[i] * y[i];
    loo[i] = (axy - ax * ay / np) / (np - 1.0);
  }
  const double mu = sample_mean(loo);
  double acc = 0.0;
  for (double v : loo) acc += (v - mu) * (v - mu);
  return std::sqrt(np / static_cast<double>(n) * acc);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double kolmogorov_p(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // P(K <= l) = sqrt(2 pi)/l * sum_{k odd} exp(-k^2 pi^2 / (8 l^2))
    const double y = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    const double cdf = std::sqrt(2.0 * std::numbers::pi) / lambda *
                       (std::exp(-y) + std::exp(-9.0 * y) + std::exp(-25.0 * y) +
                        std::exp(-49.0 * y));
    return std::max(0.0, std::min(1.0, 1.0 - cdf));
  }
  const double e = std::exp(-2.0 * lambda * lambda);
  double term = e, sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double sgn = (j % 2 == 1) ? 1.0 : -1.0;
    term = std::pow(e, static_cast<double>(j) * j);
    sum += sgn * term;
    if (term < 1e-18) break;
  }
  return std::max(0.0, std::min(1.0, 2.0 * sum));
}

KsResult ks_test(const std::vector<double>& x,
                 const std::function<double(double)>& cdf) {
  if (x.empty()) throw std::invalid_argument("ks_test: empty sample");
  std::vector<double> s(x);
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, std::fabs(f - lo), std::fabs(f - hi)});
  }
  KsResult r;
  r.statistic = d;
  r.p_value = kolmogorov_p(ks_lambda(d, n));
  return r;
}

KsResult ks_test_two_sample(const std::vector<double>& x,
                            const std::vector<double>& y) {
  if (x.empty() || y.empty()) {
    throw std::invalid_argument("ks_test_two_sample: empty sample");
  }
  std::vector<double> a(x), b(y);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double va = a[i], vb = b[j];
    if (va <= vb) ++i;
    if (vb <= va) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  r.p_value = kolmogorov_p(ks_lambda(d, na * nb / (na + nb)));
  return r;
}

}  // namespace clocksim
