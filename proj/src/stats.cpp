#include "gfflab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/erf.hpp>

namespace gfflab {

void to_json(nlohmann::json& j, const TestReport& r) {
  j = nlohmann::json{{"name", r.name},
                     {"statistic", r.statistic},
                     {"threshold", r.threshold},
                     {"pass", r.pass},
                     {"sample_size", r.sample_size},
                     {"anchor", r.anchor},
                     {"detail", r.detail}};
}

TestReport make_report(std::string name, double statistic, double threshold, std::size_t n,
                       std::string anchor) {
  TestReport r;
  r.name = std::move(name);
  r.statistic = statistic;
  r.threshold = threshold;
  r.pass = std::isfinite(statistic) && statistic <= threshold;
  r.sample_size = n;
  r.anchor = std::move(anchor);
  return r;
}

MeanEstimate estimate_mean(std::span<const double> samples) {
  MeanEstimate e;
  e.n = samples.size();
  if (e.n == 0) return e;
  // Welford
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double x : samples) {
    ++k;
    double d = x - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (x - mean);
  }
  e.mean = mean;
  e.stderr_ = e.n > 1 ? std::sqrt(m2 / static_cast<double>(e.n - 1) / static_cast<double>(e.n)) : 0.0;
  return e;
}

MeanEstimate estimate_product_mean(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("estimate_product_mean: size mismatch");
  std::vector<double> prod(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) prod[i] = x[i] * y[i];
  return estimate_mean(prod);
}

CorrelationEstimate estimate_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 4)
    throw std::invalid_argument("estimate_correlation: need >= 4 paired samples");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  CorrelationEstimate c;
  c.n = x.size();
  c.r = sxy / std::sqrt(sxx * syy);
  c.z = std::atanh(std::clamp(c.r, -0.999999, 0.999999)) * std::sqrt(n - 3.0);
  return c;
}

double sigma_tail_probability(double sigma) {
  return boost::math::erfc(sigma / std::sqrt(2.0));
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;  // series is 1 to double precision here
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double kolmogorov_threshold(double sigma) {
  const double p = sigma_tail_probability(sigma);
  double lo = 0.2, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (kolmogorov_survival(mid) > p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

TestReport ks_test(std::string name, std::vector<double> samples,
                   const std::function<double(double)>& cdf, double sigma) {
  if (samples.size() < 2) throw std::invalid_argument("ks_test: need samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n),
                  std::abs(static_cast<double>(i + 1) / n - f)});
  }
  auto r = make_report(std::move(name), std::sqrt(n) * d, kolmogorov_threshold(sigma),
                       samples.size(), "one-sample Kolmogorov-Smirnov");
  r.detail["D"] = d;
  return r;
}

TestReport ks_two_sample(std::string name, std::vector<double> a, std::vector<double> b,
                         double sigma) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("ks_two_sample: need samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double scale = std::sqrt(na * nb / (na + nb));
  auto r = make_report(std::move(name), scale * d, kolmogorov_threshold(sigma), a.size() + b.size(),
                       "two-sample Kolmogorov-Smirnov");
  r.detail["D"] = d;
  return r;
}

TestReport chi2_test(std::string name, std::span<const double> observed,
                     std::span<const double> expected, double sigma, double min_expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi2_test: size mismatch");
  double stat = 0.0, pooled_obs = 0.0, pooled_exp = 0.0, total = 0.0;
  int cells = 0;
  bool impossible = false;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    total += observed[i];
    if (expected[i] <= 0.0) {
      if (observed[i] > 0.0) impossible = true;
      continue;
    }
    if (expected[i] < min_expected) {
      pooled_obs += observed[i];
      pooled_exp += expected[i];
      continue;
    }
    stat += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
    ++cells;
  }
  if (pooled_exp > 0.0) {
    stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  }
  int dof = std::max(1, cells - 1);
  boost::math::chi_squared dist(dof);
  double threshold = boost::math::quantile(boost::math::complement(dist, sigma_tail_probability(sigma)));
  if (cells <= 1) threshold = std::numeric_limits<double>::infinity();
  if (impossible) stat = std::numeric_limits<double>::infinity();
  auto r = make_report(std::move(name), stat, threshold, static_cast<std::size_t>(total),
                       "Pearson chi-square");
  r.detail["dof"] = dof;
  r.detail["impossible_cell_observed"] = impossible;
  return r;
}

TestReport chi2_two_sample(std::string name, std::span<const double> a, std::span<const double> b,
                           double sigma, double min_count) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("chi2_two_sample: size mismatch");
  double na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a[i];
    nb += b[i];
  }
  if (na <= 0 || nb <= 0) throw std::invalid_argument("chi2_two_sample: empty sample");
  const double ka = std::sqrt(nb / na), kb = std::sqrt(na / nb);
  double stat = 0.0, pa = 0.0, pb = 0.0;
  int cells = 0;
  auto add = [&](double x, double y) {
    if (x + y <= 0) return;
    stat += (ka * x - kb * y) * (ka * x - kb * y) / (x + y);
    ++cells;
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] + b[i] < min_count) {
      pa += a[i];
      pb += b[i];
    } else {
      add(a[i], b[i]);
    }
  }
  add(pa, pb);
  int dof = std::max(1, cells - 1);
  boost::math::chi_squared dist(dof);
  double threshold = boost::math::quantile(boost::math::complement(dist, sigma_tail_probability(sigma)));
  if (cells <= 1) threshold = std::numeric_limits<double>::infinity();
  auto r = make_report(std::move(name), stat, threshold, static_cast<std::size_t>(na + nb),
                       "two-sample chi-square homogeneity");
  r.detail["dof"] = dof;
  return r;
}

TestReport two_sample_mean_test(std::string name, const MeanEstimate& a, const MeanEstimate& b, double sigma) {
  double se = std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_);
  double dev = std::abs(a.mean - b.mean);
  double stat = se > 0 ? dev / se : (dev == 0 ? 0.0 : std::numeric_limits<double>::infinity());
  auto r = make_report(std::move(name), stat, sigma, a.n + b.n, "two-sample mean");
  r.detail["mean_a"] = a.mean;
  r.detail["mean_b"] = b.mean;
  r.detail["stderr"] = se;
  return r;
}

TestReport moment_test(std::string name, const MeanEstimate& estimate, double target, double sigma) {
  return moment_test_with_bias(std::move(name), estimate, target, 0.0, sigma);
}

TestReport proportion_test(std::string name, const MeanEstimate& estimate, double p0, double sigma) {
  MeanEstimate null = estimate;
  null.stderr_ = std::sqrt(p0 * (1.0 - p0) / static_cast<double>(estimate.n));
  auto rep = moment_test_with_bias(std::move(name), null, p0, 0.0, sigma);
  rep.detail["sample_stderr"] = estimate.stderr_;
  return rep;
}

TestReport moment_test_with_bias(std::string name, const MeanEstimate& estimate, double target,
                                 double bias_allowance, double sigma) {
  // Statistic expressed in units of stderr; the allowance widens the band.
  double dev = std::abs(estimate.mean - target);
  double stat, threshold;
  if (estimate.stderr_ > 0.0) {
    stat = dev / estimate.stderr_;
    threshold = sigma + bias_allowance / estimate.stderr_;
  } else {
    stat = dev;
    threshold = bias_allowance + 1e-12 * std::max(1.0, std::abs(target));
  }
  auto r = make_report(std::move(name), stat, threshold, estimate.n, "moment");
  r.detail["estimate"] = estimate.mean;
  r.detail["stderr"] = estimate.stderr_;
  r.detail["target"] = target;
  return r;
}

}  // namespace gfflab
