#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gfflab {

/// Outcome of one statistical or identity check. pass <=> statistic <= threshold.
struct TestReport {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::size_t sample_size = 0;
  std::string anchor;  // the exact law being checked, stated as a formula
  nlohmann::json detail = nlohmann::json::object();
};

void to_json(nlohmann::json& j, const TestReport& r);

/// Builds a report and sets pass from statistic <= threshold.
TestReport make_report(std::string name, double statistic, double threshold,
                       std::size_t n, std::string anchor);

struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

MeanEstimate estimate_mean(std::span<const double> samples);

/// Two-sided Gaussian tail probability of a `sigma`-standard-deviation event.
double sigma_tail_probability(double sigma);

/// Kolmogorov limiting survival function P(sqrt(n) D_n > x).
double kolmogorov_survival(double x);

/// Critical value x with kolmogorov_survival(x) equal to the sigma tail.
double kolmogorov_threshold(double sigma);

/// One-sample KS test. Statistic is sqrt(n) * sup |F_n - F|.
TestReport ks_test(std::string name, std::vector<double> samples,
                   const std::function<double(double)>& cdf, double sigma = 4.0);

/// Two-sample KS test. Statistic is sqrt(n m / (n + m)) * sup |F_n - G_m|.
TestReport ks_two_sample(std::string name, std::vector<double> a, std::vector<double> b,
                         double sigma = 4.0);

/// Pearson chi-square on counts vs expected counts. Cells with expected
/// count below `min_expected` are pooled into one cell. Observed counts in
/// cells with zero expectation fail the test outright.
TestReport chi2_test(std::string name, std::span<const double> observed,
                     std::span<const double> expected, double sigma = 4.0,
                     double min_expected = 5.0);

/// |estimate - target| / stderr compared against sigma.
TestReport moment_test(std::string name, const MeanEstimate& estimate, double target,
                       double sigma = 4.0);

/// Indicator mean against a known probability p0, with the stderr
/// sqrt(p0 (1 - p0) / n) of the null hypothesis. The sample stderr shrinks
/// as the estimate drifts toward 0 or 1 and overstates the evidence there.
TestReport proportion_test(std::string name, const MeanEstimate& estimate, double p0, double sigma = 4.0);

/// Same, with an extra absolute allowance added to sigma * stderr.
TestReport moment_test_with_bias(std::string name, const MeanEstimate& estimate,
                                 double target, double bias_allowance, double sigma = 4.0);

/// Homogeneity test of two count histograms over the same cells. Cells whose
/// combined count is below `min_count` are pooled.
TestReport chi2_two_sample(std::string name, std::span<const double> a, std::span<const double> b,
                           double sigma = 4.0, double min_count = 10.0);

/// |mean_a - mean_b| / sqrt(se_a^2 + se_b^2) against sigma.
TestReport two_sample_mean_test(std::string name, const MeanEstimate& a, const MeanEstimate& b,
                                double sigma = 4.0);

/// Estimate of a product moment E[XY] from paired samples.
MeanEstimate estimate_product_mean(std::span<const double> x, std::span<const double> y);

/// Pearson correlation with a Fisher-style stderr of 1/sqrt(n-3) on atanh(r).
struct CorrelationEstimate {
  double r = 0.0;
  double z = 0.0;  // atanh(r) * sqrt(n - 3)
  std::size_t n = 0;
};
CorrelationEstimate estimate_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace gfflab
