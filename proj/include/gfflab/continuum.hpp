#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "gfflab/rng.hpp"
#include "gfflab/stats.hpp"

namespace gfflab {

/// Dirichlet GFF on the unit square as a truncated eigenfunction series:
/// Gamma = sum N_m phi_m / sqrt(lambda_m), 1 <= m1, m2 <= M, with
/// phi_m(x) = 2 sin(pi m1 x1) sin(pi m2 x2) and lambda_m = pi^2 (m1^2 + m2^2).
struct SpectralField {
  int M = 0;
  std::vector<double> coeff;  // N_{m1,m2} at (m1-1) * M + (m2-1)

  double value(double x1, double x2) const;
  double operator()(std::complex<double> z) const { return value(z.real(), z.imag()); }
};

double eigenvalue(int m1, int m2);
double eigenfunction(int m1, int m2, double x1, double x2);

SpectralField sample_spectral(int M, Engine& rng);
SpectralField sample_spectral(int M, std::uint64_t seed);
SpectralField negate(const SpectralField& field);

using TestFunction = std::function<double(double, double)>;

/// Mode projections <f, phi_m> by tensor Gauss-Legendre quadrature with
/// `nodes` points per axis, divided by sqrt(lambda_m). Throws
/// std::invalid_argument if nodes < 2 M (the top modes would be unresolved).
std::vector<double> mode_weights(const TestFunction& f, int M, int nodes);

/// Gamma(f) for precomputed mode weights.
double evaluate(const SpectralField& field, const std::vector<double>& weights);
double evaluate(const SpectralField& field, const TestFunction& f, int nodes);

/// sum over modes of weight^2: the variance of Gamma(f) at cutoff M.
double truncated_variance(const std::vector<double>& weights);

/// Weights phi_m(z) J0(sqrt(lambda_m) r) / sqrt(lambda_m), so that
/// gamma(z, r) = evaluate(field, weights). Throws std::domain_error if the
/// disc leaves the square.
std::vector<double> circle_weights(int M, std::complex<double> z, double r);
double circle_average(const SpectralField& field, std::complex<double> z, double r);
/// Trapezoid rule on `points` equally spaced points of the circle.
double circle_average_quadrature(const SpectralField& field, std::complex<double> z, double r, int points = 512);
/// Exact covariance of two circle averages at cutoff M.
double circle_covariance(int M, std::complex<double> z, double r, std::complex<double> w, double s);

/// Increment variance E[(gamma(z,r_{k+1}) - gamma(z,r_k))^2] divided by
/// log(r_k / r_{k+1}) along a decreasing ladder, from the mode sum.
struct LogLinearity {
  std::vector<double> constants;
  double mean_constant = 0.0;
  double max_relative_spread = 0.0;
  TestReport report;
};
LogLinearity circle_log_linearity(int M, std::complex<double> z, const std::vector<double>& radii,
                                  double tolerance = 0.1);

/// Monte Carlo checks on increments of circle averages over a decreasing
/// radius ladder at two well-separated centres: zero means, variances
/// against the exact truncated values, no correlation across disjoint
/// annuli or across centres.
std::vector<TestReport> brownian_structure_check(int M, std::complex<double> z, std::complex<double> w,
                                                 const std::vector<double>& radii, std::size_t replicas,
                                                 std::uint64_t seed, double sigma = 4.0);

/// Cell masses at dyadic level n: 2^n x 2^n cells of side 2^-n, each with
/// mass area * exp(g A - g^2 a / 2) where A is the circle average of
/// sqrt(2 pi) Gamma of radius 2^-(n+1) at the cell centre and a = Var A.
struct LqgMeasure {
  double gamma = 0.0;
  int level = 0;
  std::vector<double> masses;  // cell (i, j) at i * 2^n + j, i along x1
  double total() const;
};

/// Circle averages at all cell centres of several dyadic levels for one
/// fixed cutoff M. Tables are shared by every field passed in.
class LqgEngine {
 public:
  LqgEngine(int M, std::vector<int> levels);
  int cutoff() const { return M_; }
  const std::vector<int>& levels() const { return levels_; }
  /// A(z, r) for every cell of levels()[k] (already multiplied by sqrt(2 pi)).
  Eigen::MatrixXd circle_averages(const SpectralField& field, std::size_t k) const;
  /// a(z, r) for every cell of levels()[k].
  const Eigen::MatrixXd& variances(std::size_t k) const { return variance_[k]; }
  LqgMeasure cells(const SpectralField& field, double gamma, std::size_t k) const;
  LqgMeasure cells_from(const Eigen::MatrixXd& averages, double gamma, std::size_t k) const;

 private:
  int M_;
  std::vector<int> levels_;
  std::vector<std::vector<double>> radial_;   // J0(sqrt(lambda) r) / sqrt(lambda) per mode
  std::vector<Eigen::MatrixXd> sin_;          // sin(pi m x_i), K x K
  std::vector<Eigen::MatrixXd> variance_;
};

/// Cutoff used for levels up to n: 2^(n+2).
int lqg_cutoff(int max_level);

LqgMeasure lqg_cells(const SpectralField& field, double gamma, int level);

struct LqgReport {
  std::vector<double> gammas;
  std::vector<int> levels;
  /// totals[g][l][r] for gamma g, level l, replica r.
  std::vector<std::vector<std::vector<double>>> totals;
  std::vector<TestReport> reports;
};

/// E[total] = 1 at every level for gamma < 2 (4 sigma) and the degeneracy
/// ratio median(total at the last level) / median(total at the first level)
/// below `degeneracy_threshold` for gamma >= 2.
LqgReport lqg_report(const std::vector<double>& gammas, const std::vector<int>& levels, std::size_t replicas,
                     std::uint64_t seed, double sigma = 4.0, double degeneracy_threshold = 0.2);

/// Total mass law under N -> -N: two-sample KS between independent batches.
TestReport lqg_sign_flip_check(double gamma, int level, std::size_t replicas, std::uint64_t seed, double sigma = 4.0);

double median(std::vector<double> v);

}  // namespace gfflab
