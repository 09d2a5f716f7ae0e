#include "gfflab/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "gfflab/quadrature.hpp"

namespace gfflab {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t mode_index(int M, int m1, int m2) {
  return static_cast<std::size_t>(m1 - 1) * static_cast<std::size_t>(M) + static_cast<std::size_t>(m2 - 1);
}

std::string point_label(std::complex<double> z) {
  return "(" + std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")";
}

// sin(pi m (i + 1/2) / K) only depends on m modulo 4K, flips sign under
// m -> m + 2K and is symmetric under m -> 2K - m. Returns the folded
// index in 1..K (0 if the value vanishes) and writes the sign.
int fold_sin(int m, int K, int& sign) {
  int q = m % (4 * K);
  sign = 1;
  if (q >= 2 * K) {
    q -= 2 * K;
    sign = -1;
  }
  if (q > K) q = 2 * K - q;
  return q;
}

// Same for sin^2: period 2K, no sign.
int fold_sin2(int m, int K) {
  int q = m % (2 * K);
  if (q > K) q = 2 * K - q;
  return q;
}

}  // namespace

double eigenvalue(int m1, int m2) { return kPi * kPi * (static_cast<double>(m1) * m1 + static_cast<double>(m2) * m2); }

double eigenfunction(int m1, int m2, double x1, double x2) {
  return 2.0 * std::sin(kPi * m1 * x1) * std::sin(kPi * m2 * x2);
}

double SpectralField::value(double x1, double x2) const {
  std::vector<double> s1(M), s2(M);
  for (int m = 1; m <= M; ++m) {
    s1[m - 1] = std::sin(kPi * m * x1);
    s2[m - 1] = std::sin(kPi * m * x2);
  }
  double acc = 0.0;
  for (int m1 = 1; m1 <= M; ++m1)
    for (int m2 = 1; m2 <= M; ++m2)
      acc += coeff[mode_index(M, m1, m2)] * 2.0 * s1[m1 - 1] * s2[m2 - 1] / std::sqrt(eigenvalue(m1, m2));
  return acc;
}

SpectralField sample_spectral(int M, Engine& rng) {
  if (M < 1) throw std::invalid_argument("sample_spectral: need M >= 1");
  SpectralField f;
  f.M = M;
  f.coeff.resize(static_cast<std::size_t>(M) * M);
  for (double& c : f.coeff) c = standard_normal(rng);
  return f;
}

SpectralField sample_spectral(int M, std::uint64_t seed) {
  Engine rng = make_engine(seed, 0);
  return sample_spectral(M, rng);
}

SpectralField negate(const SpectralField& field) {
  SpectralField out = field;
  for (double& c : out.coeff) c = -c;
  return out;
}

std::vector<double> mode_weights(const TestFunction& f, int M, int nodes) {
  if (M < 1) throw std::invalid_argument("mode_weights: need M >= 1");
  if (nodes < 2 * M) throw std::invalid_argument("mode_weights: quadrature resolution insufficient (nodes < 2M)");
  GaussRule rule = gauss_legendre(nodes, 0.0, 1.0);
  Eigen::MatrixXd F(nodes, nodes), S(M, nodes);
  for (int a = 0; a < nodes; ++a)
    for (int b = 0; b < nodes; ++b) F(a, b) = rule.w[a] * rule.w[b] * f(rule.x[a], rule.x[b]);
  for (int m = 1; m <= M; ++m)
    for (int a = 0; a < nodes; ++a) S(m - 1, a) = std::sin(kPi * m * rule.x[a]);
  Eigen::MatrixXd P = 2.0 * S * F * S.transpose();
  std::vector<double> w(static_cast<std::size_t>(M) * M);
  for (int m1 = 1; m1 <= M; ++m1)
    for (int m2 = 1; m2 <= M; ++m2) w[mode_index(M, m1, m2)] = P(m1 - 1, m2 - 1) / std::sqrt(eigenvalue(m1, m2));
  return w;
}

double evaluate(const SpectralField& field, const std::vector<double>& weights) {
  if (weights.size() != field.coeff.size()) throw std::invalid_argument("evaluate: weights do not match the cutoff");
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) acc += field.coeff[i] * weights[i];
  return acc;
}

double evaluate(const SpectralField& field, const TestFunction& f, int nodes) {
  return evaluate(field, mode_weights(f, field.M, nodes));
}

double truncated_variance(const std::vector<double>& weights) {
  double acc = 0.0;
  for (double w : weights) acc += w * w;
  return acc;
}

std::vector<double> circle_weights(int M, std::complex<double> z, double r) {
  const double tol = 1e-12;
  if (!(r > 0.0) || z.real() - r < -tol || z.real() + r > 1.0 + tol || z.imag() - r < -tol || z.imag() + r > 1.0 + tol)
    throw std::domain_error("circle_average: the circle leaves the square");
  std::vector<double> s1(M), s2(M);
  for (int m = 1; m <= M; ++m) {
    s1[m - 1] = std::sin(kPi * m * z.real());
    s2[m - 1] = std::sin(kPi * m * z.imag());
  }
  std::vector<double> w(static_cast<std::size_t>(M) * M);
  for (int m1 = 1; m1 <= M; ++m1)
    for (int m2 = 1; m2 <= M; ++m2) {
      const double k = std::sqrt(eigenvalue(m1, m2));
      w[mode_index(M, m1, m2)] = 2.0 * s1[m1 - 1] * s2[m2 - 1] * std::cyl_bessel_j(0.0, k * r) / k;
    }
  return w;
}

double circle_average(const SpectralField& field, std::complex<double> z, double r) {
  return evaluate(field, circle_weights(field.M, z, r));
}

double circle_average_quadrature(const SpectralField& field, std::complex<double> z, double r, int points) {
  if (points < 1) throw std::invalid_argument("circle_average_quadrature: need points >= 1");
  double acc = 0.0;
  for (int k = 0; k < points; ++k) acc += field(z + std::polar(r, 2.0 * kPi * k / points));
  return acc / points;
}

double circle_covariance(int M, std::complex<double> z, double r, std::complex<double> w, double s) {
  auto a = circle_weights(M, z, r), b = circle_weights(M, w, s);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

LogLinearity circle_log_linearity(int M, std::complex<double> z, const std::vector<double>& radii, double tolerance) {
  if (radii.size() < 2) throw std::invalid_argument("circle_log_linearity: need at least two radii");
  std::vector<std::vector<double>> w;
  for (double r : radii) w.push_back(circle_weights(M, z, r));
  LogLinearity out;
  for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
    if (!(radii[k + 1] < radii[k])) throw std::invalid_argument("circle_log_linearity: radii must decrease");
    double v = 0.0;
    for (std::size_t i = 0; i < w[k].size(); ++i) v += (w[k][i] - w[k + 1][i]) * (w[k][i] - w[k + 1][i]);
    out.constants.push_back(v / std::log(radii[k] / radii[k + 1]));
  }
  for (double c : out.constants) out.mean_constant += c;
  out.mean_constant /= static_cast<double>(out.constants.size());
  for (double c : out.constants)
    out.max_relative_spread = std::max(out.max_relative_spread, std::abs(c - out.mean_constant) / out.mean_constant);
  out.report = make_report("circle-average increment variance is linear in log r at " + point_label(z),
                           out.max_relative_spread, tolerance, radii.size(),
                           "E[(gamma(r) - gamma(r'))^2] = c log(r'/r)");
  out.report.detail["constant"] = out.mean_constant;
  out.report.detail["one_over_two_pi"] = 1.0 / (2.0 * kPi);
  out.report.detail["constants"] = out.constants;
  out.report.detail["cutoff"] = M;
  return out;
}

std::vector<TestReport> brownian_structure_check(int M, std::complex<double> z, std::complex<double> w,
                                                 const std::vector<double>& radii, std::size_t replicas,
                                                 std::uint64_t seed, double sigma) {
  const std::size_t R = radii.size();
  if (R < 3) throw std::invalid_argument("brownian_structure_check: need at least three radii");
  for (std::size_t k = 0; k + 1 < R; ++k)
    if (!(radii[k + 1] < radii[k])) throw std::invalid_argument("brownian_structure_check: radii must decrease");
  if (std::abs(z - w) <= 2.0 * radii[0])
    throw std::invalid_argument("brownian_structure_check: centres must be more than 2 r_0 apart");
  const std::complex<double> centre[2] = {z, w};
  std::vector<std::vector<double>> weights;
  for (auto c : centre)
    for (double r : radii) weights.push_back(circle_weights(M, c, r));
  // inc[(c * (R-1) + k) * replicas + rep]
  const std::size_t I = R - 1;
  std::vector<double> inc(2 * I * replicas);
  for_each_replica(replicas, seed, [&](std::size_t rep, Engine& rng) {
    SpectralField f = sample_spectral(M, rng);
    for (int c = 0; c < 2; ++c) {
      std::vector<double> g(R);
      for (std::size_t k = 0; k < R; ++k) g[k] = evaluate(f, weights[c * R + k]);
      for (std::size_t k = 0; k < I; ++k) inc[(c * I + k) * replicas + rep] = g[k + 1] - g[k];
    }
  });
  auto series = [&](int c, std::size_t k) {
    return std::span<const double>(inc.data() + (c * I + k) * replicas, replicas);
  };
  auto exact_cov = [&](int c, std::size_t k, int d, std::size_t j) {
    const auto& a0 = weights[c * R + k];
    const auto& a1 = weights[c * R + k + 1];
    const auto& b0 = weights[d * R + j];
    const auto& b1 = weights[d * R + j + 1];
    double acc = 0.0;
    for (std::size_t i = 0; i < a0.size(); ++i) acc += (a1[i] - a0[i]) * (b1[i] - b0[i]);
    return acc;
  };
  std::vector<TestReport> out;
  const std::string anchor = "circle averages (gamma(z, e^-t))_t are Brownian motions, independent for disjoint balls";
  for (int c = 0; c < 2; ++c) {
    const std::string at = " at " + point_label(centre[c]);
    for (std::size_t k = 0; k < I; ++k) {
      auto s = series(c, k);
      const std::string ann = " on annulus " + std::to_string(radii[k + 1]) + ".." + std::to_string(radii[k]);
      auto rep = moment_test("increment mean" + ann + at, estimate_mean(s), 0.0, sigma);
      rep.anchor = anchor;
      out.push_back(rep);
      std::vector<double> sq(s.begin(), s.end());
      for (double& x : sq) x *= x;
      const double v = exact_cov(c, k, c, k);
      rep = moment_test("increment variance" + ann + at, estimate_mean(sq), v, sigma);
      rep.anchor = anchor;
      rep.detail["log_ratio"] = std::log(radii[k] / radii[k + 1]);
      out.push_back(rep);
    }
    for (std::size_t k = 0; k < I; ++k)
      for (std::size_t j = k + 1; j < I; ++j) {
        auto corr = estimate_correlation(series(c, k), series(c, j));
        auto rep = make_report("disjoint annuli " + std::to_string(k) + "," + std::to_string(j) + " uncorrelated" + at,
                               std::abs(corr.z), sigma, replicas, anchor);
        rep.detail["r"] = corr.r;
        rep.detail["exact_truncated_covariance"] = exact_cov(c, k, c, j);
        out.push_back(rep);
      }
  }
  for (std::size_t k = 0; k < I; ++k) {
    auto corr = estimate_correlation(series(0, k), series(1, k));
    auto rep = make_report("separated centres " + point_label(z) + " and " + point_label(w) + " uncorrelated on annulus " +
                               std::to_string(k),
                           std::abs(corr.z), sigma, replicas, anchor);
    rep.detail["r"] = corr.r;
    rep.detail["exact_truncated_covariance"] = exact_cov(0, k, 1, k);
    out.push_back(rep);
  }
  return out;
}

double LqgMeasure::total() const {
  double acc = 0.0;
  for (double m : masses) acc += m;
  return acc;
}

int lqg_cutoff(int max_level) {
  if (max_level < 0 || max_level > 10) throw std::invalid_argument("lqg: level out of range");
  return 1 << (max_level + 2);
}

LqgEngine::LqgEngine(int M, std::vector<int> levels) : M_(M), levels_(std::move(levels)) {
  if (M < 1) throw std::invalid_argument("LqgEngine: need M >= 1");
  for (int n : levels_) {
    if (n < 0 || n > 10) throw std::invalid_argument("LqgEngine: level out of range");
    const int K = 1 << n;
    const double r = std::ldexp(1.0, -n - 1);
    std::vector<double> radial(static_cast<std::size_t>(M) * M);
    parallel_for(static_cast<std::size_t>(M), [&](std::size_t i) {
      const int m1 = static_cast<int>(i) + 1;
      for (int m2 = m1; m2 <= M; ++m2) {
        const double k = std::sqrt(eigenvalue(m1, m2));
        const double v = std::cyl_bessel_j(0.0, k * r) / k;
        radial[mode_index(M, m1, m2)] = v;
        radial[mode_index(M, m2, m1)] = v;
      }
    });
    Eigen::MatrixXd S(K, K);
    for (int i = 0; i < K; ++i)
      for (int q = 1; q <= K; ++q) S(i, q - 1) = std::sin(kPi * q * (i + 0.5) / K);
    Eigen::MatrixXd F2 = Eigen::MatrixXd::Zero(K, K);
    for (int m1 = 1; m1 <= M; ++m1) {
      const int q1 = fold_sin2(m1, K);
      if (q1 == 0) continue;
      for (int m2 = 1; m2 <= M; ++m2) {
        const int q2 = fold_sin2(m2, K);
        if (q2 == 0) continue;
        const double v = radial[mode_index(M, m1, m2)];
        F2(q1 - 1, q2 - 1) += v * v;
      }
    }
    Eigen::MatrixXd S2 = S.cwiseProduct(S);
    variance_.push_back(2.0 * kPi * 4.0 * S2 * F2 * S2.transpose());
    radial_.push_back(std::move(radial));
    sin_.push_back(std::move(S));
  }
}

Eigen::MatrixXd LqgEngine::circle_averages(const SpectralField& field, std::size_t k) const {
  if (field.M != M_) throw std::invalid_argument("LqgEngine: field cutoff does not match");
  const int K = 1 << levels_.at(k);
  const auto& radial = radial_[k];
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(K, K);
  std::vector<int> q(M_), sg(M_);
  for (int m = 1; m <= M_; ++m) q[m - 1] = fold_sin(m, K, sg[m - 1]);
  for (int m1 = 1; m1 <= M_; ++m1) {
    const int q1 = q[m1 - 1];
    if (q1 == 0) continue;
    const std::size_t row = mode_index(M_, m1, 1);
    for (int m2 = 1; m2 <= M_; ++m2) {
      const int q2 = q[m2 - 1];
      if (q2 == 0) continue;
      F(q1 - 1, q2 - 1) += sg[m1 - 1] * sg[m2 - 1] * field.coeff[row + m2 - 1] * radial[row + m2 - 1];
    }
  }
  return std::sqrt(2.0 * kPi) * 2.0 * sin_[k] * F * sin_[k].transpose();
}

LqgMeasure LqgEngine::cells_from(const Eigen::MatrixXd& A, double gamma, std::size_t k) const {
  const int K = 1 << levels_.at(k);
  const double area = 1.0 / (static_cast<double>(K) * K);
  const auto& a = variance_[k];
  LqgMeasure mu;
  mu.gamma = gamma;
  mu.level = levels_[k];
  mu.masses.resize(static_cast<std::size_t>(K) * K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      mu.masses[static_cast<std::size_t>(i) * K + j] = area * std::exp(gamma * A(i, j) - 0.5 * gamma * gamma * a(i, j));
  return mu;
}

LqgMeasure LqgEngine::cells(const SpectralField& field, double gamma, std::size_t k) const {
  return cells_from(circle_averages(field, k), gamma, k);
}

LqgMeasure lqg_cells(const SpectralField& field, double gamma, int level) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("lqg_cells: gamma must be nonnegative");
  LqgEngine engine(field.M, {level});
  return engine.cells(field, gamma, 0);
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty sample");
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h), v.end());
  double hi = v[h];
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h));
  return 0.5 * (lo + hi);
}

LqgReport lqg_report(const std::vector<double>& gammas, const std::vector<int>& levels, std::size_t replicas,
                     std::uint64_t seed, double sigma, double degeneracy_threshold) {
  if (gammas.empty() || levels.empty()) throw std::invalid_argument("lqg_report: need gammas and levels");
  for (double g : gammas)
    if (!(g >= 0.0)) throw std::invalid_argument("lqg_report: gamma must be nonnegative");
  const int M = lqg_cutoff(*std::max_element(levels.begin(), levels.end()));
  LqgEngine engine(M, levels);
  LqgReport out;
  out.gammas = gammas;
  out.levels = levels;
  out.totals.assign(gammas.size(), std::vector<std::vector<double>>(levels.size(), std::vector<double>(replicas)));
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    SpectralField f = sample_spectral(M, rng);
    for (std::size_t l = 0; l < levels.size(); ++l) {
      Eigen::MatrixXd A = engine.circle_averages(f, l);
      for (std::size_t g = 0; g < gammas.size(); ++g) out.totals[g][l][r] = engine.cells_from(A, gammas[g], l).total();
    }
  });
  const std::string anchor = "mu_r = exp(gamma A(z,r) - gamma^2 a(z,r) / 2) dz converges weakly; E[mu(U)] = |U|";
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    const double gamma = gammas[g];
    const std::string gl = "gamma=" + std::to_string(gamma);
    if (gamma < 2.0) {
      std::vector<double> inc_var;
      for (std::size_t l = 0; l < levels.size(); ++l) {
        auto rep = moment_test("E[total mass] = 1 at level " + std::to_string(levels[l]) + ", " + gl,
                               estimate_mean(out.totals[g][l]), 1.0, sigma);
        rep.anchor = anchor;
        rep.detail["median"] = median(out.totals[g][l]);
        out.reports.push_back(rep);
        if (l > 0) {
          std::vector<double> d(replicas);
          for (std::size_t r = 0; r < replicas; ++r) d[r] = out.totals[g][l][r] - out.totals[g][l - 1][r];
          auto e = estimate_mean(d);
          inc_var.push_back(e.stderr_ * e.stderr_ * static_cast<double>(replicas));
        }
      }
      if (!inc_var.empty()) out.reports.back().detail["level_increment_variances"] = inc_var;
      // The martingale is bounded in L^2 only for gamma^2 < 2.
      if (inc_var.size() >= 2 && gamma * gamma < 2.0) {
        std::size_t rises = 0;
        for (std::size_t i = 1; i < inc_var.size(); ++i) rises += inc_var[i] >= inc_var[i - 1];
        auto rep = make_report("variance of total-mass increments decreases across levels, " + gl,
                               static_cast<double>(rises), 0.0, replicas, anchor);
        rep.detail["level_increment_variances"] = inc_var;
        out.reports.push_back(rep);
      }
    } else {
      const double lo = median(out.totals[g].front()), hi = median(out.totals[g].back());
      auto rep = make_report("degeneracy: median total at level " + std::to_string(levels.back()) + " / level " +
                                 std::to_string(levels.front()) + ", " + gl,
                             hi / lo, degeneracy_threshold, replicas, "mu degenerates to 0 for gamma >= 2");
      std::vector<double> medians;
      for (const auto& t : out.totals[g]) medians.push_back(median(t));
      rep.detail["medians"] = medians;
      out.reports.push_back(rep);
    }
  }
  return out;
}

TestReport lqg_sign_flip_check(double gamma, int level, std::size_t replicas, std::uint64_t seed, double sigma) {
  const int M = lqg_cutoff(level);
  LqgEngine engine(M, {level});
  std::vector<double> plain(replicas), flipped(replicas);
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    plain[r] = engine.cells(sample_spectral(M, rng), gamma, 0).total();
  });
  for_each_replica(replicas, splitmix64(seed ^ 0x5eed5eedULL), [&](std::size_t r, Engine& rng) {
    flipped[r] = engine.cells(negate(sample_spectral(M, rng)), gamma, 0).total();
  });
  auto rep = ks_two_sample("total mass law invariant under N -> -N, gamma=" + std::to_string(gamma) + ", level " +
                               std::to_string(level),
                           plain, flipped, sigma);
  rep.anchor = "Gamma and -Gamma have the same law";
  return rep;
}

}  // namespace gfflab
