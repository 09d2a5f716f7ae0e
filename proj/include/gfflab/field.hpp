#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gfflab/network.hpp"
#include "gfflab/rng.hpp"
#include "gfflab/stats.hpp"

namespace gfflab {

/// One field realization. `values` is indexed by interior index; boundary
/// values are stored per vertex id (interior entries unused).
struct FieldSample {
  Eigen::VectorXd values;
  std::vector<double> boundary_values;

  /// Value at any vertex id.
  double at(const Network& network, int v) const {
    int i = network.interior_index(v);
    return i >= 0 ? values(i) : boundary_values[static_cast<std::size_t>(v)];
  }
};

/// Samples the GFF with given boundary data as harmonic extension plus C Z,
/// where C C^T = G. Factorizations are computed once and reused.
class GffSampler {
 public:
  /// `boundary_values` indexed by vertex id (empty = zero boundary).
  explicit GffSampler(const Network& network, std::vector<double> boundary_values = {});

  FieldSample sample(Engine& rng) const;
  /// Second sampler: solves R^T x = Z with L = R R^T, so Cov x = L^{-1}.
  FieldSample sample_precision(Engine& rng) const;

  const Eigen::MatrixXd& green() const { return green_; }
  const Eigen::VectorXd& mean() const { return mean_; }

 private:
  std::vector<double> boundary_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd green_;
  Eigen::MatrixXd green_factor_;  // lower, C C^T = G
  Eigen::MatrixXd precision_factor_;  // lower, R R^T = L
};

FieldSample sample_gff(const Network& network, std::span<const double> boundary_values, std::uint64_t seed);

/// Redraws the value at interior vertex v from N(sum_y c_xy field(y) / lambda_x, 1 / lambda_x).
void gibbs_update(const Network& network, FieldSample& field, int v, Engine& rng);
FieldSample gibbs_step(const Network& network, const FieldSample& field, int v, std::uint64_t seed);

struct MarkovDecomposition {
  FieldSample gamma_B;        // field on B, harmonic extension elsewhere
  FieldSample gamma_super_B;  // field minus gamma_B; zero on B and the boundary
};

/// B lists interior vertex ids.
MarkovDecomposition markov_decompose(const Network& network, const FieldSample& field, std::span<const int> B);

/// The sign cluster of x (through interior edges) together with its interior
/// neighbours. Throws std::domain_error if the value at x is exactly zero.
std::vector<int> excursion_component(const Network& network, const FieldSample& field, int x);

/// Monte Carlo check of E[exp(-1/2 sum k Gamma^2)] = sqrt(det L / det(L + diag k)).
/// k is indexed by interior index.
TestReport verify_laplace_gff(const Network& network, std::span<const double> k, std::size_t replicas,
                              std::uint64_t seed, double sigma = 4.0);

/// sqrt(det L / det(L + diag k)).
double gff_laplace_transform(const Network& network, std::span<const double> k);

}  // namespace gfflab
