#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gfflab/network.hpp"
#include "gfflab/stats.hpp"

namespace gfflab {

/// Networks with more interior vertices than this are handled by a sparse
/// iterative solver instead of a dense factorization.
inline constexpr int kDenseLimit = 2000;

/// L_xx = lambda_x, L_xy = -(total conductance between x and y), indexed by
/// interior index.
Eigen::MatrixXd laplacian(const Network& network);
Eigen::SparseMatrix<double> sparse_laplacian(const Network& network);

/// Solves L u = b for the interior Laplacian. Dense Cholesky up to
/// kDenseLimit interior vertices, conjugate gradient (residual 1e-10) above.
class LaplaceSolver {
 public:
  explicit LaplaceSolver(const Network& network);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;
  int size() const { return n_; }
  bool dense() const { return dense_; }
  /// Lower Cholesky factor of L (dense mode only).
  Eigen::MatrixXd cholesky_factor() const;
  double log_det() const;

 private:
  int n_ = 0;
  bool dense_ = true;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  using Cg = Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper>;
  std::shared_ptr<const Eigen::SparseMatrix<double>> sparse_;
  std::shared_ptr<Cg> cg_;
};

/// G = L^{-1}. Throws std::runtime_error if G L deviates from the identity by
/// more than 1e-10 (relative).
Eigen::MatrixXd green(const Network& network);

struct Determinant {
  std::optional<double> value;  // empty when exp(log_value) over/underflows
  double log_value = 0.0;
};

Determinant det_laplacian(const Network& network);

struct TreeWeight {
  double weight = 0.0;  // sum over wired spanning trees of prod c_e = det L
  double log_weight = 0.0;
  /// (2d)^n det L on lattice networks, checked to be an integer.
  std::optional<double> tree_count;
};

TreeWeight spanning_tree_weight(const Network& network);

struct ProductIdentity {
  double lhs = 0.0;  // det G
  double rhs = 0.0;  // prod_j G_{D minus first j-1}(x_j, x_j)
  double deviation = 0.0;  // |lhs - rhs| / |lhs|
};

/// `ordering` lists interior vertex ids; empty means the network's own order.
ProductIdentity green_product_identity(const Network& network, std::span<const int> ordering = {});

/// Harmonic extension of boundary data. `values` is indexed by vertex id; only
/// boundary entries are read. Result is indexed by interior index.
Eigen::VectorXd harmonic_extension(const Network& network, std::span<const double> values);

/// Monte Carlo estimate of G(x, y) from discrete walk visit counts at y
/// divided by lambda_y. x and y are interior vertex ids.
MeanEstimate green_mc(const Network& network, int x, int y, std::size_t samples, std::uint64_t seed);

/// Effective conductance between two vertices (any kind), treating the
/// network as a plain resistor network with no grounding at the boundary.
double effective_conductance(const Network& network, int a, int b);

/// Number of spanning trees of the wired multigraph, by exhaustive search.
/// Intended as an independent check on small networks.
std::uint64_t count_wired_spanning_trees(const Network& network);

/// All wired spanning trees, each as a sorted list of original edge ids.
std::vector<std::vector<int>> enumerate_wired_spanning_trees(const Network& network);

}  // namespace gfflab
