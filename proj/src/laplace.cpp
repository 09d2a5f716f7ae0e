#include "gfflab/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/SparseCholesky>

#include "gfflab/rng.hpp"

namespace gfflab {

Eigen::MatrixXd laplacian(const Network& network) {
  const int n = network.interior_count();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : network.edges()) {
    int ia = network.interior_index(e.a), ib = network.interior_index(e.b);
    if (ia >= 0) L(ia, ia) += e.conductance;
    if (ib >= 0) L(ib, ib) += e.conductance;
    if (ia >= 0 && ib >= 0) {
      L(ia, ib) -= e.conductance;
      L(ib, ia) -= e.conductance;
    }
  }
  return L;
}

Eigen::SparseMatrix<double> sparse_laplacian(const Network& network) {
  const int n = network.interior_count();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(network.edge_count()) * 4);
  for (const auto& e : network.edges()) {
    int ia = network.interior_index(e.a), ib = network.interior_index(e.b);
    if (ia >= 0) trips.emplace_back(ia, ia, e.conductance);
    if (ib >= 0) trips.emplace_back(ib, ib, e.conductance);
    if (ia >= 0 && ib >= 0) {
      trips.emplace_back(ia, ib, -e.conductance);
      trips.emplace_back(ib, ia, -e.conductance);
    }
  }
  Eigen::SparseMatrix<double> L(n, n);
  L.setFromTriplets(trips.begin(), trips.end());
  return L;
}

LaplaceSolver::LaplaceSolver(const Network& network) : n_(network.interior_count()) {
  if (n_ == 0) throw std::invalid_argument("LaplaceSolver: network has no interior");
  dense_ = n_ <= kDenseLimit;
  if (dense_) {
    llt_.compute(laplacian(network));
    if (llt_.info() != Eigen::Success)
      throw std::runtime_error("laplacian is not positive definite (is the boundary reachable?)");
  } else {
    sparse_ = std::make_shared<const Eigen::SparseMatrix<double>>(sparse_laplacian(network));
    cg_ = std::make_shared<Cg>();
    cg_->setTolerance(1e-12);
    cg_->setMaxIterations(std::max(1000, 20 * n_));
    cg_->compute(*sparse_);
    if (cg_->info() != Eigen::Success) throw std::runtime_error("laplacian: iterative solver setup failed");
  }
}

Eigen::VectorXd LaplaceSolver::solve(const Eigen::VectorXd& b) const {
  if (dense_) return llt_.solve(b);
  Eigen::VectorXd x = cg_->solve(b);
  double res = (*sparse_ * x - b).norm();
  if (res > 1e-10 * std::max(1.0, b.norm()))
    throw std::runtime_error("laplacian: iterative solve did not reach residual 1e-10");
  return x;
}

Eigen::MatrixXd LaplaceSolver::solve(const Eigen::MatrixXd& b) const {
  if (dense_) return llt_.solve(b);
  Eigen::MatrixXd x(b.rows(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j) x.col(j) = solve(Eigen::VectorXd(b.col(j)));
  return x;
}

Eigen::MatrixXd LaplaceSolver::cholesky_factor() const {
  if (!dense_) throw std::logic_error("cholesky_factor: only available for dense solves");
  return llt_.matrixL();
}

double LaplaceSolver::log_det() const {
  if (dense_) return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> chol(*sparse_);
  if (chol.info() != Eigen::Success) throw std::runtime_error("laplacian: sparse factorization failed");
  return 2.0 * Eigen::VectorXd(chol.matrixL().toDense().diagonal()).array().log().sum();
}

Eigen::MatrixXd green(const Network& network) {
  LaplaceSolver solver(network);
  const int n = network.interior_count();
  Eigen::MatrixXd G = solver.solve(Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n)));
  G = 0.5 * (G + G.transpose()).eval();
  Eigen::MatrixXd L = laplacian(network);
  double dev = (G * L - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  double scale = std::max(1.0, G.cwiseAbs().maxCoeff() * L.cwiseAbs().maxCoeff());
  if (dev > 1e-10 * scale * std::sqrt(static_cast<double>(n)))
    throw std::runtime_error("green: G L differs from identity beyond tolerance (ill-conditioned)");
  return G;
}

Determinant det_laplacian(const Network& network) {
  Determinant d;
  d.log_value = LaplaceSolver(network).log_det();
  if (std::abs(d.log_value) < 700.0) d.value = std::exp(d.log_value);
  return d;
}

TreeWeight spanning_tree_weight(const Network& network) {
  TreeWeight t;
  auto det = det_laplacian(network);
  t.log_weight = det.log_value;
  t.weight = det.value.value_or(std::exp(det.log_value));
  if (int d = network.lattice_dimension(); d > 0) {
    double log_count = det.log_value + network.interior_count() * std::log(2.0 * d);
    if (log_count < 40.0) {
      double count = std::exp(log_count);
      double rounded = std::round(count);
      if (std::abs(count - rounded) > 1e-6 * std::max(1.0, rounded))
        throw std::logic_error("spanning_tree_weight: tree count is not an integer");
      t.tree_count = rounded;
    }
  }
  return t;
}

ProductIdentity green_product_identity(const Network& network, std::span<const int> ordering) {
  const int n = network.interior_count();
  std::vector<int> order;
  if (ordering.empty()) {
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
  } else {
    if (static_cast<int>(ordering.size()) != n)
      throw std::invalid_argument("green_product_identity: ordering must list every interior vertex");
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int v : ordering) {
      int i = (v >= 0 && v < network.vertex_count()) ? network.interior_index(v) : -1;
      if (i < 0 || seen[static_cast<std::size_t>(i)])
        throw std::invalid_argument("green_product_identity: ordering is not a permutation of the interior");
      seen[static_cast<std::size_t>(i)] = 1;
      order.push_back(i);
    }
  }
  Eigen::MatrixXd L = laplacian(network);
  Eigen::MatrixXd G = green(network);

  ProductIdentity out;
  double log_lhs = std::log(std::abs(G.partialPivLu().determinant()));
  double log_rhs = 0.0;
  for (int j = 0; j < n; ++j) {
    // Green's function of D minus {x_1..x_{j-1}} at x_j: solve on the principal
    // submatrix of L over the remaining vertices.
    const int k = n - j;
    Eigen::MatrixXd sub(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) sub(a, b) = L(order[static_cast<std::size_t>(j + a)], order[static_cast<std::size_t>(j + b)]);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(k);
    e(0) = 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(sub);
    log_rhs += std::log(llt.solve(e)(0));
  }
  out.lhs = std::exp(log_lhs);
  out.rhs = std::exp(log_rhs);
  out.deviation = std::abs(std::expm1(log_rhs - log_lhs));
  return out;
}

Eigen::VectorXd harmonic_extension(const Network& network, std::span<const double> values) {
  if (static_cast<int>(values.size()) != network.vertex_count())
    throw std::invalid_argument("harmonic_extension: need one value per vertex");
  const int n = network.interior_count();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& e : network.edges()) {
    int ia = network.interior_index(e.a), ib = network.interior_index(e.b);
    if (ia >= 0 && ib < 0) rhs(ia) += e.conductance * values[static_cast<std::size_t>(e.b)];
    if (ib >= 0 && ia < 0) rhs(ib) += e.conductance * values[static_cast<std::size_t>(e.a)];
    for (int v : {e.a, e.b})
      if (network.is_boundary(v)) {
        lo = std::min(lo, values[static_cast<std::size_t>(v)]);
        hi = std::max(hi, values[static_cast<std::size_t>(v)]);
      }
  }
  if (n == 0) return rhs;
  Eigen::VectorXd F = LaplaceSolver(network).solve(rhs);
  double slack = 1e-9 * std::max({1.0, std::abs(lo), std::abs(hi)});
  if (std::isfinite(lo) && (F.minCoeff() < lo - slack || F.maxCoeff() > hi + slack))
    throw std::logic_error("harmonic_extension: maximum principle violated");
  return F;
}

MeanEstimate green_mc(const Network& network, int x, int y, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("green_mc: samples must be >= 1");
  if (network.is_boundary(x) || network.is_boundary(y))
    throw std::invalid_argument("green_mc: x and y must be interior vertices");
  std::vector<double> out(samples);
  const double inv_lambda = 1.0 / network.lambda(y);
  for_each_replica(samples, seed, [&](std::size_t k, Engine& rng) {
    int v = x;
    std::uint64_t visits = 0;
    while (!network.is_boundary(v)) {
      if (v == y) ++visits;
      int e = network.pick_edge(v, uniform01(rng));
      v = network.other_end(e, v);
    }
    out[k] = static_cast<double>(visits) * inv_lambda;
  });
  return estimate_mean(out);
}

double effective_conductance(const Network& network, int a, int b) {
  if (a == b) throw std::invalid_argument("effective_conductance: endpoints coincide");
  const int nv = network.vertex_count();
  // Ground b, inject unit current at a; the potential at a is the resistance.
  std::vector<int> index(static_cast<std::size_t>(nv), -1);
  int n = 0;
  for (int v = 0; v < nv; ++v)
    if (v != b && !network.incident(v).empty()) index[static_cast<std::size_t>(v)] = n++;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : network.edges()) {
    int ia = index[static_cast<std::size_t>(e.a)], ib = index[static_cast<std::size_t>(e.b)];
    if (ia >= 0) L(ia, ia) += e.conductance;
    if (ib >= 0) L(ib, ib) += e.conductance;
    if (ia >= 0 && ib >= 0) {
      L(ia, ib) -= e.conductance;
      L(ib, ia) -= e.conductance;
    }
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(index[static_cast<std::size_t>(a)]) = 1.0;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(L);
  return 1.0 / ldlt.solve(rhs)(index[static_cast<std::size_t>(a)]);
}

namespace {

template <class Visit>
void for_each_wired_tree(const Network& network, Visit&& visit) {
  WiredGraph g = contract_boundary(network);
  const int n = network.interior_count();
  const int m = static_cast<int>(g.edges.size());
  if (m > 40) throw std::invalid_argument("count_wired_spanning_trees: too many edges for enumeration");
  // Enumerate n-subsets of edges and keep the acyclic ones.
  std::vector<int> pick(static_cast<std::size_t>(n));
  std::vector<int> parent(static_cast<std::size_t>(g.vertex_count()));
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
    return v;
  };
  auto recurse = [&](auto&& self, int start, int depth) -> void {
    if (depth == n) {
      std::iota(parent.begin(), parent.end(), 0);
      for (int e : pick) {
        int ra = find(g.edges[static_cast<std::size_t>(e)].a), rb = find(g.edges[static_cast<std::size_t>(e)].b);
        if (ra == rb) return;
        parent[static_cast<std::size_t>(ra)] = rb;
      }
      visit(g, pick);
      return;
    }
    for (int e = start; e <= m - (n - depth); ++e) {
      pick[static_cast<std::size_t>(depth)] = e;
      self(self, e + 1, depth + 1);
    }
  };
  recurse(recurse, 0, 0);
}

}  // namespace

std::uint64_t count_wired_spanning_trees(const Network& network) {
  std::uint64_t count = 0;
  for_each_wired_tree(network, [&](const WiredGraph&, const std::vector<int>&) { ++count; });
  return count;
}

std::vector<std::vector<int>> enumerate_wired_spanning_trees(const Network& network) {
  std::vector<std::vector<int>> trees;
  for_each_wired_tree(network, [&](const WiredGraph& g, const std::vector<int>& pick) {
    std::vector<int> t;
    for (int e : pick) t.push_back(g.inverse_map[static_cast<std::size_t>(e)]);
    std::sort(t.begin(), t.end());
    trees.push_back(std::move(t));
  });
  return trees;
}

}  // namespace gfflab
