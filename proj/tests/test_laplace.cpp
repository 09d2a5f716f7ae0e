#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "common.hpp"
#include "gfflab/laplace.hpp"
#include "gfflab/network.hpp"

using namespace gfflab;
using namespace testing_util;

TEST(Laplacian, SmallExamples) {
  auto L2 = laplacian(two_site());
  Eigen::Matrix2d want;
  want << 1, -0.25, -0.25, 1;
  EXPECT_TRUE(L2.isApprox(want, 0.0));
  EXPECT_DOUBLE_EQ(laplacian(single_site())(0, 0), 1.0);
  Eigen::Matrix2d chain;
  chain << 2, -1, -1, 2;
  EXPECT_TRUE(laplacian(unit_chain(3)).isApprox(chain, 0.0));
}

TEST(Laplacian, RowSumsAreBoundaryConductance) {
  auto net = box({3, 3});
  auto L = laplacian(net);
  for (int i = 0; i < net.interior_count(); ++i) {
    int x = net.interior()[static_cast<std::size_t>(i)];
    double to_boundary = 0;
    for (int e : net.incident(x))
      if (net.is_boundary(net.other_end(e, x))) to_boundary += net.edge(e).conductance;
    EXPECT_NEAR(L.row(i).sum(), to_boundary, 1e-15);
  }
}

TEST(Green, TwoSiteExact) {
  auto G = green(two_site());
  EXPECT_NEAR(G(0, 0), 16.0 / 15, 1e-14);
  EXPECT_NEAR(G(1, 1), 16.0 / 15, 1e-14);
  EXPECT_NEAR(G(0, 1), 4.0 / 15, 1e-14);
  EXPECT_NEAR(G(1, 0), 4.0 / 15, 1e-14);
}

TEST(Green, ChainMatchesWarmUpCovariance) {
  const int N = 7;
  auto G = green(unit_chain(N));
  // unit conductances and lambda = 2: G(i, j) = i (N - j) / N for i <= j
  for (int i = 1; i < N; ++i)
    for (int j = i; j < N; ++j) EXPECT_NEAR(G(i - 1, j - 1), double(i) * (N - j) / N, 1e-12);
  auto G3 = green(unit_chain(3));
  EXPECT_NEAR(G3(0, 0), 2.0 / 3, 1e-14);
  EXPECT_NEAR(G3(0, 1), 1.0 / 3, 1e-14);
  EXPECT_NEAR(green(single_site())(0, 0), 1.0, 0.0);
}

TEST(Green, InverseSymmetricNonnegative) {
  for (auto net : {box({20, 20}), add_mass(box({6, 5}), std::vector<double>(30, 0.3)), box({4, 3, 3})}) {
    auto G = green(net);
    auto L = laplacian(net);
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(L.rows(), L.cols());
    EXPECT_LT((G * L - I).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_TRUE(G.isApprox(G.transpose(), 0.0));
    EXPECT_GE(G.minCoeff(), 0.0);
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    EXPECT_EQ(llt.info(), Eigen::Success);
  }
}

TEST(Determinant, Examples) {
  EXPECT_NEAR(*det_laplacian(two_site()).value, 15.0 / 16, 1e-14);
  EXPECT_NEAR(*det_laplacian(single_site()).value, 1.0, 1e-15);
  EXPECT_NEAR(*det_laplacian(square()).value, 0.75, 1e-14);
}

TEST(Determinant, LogOnlyForLargeBoxes) {
  // 60x60 box: det L underflows a double
  auto d = det_laplacian(box({60, 60}));
  EXPECT_TRUE(std::isfinite(d.log_value));
  EXPECT_LT(d.log_value, -700.0);
  EXPECT_FALSE(d.value.has_value());
}

TEST(Determinant, DetGIsReciprocal) {
  auto net = box({4, 3});
  auto G = green(net);
  EXPECT_NEAR(G.determinant() * *det_laplacian(net).value, 1.0, 1e-9);
}

TEST(Determinant, MassiveConsistency) {
  auto net = box({3, 2});
  std::vector<double> k{0.5, 0, 1, 0, 0.2, 2};
  Eigen::MatrixXd Lk = laplacian(net);
  for (int i = 0; i < 6; ++i) Lk(i, i) += k[static_cast<std::size_t>(i)];
  EXPECT_NEAR(laplacian(add_mass(net, k)).determinant(), Lk.determinant(), 1e-12);
}

TEST(SpanningTrees, Counts) {
  EXPECT_NEAR(*spanning_tree_weight(single_site()).tree_count, 4.0, 0.0);
  EXPECT_NEAR(*spanning_tree_weight(two_site()).tree_count, 15.0, 0.0);
  EXPECT_EQ(count_wired_spanning_trees(single_site()), 4u);
  EXPECT_EQ(count_wired_spanning_trees(two_site()), 15u);
  // 2x2 box: the determinant formula and brute force agree on 192
  EXPECT_EQ(count_wired_spanning_trees(square()), 192u);
  EXPECT_NEAR(*spanning_tree_weight(square()).tree_count, 192.0, 0.0);
  for (auto net : {box({3, 2}), box({3, 1}), box({2, 1, 1})})
    EXPECT_NEAR(*spanning_tree_weight(net).tree_count, double(count_wired_spanning_trees(net)), 0.0);
}

TEST(SpanningTrees, TwoSiteSplit) {
  // 6 trees use the interior edge, 9 do not
  auto net = two_site();
  int inner = -1;
  for (int e = 0; e < net.edge_count(); ++e)
    if (!net.is_boundary(net.edge(e).a) && !net.is_boundary(net.edge(e).b)) inner = e;
  int with = 0, without = 0;
  for (const auto& t : enumerate_wired_spanning_trees(net)) {
    EXPECT_EQ(t.size(), 2u);
    (std::find(t.begin(), t.end(), inner) != t.end() ? with : without)++;
  }
  EXPECT_EQ(with, 6);
  EXPECT_EQ(without, 9);
}

TEST(SpanningTrees, WeightedNetworkIsDetL) {
  Network net({false, false, true}, {{0, 1, 2.0, 0}, {0, 2, 0.5, 0}, {1, 2, 3.0, 0}, {1, 2, 1.0, 1}});
  double w = 0;
  for (const auto& t : enumerate_wired_spanning_trees(net)) {
    double p = 1;
    for (int e : t) p *= net.edge(e).conductance;
    w += p;
  }
  EXPECT_NEAR(spanning_tree_weight(net).weight, w, 1e-12);
  EXPECT_FALSE(spanning_tree_weight(net).tree_count.has_value());
}

TEST(ProductIdentity, TwoSiteBothOrders) {
  auto net = two_site();
  auto a = green_product_identity(net);
  EXPECT_NEAR(a.lhs, 16.0 / 15, 1e-14);
  EXPECT_NEAR(a.rhs, 16.0 / 15, 1e-14);
  std::vector<int> rev{net.interior()[1], net.interior()[0]};
  auto b = green_product_identity(net, rev);
  EXPECT_NEAR(b.rhs, a.rhs, 1e-14);
  auto s = green_product_identity(single_site());
  EXPECT_NEAR(s.lhs, s.rhs, 0.0);
}

TEST(ProductIdentity, AnyOrderingOnWeightedBox) {
  auto net = add_mass(box({4, 3}), std::vector<double>{0, 0.1, 0, 0.5, 0, 0, 2, 0, 0, 0, 0.3, 0});
  std::vector<int> order(net.interior().begin(), net.interior().end());
  std::mt19937 rng(5);
  double first = green_product_identity(net, order).deviation;
  EXPECT_LE(first, 1e-9);
  for (int r = 0; r < 5; ++r) {
    std::shuffle(order.begin(), order.end(), rng);
    auto p = green_product_identity(net, order);
    EXPECT_LE(p.deviation, 1e-9);
    EXPECT_NEAR(p.deviation, first, 1e-9);
  }
}

TEST(Harmonic, ConstantAndLinear) {
  auto net = box({3, 3});
  std::vector<double> f(static_cast<std::size_t>(net.vertex_count()), 2.5);
  auto F = harmonic_extension(net, f);
  for (int i = 0; i < F.size(); ++i) EXPECT_NEAR(F(i), 2.5, 1e-12);

  auto chain = unit_chain(3);
  std::vector<double> g{0, 0, 0, 3};
  auto G = harmonic_extension(chain, g);
  EXPECT_NEAR(G(0), 1.0, 1e-12);
  EXPECT_NEAR(G(1), 2.0, 1e-12);
}

TEST(Harmonic, TwoSiteIndicator) {
  auto net = two_site();
  int x1 = net.interior()[0];
  std::vector<double> f(static_cast<std::size_t>(net.vertex_count()), 0.0);
  for (int e : net.incident(x1))
    if (net.is_boundary(net.other_end(e, x1))) f[static_cast<std::size_t>(net.other_end(e, x1))] = 1.0;
  auto F = harmonic_extension(net, f);
  EXPECT_NEAR(F(0), 0.8, 1e-12);
  EXPECT_NEAR(F(1), 0.2, 1e-12);
}

TEST(Harmonic, MaximumPrincipleAndResidual) {
  auto net = box({5, 4});
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2, 3);
  std::vector<double> f(static_cast<std::size_t>(net.vertex_count()));
  for (auto& v : f) v = u(rng);
  double lo = 1e9, hi = -1e9;
  for (int b : net.boundary()) lo = std::min(lo, f[static_cast<std::size_t>(b)]), hi = std::max(hi, f[static_cast<std::size_t>(b)]);
  auto F = harmonic_extension(net, f);
  EXPECT_GE(F.minCoeff(), lo - 1e-12);
  EXPECT_LE(F.maxCoeff(), hi + 1e-12);
  // mean value property at every interior vertex
  for (int x : net.interior()) {
    double avg = 0;
    for (int e : net.incident(x)) {
      int y = net.other_end(e, x);
      double fy = net.is_boundary(y) ? f[static_cast<std::size_t>(y)] : F(net.interior_index(y));
      avg += net.edge(e).conductance * fy;
    }
    EXPECT_NEAR(F(net.interior_index(x)), avg / net.lambda(x), 1e-10);
  }
}

TEST(Solver, SparseAgreesWithDense) {
  auto net = box({50, 45});  // above the dense limit
  LaplaceSolver s(net);
  EXPECT_FALSE(s.dense());
  Eigen::VectorXd b = Eigen::VectorXd::Ones(net.interior_count());
  Eigen::VectorXd u = s.solve(b);
  EXPECT_LT((sparse_laplacian(net) * u - b).norm() / b.norm(), 1e-9);
}

TEST(GreenMc, ExactAndWithinStderr) {
  auto one = single_site();
  auto e = green_mc(one, 0, 0, 1000, 1);
  EXPECT_DOUBLE_EQ(e.mean, 1.0);
  EXPECT_DOUBLE_EQ(e.stderr_, 0.0);

  auto net = two_site();
  auto G = green(net);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      auto m = green_mc(net, x, y, 100000, 17 + 2 * x + y);
      EXPECT_LT(std::abs(m.mean - G(x, y)), 4 * m.stderr_) << x << "," << y;
    }
}

TEST(GreenMc, WeightedNetwork) {
  auto net = add_mass(box({3, 2}), std::vector<double>{0.5, 0, 0, 1, 0, 0});
  auto G = green(net);
  for (auto [x, y] : {std::pair{0, 0}, std::pair{0, 4}, std::pair{3, 5}}) {
    auto m = green_mc(net, x, y, 50000, 99 + x * 7 + y);
    EXPECT_LT(std::abs(m.mean - G(x, y)), 4 * m.stderr_) << x << "," << y;
  }
}
