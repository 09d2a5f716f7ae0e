#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "common.hpp"
#include "gfflab/laplace.hpp"
#include "gfflab/rng.hpp"
#include "gfflab/stats.hpp"
#include "gfflab/wilson.hpp"

using namespace gfflab;
using namespace testing_util;

namespace {

int edge_between(const Network& net, int a, int b) {
  for (int e = 0; e < net.edge_count(); ++e)
    if ((net.edge(e).a == a && net.edge(e).b == b) || (net.edge(e).a == b && net.edge(e).b == a)) return e;
  throw std::logic_error("no such edge");
}

WalkPath path(const Network& net, std::vector<int> vs) {
  WalkPath p;
  p.vertices = vs;
  for (std::size_t i = 0; i + 1 < vs.size(); ++i) p.edges.push_back(edge_between(net, vs[i], vs[i + 1]));
  return p;
}

int boundary_neighbour(const Network& net, int x) {
  for (int e : net.incident(x))
    if (net.is_boundary(net.other_end(e, x))) return net.other_end(e, x);
  throw std::logic_error("no boundary neighbour");
}

}  // namespace

TEST(Walk, SingleSiteExitsImmediately) {
  auto net = single_site();
  std::vector<double> counts(4, 0.0);
  auto edges = net.incident(0);
  for (std::uint64_t s = 0; s < 8000; ++s) {
    Engine rng = make_engine(5, s);
    auto w = run_walk(net, 0, rng);
    ASSERT_EQ(w.steps(), 1);
    EXPECT_TRUE(net.is_boundary(w.vertices.back()));
    counts[static_cast<std::size_t>(std::find(edges.begin(), edges.end(), w.edges[0]) - edges.begin())] += 1;
  }
  std::vector<double> expected(4, 2000.0);
  EXPECT_TRUE(chi2_test("exit edge", counts, expected).pass);
}

TEST(Walk, ContinuousHoldingExp1) {
  auto net = single_site();
  std::vector<double> t(50000);
  for_each_replica(t.size(), 6, [&](std::size_t k, Engine& rng) {
    auto w = run_walk(net, 0, rng, true);
    t[k] = w.holding[0];
  });
  auto r = ks_test("holding", t, [](double x) { return x <= 0 ? 0.0 : 1 - std::exp(-x); });
  EXPECT_TRUE(r.pass) << r.statistic;
}

TEST(Walk, VisitsMatchGreenDiagonal) {
  auto net = two_site();
  std::vector<double> v(100000);
  for_each_replica(v.size(), 7, [&](std::size_t k, Engine& rng) {
    auto w = run_walk(net, 0, rng);
    v[k] = double(std::count(w.vertices.begin(), w.vertices.end(), 0));
  });
  EXPECT_TRUE(moment_test("visits", estimate_mean(v), 16.0 / 15).pass);
}

TEST(Walk, StepCapIsAnError) {
  auto net = box({30, 30});
  Engine rng = make_engine(1, 0);
  EXPECT_THROW(run_walk(net, net.interior_index(465), rng, false, 3), std::runtime_error);
}

TEST(Walk, ConsecutiveVerticesJoinedByEdge) {
  auto net = box({4, 4});
  Engine rng = make_engine(2, 0);
  auto w = run_walk(net, 5, rng, true);
  ASSERT_EQ(w.vertices.size(), w.edges.size() + 1);
  ASSERT_EQ(w.holding.size(), w.edges.size());
  for (int i = 0; i < w.steps(); ++i)
    EXPECT_EQ(net.other_end(w.edges[static_cast<std::size_t>(i)], w.vertices[static_cast<std::size_t>(i)]),
              w.vertices[static_cast<std::size_t>(i) + 1]);
}

TEST(LoopErase, NoRepeats) {
  auto net = square();
  int out = boundary_neighbour(net, 2);
  auto p = path(net, {0, 2, out});
  auto le = loop_erase(p);
  EXPECT_EQ(le.lerw, p);
  EXPECT_TRUE(le.erased.empty());
}

TEST(LoopErase, SingleLoopAtStart) {
  // a -> b -> a -> c
  auto net = square();
  auto p = path(net, {0, 1, 0, 2});
  auto le = loop_erase(p);
  EXPECT_EQ(le.lerw.vertices, (std::vector<int>{0, 2}));
  ASSERT_EQ(le.erased.size(), 1u);
  EXPECT_EQ(le.erased[0].root, 0);
  EXPECT_EQ(le.erased[0].piece.vertices, (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(le.erased[0].returns(), 1);
}

TEST(LoopErase, LoopInTheMiddle) {
  // a -> b -> c -> b -> d
  auto net = square();
  int d = boundary_neighbour(net, 1);
  auto p = path(net, {0, 1, 3, 1, d});
  auto le = loop_erase(p);
  EXPECT_EQ(le.lerw.vertices, (std::vector<int>{0, 1, d}));
  ASSERT_EQ(le.erased.size(), 1u);
  EXPECT_EQ(le.erased[0].root, 1);
  EXPECT_EQ(le.erased[0].lerw_position, 1);
  EXPECT_EQ(le.erased[0].piece.vertices, (std::vector<int>{1, 3, 1}));
}

TEST(LoopErase, ErasedPieceCollectsAllReturns) {
  auto net = square();
  auto p = path(net, {0, 1, 0, 2, 0, 1, 3});
  auto le = loop_erase(p);
  EXPECT_EQ(le.lerw.vertices, (std::vector<int>{0, 1, 3}));
  ASSERT_EQ(le.erased.size(), 1u);
  EXPECT_EQ(le.erased[0].returns(), 2);
  EXPECT_EQ(le.erased[0].excursions().size(), 2u);
}

TEST(LoopErase, ResplicesBitExactly) {
  auto net = box({4, 3});
  for (std::uint64_t s = 0; s < 300; ++s) {
    Engine rng = make_engine(77, s);
    auto w = run_walk(net, static_cast<int>(s % 12), rng, s % 2 == 1);
    auto le = loop_erase(w);
    EXPECT_EQ(resplice(le), w);
    // the LERW is self-avoiding
    auto v = le.lerw.vertices;
    std::sort(v.begin(), v.end());
    EXPECT_EQ(std::adjacent_find(v.begin(), v.end()), v.end());
  }
}

TEST(Wilson, SingleSite) {
  auto net = single_site();
  std::vector<double> counts(4, 0.0);
  for (std::uint64_t s = 0; s < 4000; ++s) {
    auto r = wilson_ust(net, {}, s);
    ASSERT_EQ(r.tree.edges.size(), 1u);
    EXPECT_EQ(r.occupation.V[0], 1);
    EXPECT_TRUE(r.erased.empty());
    counts[static_cast<std::size_t>(r.tree.edges[0])] += 1;
  }
  std::vector<double> expected(4, 1000.0);
  EXPECT_TRUE(chi2_test("single-site tree", counts, expected).pass);
}

TEST(Wilson, TreesAreSpanning) {
  auto net = box({3, 3});
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto r = wilson_ust(net, {}, s, true);
    ASSERT_EQ(static_cast<int>(r.tree.edges.size()), net.interior_count());
    // union-find on the wired graph: acyclic with n edges and n + 1 vertices
    auto w = contract_boundary(net);
    std::vector<int> parent(static_cast<std::size_t>(w.vertex_count()));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (int e : r.tree.edges) {
      const auto& we = w.edges[static_cast<std::size_t>(w.edge_map[static_cast<std::size_t>(e)])];
      int a = find(we.a), b = find(we.b);
      EXPECT_NE(a, b);
      parent[a] = b;
    }
    for (int x = 0; x < net.interior_count(); ++x) {
      EXPECT_GE(r.occupation.V[x], 1);
      EXPECT_GT(r.occupation.W[x], 0.0);
    }
  }
}

TEST(Wilson, UniformOnTwoSiteAndSquare) {
  EXPECT_TRUE(verify_tree_law(two_site(), 100000, 8).pass);
  EXPECT_TRUE(verify_tree_law(square(), 100000, 9).pass);
  std::vector<int> rev{3, 2, 1, 0};
  EXPECT_TRUE(verify_tree_law(square(), 100000, 10, rev).pass);
}

TEST(Wilson, WeightedThreeVertexTreeLaw) {
  Network net({false, false, false, true},
              {{0, 1, 2.0, 0}, {1, 2, 0.5, 0}, {0, 3, 1.0, 0}, {2, 3, 3.0, 0}, {1, 3, 0.7, 0}, {0, 2, 0.2, 0}});
  double total = 0;
  for (const auto& t : enumerate_wired_spanning_trees(net)) total += tree_probability(net, t);
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_TRUE(verify_tree_law(net, 100000, 11).pass);
}

TEST(Wilson, NoErasureProbability) {
  auto net = two_site();
  std::vector<double> none(100000);
  for_each_replica(none.size(), 12, [&](std::size_t k, Engine& rng) {
    none[k] = wilson_ust(net, {}, rng).erased.empty() ? 1.0 : 0.0;
  });
  EXPECT_TRUE(moment_test("empty erasure", estimate_mean(none), 15.0 / 16).pass);
}

TEST(Wilson, SeedDeterminism) {
  auto net = box({3, 3});
  auto a = wilson_ust(net, {}, 5, true), b = wilson_ust(net, {}, 5, true);
  EXPECT_EQ(a.tree.edges, b.tree.edges);
  EXPECT_EQ(a.occupation.V, b.occupation.V);
  EXPECT_EQ(a.occupation.W, b.occupation.W);
}

TEST(OccupationLaplace, ExactValues) {
  EXPECT_NEAR(occupation_laplace_transform(two_site(), std::vector<double>{1, 0}), 15.0 / 31, 1e-14);
  EXPECT_NEAR(occupation_laplace_transform(single_site(), std::vector<double>{1}), 0.5, 1e-14);
  EXPECT_NEAR(occupation_laplace_transform(square(), std::vector<double>(4, 0.0)), 1.0, 1e-14);
}

TEST(OccupationLaplace, MonteCarlo) {
  for (const auto& r : verify_w_laplace(two_site(), std::vector<double>{1, 0}, 100000, 13)) EXPECT_TRUE(r.pass) << r.name;
  for (const auto& r : verify_w_laplace(single_site(), std::vector<double>{1}, 100000, 14)) EXPECT_TRUE(r.pass) << r.name;
  auto net = add_mass(box({3, 2}), std::vector<double>{0, 0.5, 0, 0, 0, 1});
  std::vector<int> order{5, 3, 1, 0, 2, 4};
  for (const auto& r : verify_w_laplace(net, std::vector<double>{0.3, 0, 1, 0.2, 0, 0}, 100000, 15, order))
    EXPECT_TRUE(r.pass) << r.name;
  auto zero = verify_w_laplace(two_site(), std::vector<double>{0, 0}, 1000, 16);
  for (const auto& r : zero) EXPECT_EQ(r.statistic, 0.0);
}

TEST(MarginalW, AnyVertexAnyOrdering) {
  EXPECT_TRUE(marginal_w_law(single_site(), 0, 50000, 17).pass);
  auto net = two_site();
  EXPECT_TRUE(marginal_w_law(net, 1, 50000, 18).pass);
  std::vector<int> rev{1, 0};
  EXPECT_TRUE(marginal_w_law(net, 1, 50000, 19, rev).pass);
  EXPECT_TRUE(marginal_w_law(square(), 3, 50000, 20).pass);
}

TEST(OrderingInvariance, JointMomentsOfVW) {
  auto net = square();
  std::vector<int> a{0, 1, 2, 3}, b{3, 0, 2, 1};
  const std::size_t n = 100000;
  std::vector<double> va(n), vb(n), wa(n), wb(n);
  for_each_replica(n, 21, [&](std::size_t k, Engine& rng) {
    auto r = wilson_ust(net, a, rng, true);
    va[k] = r.occupation.V[0] * r.occupation.V[3];
    wa[k] = r.occupation.W[1] * r.occupation.W[2];
  });
  for_each_replica(n, 22, [&](std::size_t k, Engine& rng) {
    auto r = wilson_ust(net, b, rng, true);
    vb[k] = r.occupation.V[0] * r.occupation.V[3];
    wb[k] = r.occupation.W[1] * r.occupation.W[2];
  });
  EXPECT_TRUE(two_sample_mean_test("V0 V3", estimate_mean(va), estimate_mean(vb)).pass);
  EXPECT_TRUE(two_sample_mean_test("W1 W2", estimate_mean(wa), estimate_mean(wb)).pass);
}

TEST(Coupling, WIsHalfSumOfSquaredGffs) {
  for (const auto& r : verify_w_coupling(two_site(), 50000, 23)) EXPECT_TRUE(r.pass) << r.name;
}
