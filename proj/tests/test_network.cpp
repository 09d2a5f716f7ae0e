#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "common.hpp"
#include "gfflab/laplace.hpp"
#include "gfflab/network.hpp"

using namespace gfflab;
using namespace testing_util;

namespace {

void expect_lambda_rebuild(const Network& net) {
  for (int v = 0; v < net.vertex_count(); ++v) {
    double s = 0;
    for (int e : net.incident(v)) s += net.edge(e).conductance;
    EXPECT_DOUBLE_EQ(s, net.lambda(v)) << "vertex " << v;
  }
}

std::multiset<double> conductances(std::span<const Edge> edges) {
  std::multiset<double> out;
  for (const auto& e : edges) out.insert(e.conductance);
  return out;
}

}  // namespace

TEST(LatticeBox, SingleSite) {
  auto net = single_site();
  EXPECT_EQ(net.interior_count(), 1);
  EXPECT_EQ(static_cast<int>(net.boundary().size()), 4);
  EXPECT_EQ(net.edge_count(), 4);
  for (const auto& e : net.edges()) EXPECT_DOUBLE_EQ(e.conductance, 0.25);
  EXPECT_DOUBLE_EQ(net.lambda(net.interior()[0]), 1.0);
  EXPECT_EQ(net.lattice_dimension(), 2);
  expect_lambda_rebuild(net);
}

TEST(LatticeBox, TwoSite) {
  auto net = two_site();
  EXPECT_EQ(net.interior_count(), 2);
  EXPECT_EQ(net.edge_count(), 7);
  int inner = 0;
  for (const auto& e : net.edges()) {
    EXPECT_DOUBLE_EQ(e.conductance, 0.25);
    inner += !net.is_boundary(e.a) && !net.is_boundary(e.b);
  }
  EXPECT_EQ(inner, 1);
  for (int x : net.interior()) EXPECT_DOUBLE_EQ(net.lambda(x), 1.0);
  expect_lambda_rebuild(net);
}

TEST(LatticeBox, OneDimensionalPath) {
  std::vector<int> sides{2};
  auto net = build_lattice_box(1, sides);
  EXPECT_EQ(net.interior_count(), 2);
  EXPECT_EQ(static_cast<int>(net.boundary().size()), 2);
  EXPECT_EQ(net.edge_count(), 3);
  for (const auto& e : net.edges()) EXPECT_DOUBLE_EQ(e.conductance, 0.5);
  // boundary points sit at 0 and 3
  std::vector<double> xs;
  for (int b : net.boundary()) xs.push_back(net.coordinates()[static_cast<std::size_t>(b)][0]);
  std::sort(xs.begin(), xs.end());
  EXPECT_EQ(xs, (std::vector<double>{0.0, 3.0}));
}

TEST(LatticeBox, RejectsBadInput) {
  std::vector<int> none;
  EXPECT_THROW(build_lattice_box(0, none), std::invalid_argument);
  std::vector<int> zero{2, 0};
  EXPECT_THROW(build_lattice_box(2, zero), std::invalid_argument);
}

TEST(LatticeBox, ThreeDimensionalLambda) {
  auto net = box({3, 2, 2});
  EXPECT_EQ(net.interior_count(), 12);
  for (int x : net.interior()) EXPECT_NEAR(net.lambda(x), 1.0, 1e-15);
  for (const auto& e : net.edges()) EXPECT_DOUBLE_EQ(e.conductance, 1.0 / 6.0);
  expect_lambda_rebuild(net);
}

TEST(NetworkValidation, RejectsInvalidNetworks) {
  // zero conductance
  EXPECT_THROW(Network({false, true}, {{0, 1, 0.0, 0}}), std::invalid_argument);
  // self loop
  EXPECT_THROW(Network({false, true}, {{0, 0, 1.0, 0}, {0, 1, 1.0, 0}}), std::invalid_argument);
  // interior component with no path to the boundary
  EXPECT_THROW(Network({false, false, true, false}, {{0, 1, 1.0, 0}, {2, 3, 1.0, 0}}),
               std::invalid_argument);
}

TEST(AddMass, ZeroMassLeavesLambdas) {
  auto net = two_site();
  std::vector<double> k{0.0, 0.0};
  auto m = add_mass(net, k);
  for (int x : net.interior()) EXPECT_DOUBLE_EQ(m.lambda(x), net.lambda(x));
  EXPECT_EQ(m.edge_count(), net.edge_count());
  EXPECT_EQ(m.interior_count(), net.interior_count());
}

TEST(AddMass, SingleSiteLambdaTwo) {
  auto net = single_site();
  std::vector<double> k{1.0};
  auto m = add_mass(net, k);
  EXPECT_DOUBLE_EQ(m.lambda(m.interior()[0]), 2.0);
  EXPECT_GE(m.cemetery(), 0);
  EXPECT_TRUE(m.is_boundary(m.cemetery()));
  expect_lambda_rebuild(m);
}

TEST(AddMass, TwoSiteDiagonal) {
  auto net = two_site();
  std::vector<double> k{1.0, 0.0};
  auto L = laplacian(add_mass(net, k));
  EXPECT_DOUBLE_EQ(L(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(L(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(L(0, 1), -0.25);
}

TEST(AddMass, RejectsNegative) {
  auto net = two_site();
  std::vector<double> k{1.0, -0.5};
  EXPECT_THROW(add_mass(net, k), std::invalid_argument);
}

TEST(Contract, SingleSite) {
  auto w = contract_boundary(single_site());
  EXPECT_EQ(w.vertex_count(), 2);
  ASSERT_EQ(w.edges.size(), 4u);
  std::set<int> indices;
  for (const auto& e : w.edges) {
    EXPECT_TRUE((e.a == 0 && e.b == w.root) || (e.b == 0 && e.a == w.root));
    indices.insert(e.parallel_index);
  }
  EXPECT_EQ(indices.size(), 4u);
}

TEST(Contract, TwoSite) {
  auto net = two_site();
  auto w = contract_boundary(net);
  EXPECT_EQ(w.vertex_count(), 3);
  std::map<std::pair<int, int>, int> count;
  for (const auto& e : w.edges) count[{std::min(e.a, e.b), std::max(e.a, e.b)}]++;
  EXPECT_EQ((count[{0, 1}]), 1);
  EXPECT_EQ((count[{0, w.root}]), 3);
  EXPECT_EQ((count[{1, w.root}]), 3);
  EXPECT_EQ(conductances(w.edges), conductances(net.edges()));
  // edge_map is a bijection with inverse_map
  for (int e = 0; e < net.edge_count(); ++e) {
    int we = w.edge_map[static_cast<std::size_t>(e)];
    ASSERT_GE(we, 0);
    EXPECT_EQ(w.inverse_map[static_cast<std::size_t>(we)], e);
  }
}

TEST(Contract, UnitChain) {
  auto net = unit_chain(3);
  auto w = contract_boundary(net);
  EXPECT_EQ(w.vertex_count(), 3);
  EXPECT_EQ(w.edges.size(), 3u);
}

TEST(Contract, PreservesCountOnBigBox) {
  auto net = box({4, 3});
  auto w = contract_boundary(net);
  EXPECT_EQ(static_cast<int>(w.edges.size()), net.edge_count());
  EXPECT_EQ(conductances(w.edges), conductances(net.edges()));
}

TEST(Subdivide, IdentityAndSeries) {
  auto net = two_site();
  auto s1 = subdivide(net, 1);
  EXPECT_EQ(s1.interior_count(), net.interior_count());
  EXPECT_EQ(s1.edge_count(), net.edge_count());

  // single edge of conductance 1/4 split in two
  auto s2 = subdivide_with_map(Network({true, false, true}, {{0, 1, 0.25, 0}, {1, 2, 1.0, 0}}), 2);
  EXPECT_EQ(s2.segments, 2);
  for (const auto& e : s2.network.edges())
    if (e.a == 0 || e.b == 0) EXPECT_DOUBLE_EQ(e.conductance, 0.5);
  EXPECT_NEAR(effective_conductance(s2.network, 0, 1), 0.25, 1e-12);
  EXPECT_THROW(subdivide(net, 0), std::invalid_argument);
}

TEST(Subdivide, TwoSiteCount) {
  auto net = subdivide(two_site(), 2);
  EXPECT_EQ(net.interior_count(), 9);
  EXPECT_EQ(net.edge_count(), 14);
  expect_lambda_rebuild(net);
}

TEST(Subdivide, ComposesMultiplicatively) {
  auto net = two_site();
  auto a = subdivide(subdivide(net, 2), 3);
  auto b = subdivide(net, 6);
  EXPECT_EQ(a.interior_count(), b.interior_count());
  EXPECT_EQ(conductances(a.edges()), conductances(b.edges()));
  // same Green function at the original vertices
  auto ga = green(a), gb = green(b);
  for (int x : net.interior())
    for (int y : net.interior())
      EXPECT_NEAR(ga(a.interior_index(x), a.interior_index(y)), gb(b.interior_index(x), b.interior_index(y)), 1e-10);
}

TEST(Subdivide, EffectiveConductanceInvariant) {
  auto net = box({3, 2});
  auto sub = subdivide(net, 3);
  for (int a : {0, 2, 4})
    for (int b : {1, 5, net.boundary()[0]})
      if (a != b)
        EXPECT_NEAR(effective_conductance(net, a, b), effective_conductance(sub, a, b), 1e-10);
}

TEST(Serialization, JsonRoundTrip) {
  auto net = add_mass(box({2, 2}), std::vector<double>{0.5, 0.0, 1.0, 0.25});
  auto back = network_from_json(network_to_json(net));
  EXPECT_EQ(back.vertex_count(), net.vertex_count());
  EXPECT_EQ(back.edge_count(), net.edge_count());
  for (int v = 0; v < net.vertex_count(); ++v) {
    EXPECT_EQ(back.is_boundary(v), net.is_boundary(v));
    EXPECT_DOUBLE_EQ(back.lambda(v), net.lambda(v));
  }
  EXPECT_TRUE(laplacian(back).isApprox(laplacian(net), 0.0));
}

TEST(Serialization, LatticeSpec) {
  auto net = lattice_from_spec("d=2,w=8,h=8");
  EXPECT_EQ(net.interior_count(), 64);
  auto cube = lattice_from_spec("d=3,sides=4x4x4");
  EXPECT_EQ(cube.interior_count(), 64);
  EXPECT_THROW(lattice_from_spec("d=2,w=0,h=3"), std::invalid_argument);
}

TEST(PickEdge, FollowsConductances) {
  Network net({false, true, true}, {{0, 1, 1.0, 0}, {0, 2, 3.0, 0}});
  EXPECT_EQ(net.other_end(net.pick_edge(0, 0.1), 0), 1);
  EXPECT_EQ(net.other_end(net.pick_edge(0, 0.3), 0), 2);
  EXPECT_EQ(net.other_end(net.pick_edge(0, 0.999), 0), 2);
}
