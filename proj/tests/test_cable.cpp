#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"
#include "gfflab/cable.hpp"
#include "gfflab/laplace.hpp"
#include "gfflab/stats.hpp"

using namespace gfflab;
using namespace testing_util;

namespace {

int interior_edge(const Network& net) {
  for (int e = 0; e < net.edge_count(); ++e)
    if (!net.is_boundary(net.edge(e).a) && !net.is_boundary(net.edge(e).b)) return e;
  throw std::logic_error("no interior edge");
}

CableField flat_field(const Network& net, int m, double value) {
  CableField f;
  f.segments = m;
  f.vertex_count = net.vertex_count();
  f.values.assign(static_cast<std::size_t>(net.vertex_count() + net.edge_count() * (m - 1)), value);
  for (int b : net.boundary()) f.values[static_cast<std::size_t>(b)] = 0.0;
  for (int e = 0; e < net.edge_count(); ++e) f.lengths.push_back(1 / net.edge(e).conductance);
  f.hidden_zero.assign(static_cast<std::size_t>(net.edge_count() * m), 0);
  return f;
}

}  // namespace

TEST(Cable, LayoutAndEndpoints) {
  auto net = two_site();
  auto f = sample_cable_gff(net, 4, 1);
  EXPECT_EQ(f.values.size(), std::size_t(net.vertex_count() + 3 * net.edge_count()));
  for (int e = 0; e < net.edge_count(); ++e) {
    EXPECT_DOUBLE_EQ(f.lengths[static_cast<std::size_t>(e)], 4.0);
    EXPECT_EQ(f.point(e, 0, net), net.edge(e).a);
    EXPECT_EQ(f.point(e, 4, net), net.edge(e).b);
  }
  for (int b : net.boundary()) EXPECT_EQ(f.values[static_cast<std::size_t>(b)], 0.0);
  // point ids agree with subdivide()
  auto sub = subdivide_with_map(net, 4);
  for (int e = 0; e < net.edge_count(); ++e)
    for (int j = 1; j < 4; ++j)
      EXPECT_EQ(f.point(e, j, net), sub.edge_points[static_cast<std::size_t>(e)][static_cast<std::size_t>(j - 1)]);
}

TEST(Cable, SeedDeterminism) {
  auto net = square();
  EXPECT_EQ(sample_cable_gff(net, 3, 9), sample_cable_gff(net, 3, 9));
}

TEST(Cable, MidpointMatchesSubdividedGff) {
  auto net = two_site();
  // Z^2 edge: l = 4, midpoint conditional variance 1
  for (const auto& r : midpoint_law_check(net, interior_edge(net), 50000, 2)) EXPECT_TRUE(r.pass) << r.name;
  Network unit({true, false, false, true}, {{0, 1, 1.0, 0}, {1, 2, 1.0, 0}, {2, 3, 1.0, 0}});
  for (const auto& r : midpoint_law_check(unit, 1, 50000, 3)) EXPECT_TRUE(r.pass) << r.name;
}

TEST(Cable, BridgeVariance) {
  auto net = two_site();
  for (const auto& r : bridge_variance_check(net, interior_edge(net), 4, 50000, 4)) EXPECT_TRUE(r.pass) << r.name;
  for (const auto& r : bridge_variance_check(net, 0, 3, 50000, 5)) EXPECT_TRUE(r.pass) << r.name;
}

TEST(Cable, VertexCovarianceIndependentOfM) {
  auto net = two_site();
  auto G = green(net);
  for (int m : {1, 2, 4}) {
    CableSampler s(net, m);
    std::vector<double> xx(50000), xy(50000);
    for_each_replica(xx.size(), 6 + m, [&](std::size_t k, Engine& rng) {
      auto f = s.sample(rng);
      xx[k] = f.values[0] * f.values[0];
      xy[k] = f.values[0] * f.values[1];
    });
    EXPECT_TRUE(moment_test("G11", estimate_mean(xx), G(0, 0)).pass) << m;
    EXPECT_TRUE(moment_test("G12", estimate_mean(xy), G(0, 1)).pass) << m;
  }
}

TEST(Excursions, AllPositiveIsOne) {
  auto net = square();
  auto f = flat_field(net, 3, 1.5);
  auto exc = excursions(net, f);
  ASSERT_EQ(exc.size(), 1u);
  EXPECT_EQ(exc[0].sign, 1);
  // everything except the boundary vertices
  EXPECT_EQ(exc[0].points.size(), f.values.size() - net.boundary().size());
}

TEST(Excursions, SignChangeSplits) {
  // chain 0 - 1 - 2 - 3 with values (+1, -1) at the interior
  Network chain({true, false, false, true}, {{0, 1, 1.0, 0}, {1, 2, 1.0, 0}, {2, 3, 1.0, 0}});
  auto f = flat_field(chain, 2, 1.0);
  f.values[2] = -1.0;
  f.values[static_cast<std::size_t>(f.point(1, 1, chain))] = 0.3;
  f.values[static_cast<std::size_t>(f.point(2, 1, chain))] = -0.4;
  auto exc = excursions(chain, f);
  EXPECT_GE(exc.size(), 2u);
  // a hidden zero cuts a segment even without a sign change
  auto g = flat_field(chain, 2, 1.0);
  EXPECT_EQ(excursions(chain, g).size(), 1u);
  g.hidden_zero[static_cast<std::size_t>(1 * 2 + 0)] = 1;
  EXPECT_EQ(excursions(chain, g).size(), 2u);
  g.values[1] = 0.0;
  EXPECT_THROW(excursions(chain, g), std::domain_error);
}

TEST(Excursions, GlobalFlipFlipsSigns) {
  auto net = box({3, 2});
  auto f = sample_cable_gff(net, 3, 11);
  auto g = f;
  for (auto& v : g.values) v = -v;
  auto a = excursions(net, f), b = excursions(net, g);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].points, b[i].points);
    EXPECT_EQ(a[i].sign, -b[i].sign);
  }
}

TEST(Flip, InvolutionAndModulus) {
  auto net = box({3, 3});
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto f = sample_cable_gff(net, 4, 100 + s);
    auto exc = excursions(net, f);
    for (int i = 0; i < static_cast<int>(exc.size()); ++i) {
      auto g = flip_excursion(f, exc, i);
      EXPECT_EQ(flip_excursion(g, exc, i), f);
      for (std::size_t p = 0; p < f.values.size(); ++p) EXPECT_EQ(std::abs(g.values[p]), std::abs(f.values[p]));
    }
    EXPECT_THROW(flip_excursion(f, exc, static_cast<int>(exc.size())), std::out_of_range);
  }
  auto f = sample_cable_gff(net, 2, 1);
  EXPECT_THROW(flip_at(net, f, net.boundary()[0]), std::invalid_argument);
}

TEST(Flip, AnchoredFlipPreservesLaw) {
  for (const auto& r : flip_invariance_check(two_site(), 4, 0, 50000, 12)) EXPECT_TRUE(r.pass) << r.name;
  for (const auto& r : flip_invariance_check(box({3, 2}), 2, 2, 30000, 13)) EXPECT_TRUE(r.pass) << r.name;
}

TEST(Coupling, SubdividedOccupation) {
  for (int m : {1, 2})
    for (const auto& r : occupation_coupling_subdivided(two_site(), m, 30000, 14 + m)) EXPECT_TRUE(r.pass) << r.name;
}
