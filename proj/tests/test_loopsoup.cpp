#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "common.hpp"
#include "gfflab/laplace.hpp"
#include "gfflab/loopsoup.hpp"
#include "gfflab/rng.hpp"
#include "gfflab/stats.hpp"

using namespace gfflab;
using namespace testing_util;

namespace {

int edge_between(const Network& net, int a, int b) {
  for (int e = 0; e < net.edge_count(); ++e)
    if ((net.edge(e).a == a && net.edge(e).b == b) || (net.edge(e).a == b && net.edge(e).b == a)) return e;
  throw std::logic_error("no such edge");
}

// Interior 4-cycle of the 2x2 box: 0-1, 1-3, 3-2, 2-0.
std::vector<int> cycle_edges(const Network& net) {
  return {edge_between(net, 0, 1), edge_between(net, 1, 3), edge_between(net, 3, 2), edge_between(net, 2, 0)};
}

// Number of loops produced by each pairing choice when every cycle edge
// carries two strands. Strands are (edge, copy); the four ends at a site are
// matched by one of three pairings.
std::map<int, double> enumerate_loop_counts(const Network& net) {
  auto ce = cycle_edges(net);
  std::map<int, double> law;
  const int pairings[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
  for (int code = 0; code < 81; ++code) {
    std::vector<int> parent(8);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    int c = code;
    for (int x = 0; x < 4; ++x) {
      std::vector<int> ends;  // strand ids at x
      for (int i = 0; i < 4; ++i) {
        const auto& ed = net.edge(ce[i]);
        if (ed.a == x || ed.b == x) ends.push_back(2 * i), ends.push_back(2 * i + 1);
      }
      const int* p = pairings[c % 3];
      c /= 3;
      parent[find(ends[p[0]])] = find(ends[p[1]]);
      parent[find(ends[p[2]])] = find(ends[p[3]]);
    }
    int loops = 0;
    for (int s = 0; s < 8; ++s) loops += find(s) == s;
    law[loops] += 1.0 / 81;
  }
  return law;
}

}  // namespace

TEST(SplitCheck, SumsToOne) {
  for (int k = 1; k <= 12; ++k) EXPECT_EQ(split_check(k), Rational(1)) << k;
  EXPECT_THROW(split_check(0), std::invalid_argument);
  EXPECT_THROW(split_check(13), std::invalid_argument);
}

TEST(SplitCheck, KThreeByHand) {
  // 1/3 + 2 * (1/4) + 1/6
  EXPECT_EQ(Rational(1, 3) + 2 * Rational(1, 4) + Rational(1, 6), split_check(3));
}

TEST(LoopsThrough, Masses) {
  EXPECT_NEAR(mass_loops_through(single_site(), 0), 0.0, 1e-15);
  EXPECT_NEAR(mass_loops_through(two_site(), 0), std::log(16.0 / 15), 1e-14);
  // the elimination sum is log det G
  auto net = box({3, 2});
  std::vector<int> forbidden;
  double sum = 0;
  for (int x : net.interior()) {
    sum += mass_loops_through(net, x, forbidden);
    forbidden.push_back(x);
  }
  EXPECT_NEAR(sum, -det_laplacian(net).log_value, 1e-12);
  EXPECT_NEAR(total_loop_mass(net), sum, 1e-12);
  EXPECT_THROW(mass_loops_through(net, 0, std::vector<int>{0}), std::invalid_argument);
}

TEST(SoupFromWilson, VisitsAreVMinusOne) {
  auto net = box({3, 3});
  for (std::uint64_t s = 0; s < 200; ++s) {
    Engine rng = make_engine(31, s);
    auto run = wilson_ust(net, {}, rng, false);
    auto soup = soup_from_wilson(run, rng);
    auto occ = occupation_fields(net, soup, rng);
    for (int i = 0; i < net.interior_count(); ++i)
      EXPECT_EQ(occ.visits[static_cast<std::size_t>(i)], run.occupation.V[static_cast<std::size_t>(i)] - 1);
    for (const auto& l : soup.loops) EXPECT_EQ(canonical_unrooted(l), l);
  }
}

TEST(SplitErased, ExcursionsArePreserved) {
  auto net = square();
  for (std::uint64_t s = 0; s < 200; ++s) {
    Engine rng = make_engine(32, s);
    auto run = wilson_ust(net, {}, rng);
    for (const auto& er : run.erased) {
      auto pieces = split_erased_loop(er, rng);
      int total_len = 0, total_returns = 0;
      for (const auto& l : pieces) {
        EXPECT_EQ(l.root(), er.root);
        total_len += l.length();
        total_returns += visits(l, er.root);
      }
      EXPECT_EQ(total_len, er.piece.steps());
      EXPECT_EQ(total_returns, er.returns());
    }
  }
}

TEST(Soup, EmptyProbabilities) {
  EXPECT_TRUE(empty_soup_check(two_site(), 1.0, 100000, 33).pass);
  EXPECT_TRUE(empty_soup_check(two_site(), 0.5, 100000, 34).pass);
  EXPECT_TRUE(empty_soup_check(square(), 2.0, 100000, 35).pass);
  auto one = sample_soup(single_site(), 1.0, 1);
  EXPECT_TRUE(one.loops.empty());
}

TEST(Soup, LoopsThroughPoisson) {
  for (const auto& r : loops_through_check(two_site(), 0, 100000, 36)) EXPECT_TRUE(r.pass) << r.name;
}

TEST(Soup, ThinningAndSuperposition) {
  for (const auto& r : thinning_check(square(), 0.3, 50000, 37)) EXPECT_TRUE(r.pass) << r.name;
}

TEST(Soup, VisitLawMatchesWilson) {
  for (const auto& r : visits_vs_wilson_check(two_site(), 50000, 38)) EXPECT_TRUE(r.pass) << r.name;
}

TEST(Soup, LaplaceFunctionals) {
  std::vector<double> k{1.0, 0.0};
  EXPECT_TRUE(soup_laplace_check(two_site(), k, 0.5, 100000, 39).pass);
  EXPECT_TRUE(soup_laplace_check(two_site(), k, 1.0, 100000, 40).pass);
  std::vector<double> k4{0.5, 0, 0.2, 1};
  EXPECT_TRUE(soup_visits_laplace_check(square(), k4, 0.5, 100000, 41).pass);
  EXPECT_TRUE(soup_visits_laplace_check(square(), k4, 2.0, 50000, 42).pass);
}

TEST(Occupation, EmptyAndSingleLoop) {
  auto net = two_site();
  Engine rng = make_engine(43, 0);
  auto empty = occupation_fields(net, LoopSoup{}, rng);
  for (int v : empty.visits) EXPECT_EQ(v, 0);
  for (double t : empty.time) EXPECT_EQ(t, 0.0);
  for (int t : empty.traversals) EXPECT_EQ(t, 0);

  int e = edge_between(net, 0, 1);
  LoopSoup one{{Loop{{0, 1}, {e, e}}}, 1.0, true};
  auto occ = occupation_fields(net, one, rng);
  EXPECT_EQ(occ.visits, (std::vector<int>{1, 1}));
  EXPECT_EQ(occ.traversals[static_cast<std::size_t>(e)], 2);
  EXPECT_GT(occ.time[0], 0.0);
}

TEST(Occupation, HalfEdgeSumIsVisitCount) {
  // loops on interior edges only: visits(x) = (1/2) sum of T over edges at x
  auto net = square();
  for (std::uint64_t s = 0; s < 200; ++s) {
    Engine rng = make_engine(44, s);
    auto soup = sample_soup(net, 1.0, rng);
    auto occ = occupation_fields(net, soup, rng);
    for (int x = 0; x < 4; ++x) {
      int sum = 0;
      for (int e : net.incident(x)) sum += occ.traversals[static_cast<std::size_t>(e)];
      EXPECT_EQ(2 * occ.visits[static_cast<std::size_t>(x)], sum);
    }
  }
}

TEST(Stationary, GammaLaws) {
  auto net = single_site();
  const std::size_t n = 40000;
  std::vector<double> half(n), one(n), big(n);
  std::vector<double> zero{0.0};
  for_each_replica(n, 45, [&](std::size_t k, Engine& rng) {
    half[k] = add_stationary(net, zero, 0.5, rng)[0];
    one[k] = add_stationary(net, zero, 1.0, rng)[0];
    big[k] = add_stationary(net, zero, 7.0, rng)[0];
  });
  // Z^2 / 2 <= t  <=>  |Z| <= sqrt(2t)
  EXPECT_TRUE(ks_test("alpha 1/2", half, [](double t) { return t <= 0 ? 0.0 : std::erf(std::sqrt(t)); }).pass);
  EXPECT_TRUE(ks_test("alpha 1", one, [](double t) { return t <= 0 ? 0.0 : 1 - std::exp(-t); }).pass);
  EXPECT_TRUE(moment_test("alpha 7 mean", estimate_mean(big), 7.0).pass);
  // with general lambda the scale is 1 / lambda
  auto heavy = add_mass(net, std::vector<double>{1.0});
  std::vector<double> m(n);
  for_each_replica(n, 46, [&](std::size_t k, Engine& rng) { m[k] = add_stationary(heavy, zero, 1.0, rng)[0]; });
  EXPECT_TRUE(moment_test("lambda 2 mean", estimate_mean(m), 0.5).pass);
}

TEST(Isomorphism, TwoSite) {
  for (const auto& r : isomorphism_check(single_site(), 20000, 47)) EXPECT_TRUE(r.pass) << r.name;
  for (const auto& r : isomorphism_check(two_site(), 50000, 48)) EXPECT_TRUE(r.pass) << r.name;
}

TEST(Orientation, ConversionsKeepOccupation) {
  auto net = square();
  for (std::uint64_t s = 0; s < 100; ++s) {
    Engine rng = make_engine(49, s);
    auto soup = sample_soup(net, 0.5, rng);
    auto un = convert_orientation(soup, true, rng);
    EXPECT_FALSE(un.oriented);
    EXPECT_DOUBLE_EQ(un.intensity, 1.0);
    auto back = convert_orientation(un, false, rng);
    EXPECT_TRUE(back.oriented);
    EXPECT_DOUBLE_EQ(back.intensity, 0.5);
    Engine r1 = make_engine(1, 1), r2 = make_engine(1, 1), r3 = make_engine(1, 1);
    auto a = occupation_fields(net, soup, r1), b = occupation_fields(net, un, r2), c = occupation_fields(net, back, r3);
    EXPECT_EQ(a.visits, b.visits);
    EXPECT_EQ(a.visits, c.visits);
    EXPECT_EQ(a.traversals, b.traversals);
    EXPECT_EQ(a.traversals, c.traversals);
  }
  Engine rng = make_engine(50, 0);
  EXPECT_TRUE(convert_orientation(LoopSoup{}, true, rng).loops.empty());
}

TEST(Pairings, Counts) {
  EXPECT_EQ(pairings_count(0), 1.0);
  EXPECT_EQ(pairings_count(1), 1.0);
  EXPECT_EQ(pairings_count(2), 3.0);
  EXPECT_EQ(pairings_count(3), 15.0);
}

TEST(Pairings, ForcedExamples) {
  auto net = square();
  Engine rng = make_engine(51, 0);
  std::vector<int> T(static_cast<std::size_t>(net.edge_count()), 0);
  T[static_cast<std::size_t>(edge_between(net, 0, 1))] = 2;
  auto s = resample_pairings(net, T, rng);
  ASSERT_EQ(s.loops.size(), 1u);
  EXPECT_EQ(s.loops[0].length(), 2);
  EXPECT_FALSE(s.oriented);

  std::fill(T.begin(), T.end(), 0);
  for (int e : cycle_edges(net)) T[static_cast<std::size_t>(e)] = 1;
  for (int r = 0; r < 20; ++r) {
    auto c = resample_pairings(net, T, rng);
    ASSERT_EQ(c.loops.size(), 1u);
    EXPECT_EQ(c.loops[0].length(), 4);
  }
  T[static_cast<std::size_t>(cycle_edges(net)[0])] = 2;  // odd site sums
  EXPECT_THROW(resample_pairings(net, T, rng), std::invalid_argument);
}

TEST(Pairings, DoubledCycleMatchesEnumeration) {
  auto net = square();
  std::vector<int> T(static_cast<std::size_t>(net.edge_count()), 0);
  for (int e : cycle_edges(net)) T[static_cast<std::size_t>(e)] = 2;
  auto law = enumerate_loop_counts(net);
  double total = 0;
  for (auto [k, p] : law) total += p;
  EXPECT_NEAR(total, 1.0, 1e-12);
  const std::size_t n = 40000;
  std::vector<int> count(n);
  for_each_replica(n, 52, [&](std::size_t k, Engine& rng) { count[k] = int(resample_pairings(net, T, rng).loops.size()); });
  std::vector<double> obs(5, 0.0), exp(5, 0.0);
  for (int c : count) obs[static_cast<std::size_t>(std::min(c, 4))] += 1;
  for (auto [k, p] : law) exp[static_cast<std::size_t>(std::min(k, 4))] += p * double(n);
  EXPECT_TRUE(chi2_test("doubled cycle", obs, exp).pass);
}

TEST(EdgeLaw, ExactValues) {
  auto net = square();
  std::vector<int> zero(static_cast<std::size_t>(net.edge_count()), 0);
  EXPECT_NEAR(edge_law_probability(net, zero), 1 / std::sqrt(4.0 / 3), 1e-14);
  auto odd = zero;
  odd[static_cast<std::size_t>(edge_between(net, 0, 1))] = 1;
  EXPECT_EQ(edge_law_probability(net, odd), 0.0);
  // every admissible field has even site sums and the total mass is below 1
  double sum = 0;
  for (const auto& t : admissible_edge_fields(net, 8)) {
    for (int x = 0; x < 4; ++x) {
      int s = 0;
      for (int e : net.incident(x)) s += t[static_cast<std::size_t>(e)];
      EXPECT_EQ(s % 2, 0);
    }
    sum += edge_law_probability(net, t);
  }
  EXPECT_LT(sum, 1.0);
  EXPECT_GT(sum, 0.99);
}

TEST(EdgeLaw, MonteCarloAndPairingInvariance) {
  EXPECT_TRUE(edge_law_check(square(), 200000, 53).pass);
  for (const auto& r : pairing_invariance_check(square(), 50000, 54)) EXPECT_TRUE(r.pass) << r.name;
}
