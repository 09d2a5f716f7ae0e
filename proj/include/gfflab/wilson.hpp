#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gfflab/loops.hpp"
#include "gfflab/network.hpp"
#include "gfflab/rng.hpp"
#include "gfflab/stats.hpp"

namespace gfflab {

/// Z_0, e_1, Z_1, ...: edges[i] joins vertices[i] and vertices[i + 1].
/// holding[i] is the time spent at vertices[i] before step i (continuous
/// time only; empty for discrete walks).
struct WalkPath {
  std::vector<int> vertices;
  std::vector<int> edges;
  std::vector<double> holding;

  int steps() const { return static_cast<int>(edges.size()); }
  bool operator==(const WalkPath&) const = default;
};

inline constexpr std::uint64_t kDefaultStepCap = 1'000'000'000ULL;

/// Walk from `start` until it hits a vertex with stop[v] != 0 (the boundary
/// when `stop` is empty). Continuous time attaches Exp(1) / lambda holding
/// times. Throws std::runtime_error when the step cap is exceeded.
WalkPath run_walk(const Network& network, int start, Engine& rng, bool continuous_time = false,
                  std::uint64_t step_cap = kDefaultStepCap, std::span<const char> stop = {});

/// Piece of the walk removed at one vertex of the loop-erased path: the
/// closed sub-path from the first to the last visit at `root`.
struct ErasedLoop {
  int root = 0;
  int lerw_position = 0;  // index of root in the loop-erased path
  WalkPath piece;         // starts and ends at root; steps() > 0

  /// Number of excursions from root (returns to root).
  int returns() const;
  /// The piece as a rooted loop.
  Loop loop() const;
  /// The piece cut at its visits to root.
  std::vector<Loop> excursions() const;
};

struct LoopErasure {
  WalkPath lerw;
  std::vector<ErasedLoop> erased;
};

/// Chronological loop erasure. With r_j the last visit time of L_j, the
/// erased piece at L_j is Z[r_{j-1}+1 .. r_j] and L_{j+1} = Z_{r_j + 1}.
LoopErasure loop_erase(const WalkPath& path);

/// Inverse of loop_erase: re-inserts each erased piece at its root.
WalkPath resplice(const LoopErasure& erasure);

struct SpanningTree {
  std::vector<int> edges;   // original edge ids, sorted
  std::vector<int> branch;  // per entry of `edges`, the Wilson branch that added it
};

struct OccupationFields {
  std::vector<int> V;     // steps taken from x, by interior index
  std::vector<double> W;  // total holding time at x (continuous runs)
};

struct WilsonResult {
  SpanningTree tree;
  std::vector<ErasedLoop> erased;  // all branches, in excision order
  OccupationFields occupation;
};

/// Wilson's algorithm on the wired graph. `ordering` lists interior vertex
/// ids (empty = network order).
WilsonResult wilson_ust(const Network& network, std::span<const int> ordering, Engine& rng,
                        bool continuous_time = false);
WilsonResult wilson_ust(const Network& network, std::span<const int> ordering, std::uint64_t seed,
                        bool continuous_time = false);

/// w_c(T) det G for a tree given by original edge ids.
double tree_probability(const Network& network, std::span<const int> tree_edges);

/// det L / det(L + diag k), the common Laplace transform of W and of the
/// discrete field through prod (1 + k/lambda)^{-V}.
double occupation_laplace_transform(const Network& network, std::span<const double> k);

/// Moment tests for E[exp(-sum k W)] and E[prod (1 + k/lambda)^{-V}].
std::vector<TestReport> verify_w_laplace(const Network& network, std::span<const double> k,
                                         std::size_t replicas, std::uint64_t seed,
                                         std::span<const int> ordering = {}, double sigma = 4.0);

/// KS test of W(x) against Exp(mean G(x, x)).
TestReport marginal_w_law(const Network& network, int x, std::size_t replicas, std::uint64_t seed,
                          std::span<const int> ordering = {}, double sigma = 4.0);

/// Chi-square test of the Wilson tree law against w_c(T) det G.
TestReport verify_tree_law(const Network& network, std::size_t replicas, std::uint64_t seed,
                           std::span<const int> ordering = {}, double sigma = 4.0);

/// W against (Gamma_1^2 + Gamma_2^2) / 2: per-site KS and E[W_x W_y] =
/// G_xx G_yy + G_xy^2.
std::vector<TestReport> verify_w_coupling(const Network& network, std::size_t replicas,
                                          std::uint64_t seed, double sigma = 4.0);

}  // namespace gfflab
