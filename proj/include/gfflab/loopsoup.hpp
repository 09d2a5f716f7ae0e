#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gfflab/exact.hpp"
#include "gfflab/loops.hpp"
#include "gfflab/network.hpp"
#include "gfflab/rng.hpp"
#include "gfflab/stats.hpp"
#include "gfflab/wilson.hpp"

namespace gfflab {

/// Multiset of canonical loops. `intensity` is alpha for oriented soups and
/// c = 2 alpha for unoriented ones.
struct LoopSoup {
  std::vector<Loop> loops;
  double intensity = 1.0;
  bool oriented = true;
};

/// log(lambda_x G_{D minus forbidden}(x, x)), the mu-mass of loops through x
/// avoiding `forbidden` (vertex ids).
double mass_loops_through(const Network& network, int x, std::span<const int> forbidden = {});

/// Total loop mass, -log(det L / prod lambda).
double total_loop_mass(const Network& network);

/// Splits an erased loop with k returns into the loops given by the cycles of
/// a uniform permutation of its k excursions.
std::vector<Loop> split_erased_loop(const ErasedLoop& erased, Engine& rng);

/// Sum over compositions (j_1..j_r) of k of 1 / (r! j_1 ... j_r), exactly.
Rational split_check(int k);

/// Oriented soup of intensity 1 from one Wilson run.
LoopSoup soup_from_wilson(const WilsonResult& run, Engine& rng);

/// Exact sample of the oriented soup with intensity alpha * mu.
LoopSoup sample_soup(const Network& network, double alpha, Engine& rng);
LoopSoup sample_soup(const Network& network, double alpha, std::uint64_t seed);

/// Keeps each loop independently with probability p.
LoopSoup thin(const LoopSoup& soup, double p, Engine& rng);
LoopSoup superpose(const LoopSoup& a, const LoopSoup& b);

struct SoupOccupation {
  std::vector<int> visits;     // number of visits at x, by interior index
  std::vector<double> time;    // sum over visits of Exp(1) / lambda_x
  std::vector<int> traversals; // T(e), per edge id, in either direction
};

SoupOccupation occupation_fields(const Network& network, const LoopSoup& soup, Engine& rng);

/// Adds independent Gamma(alpha, 1/lambda_x) variables, the contribution of
/// the loops that stay at a single vertex.
std::vector<double> add_stationary(const Network& network, std::span<const double> time, double alpha,
                                   Engine& rng);

/// Forgets orientation (alpha -> c = 2 alpha) or orients each loop by a fair
/// coin (c -> alpha = c / 2).
LoopSoup convert_orientation(const LoopSoup& soup, bool to_unoriented, Engine& rng);

/// Uniform independent pairing of pipe-ends at each site, traced into loops.
/// `T` is indexed by edge id; only edges between interior vertices may be
/// nonzero and each site sum must be even.
LoopSoup resample_pairings(const Network& network, std::span<const int> T, Engine& rng);

/// (2u)! / (2^u u!)
double pairings_count(int u);

/// P[T = t] for the unoriented soup with c = 1 on a lattice network. Returns 0
/// for inadmissible t.
double edge_law_probability(const Network& network, std::span<const int> t);

/// All admissible edge fields supported on interior edges with |t| <= cutoff.
std::vector<std::vector<int>> admissible_edge_fields(const Network& network, int cutoff);

// Monte Carlo checks used by the tests, the acceptance suite and the CLI.

TestReport empty_soup_check(const Network& network, double alpha, std::size_t replicas, std::uint64_t seed,
                            double sigma = 4.0);
/// Mean and variance of the number of loops through x against Poisson(mass).
std::vector<TestReport> loops_through_check(const Network& network, int x, std::size_t replicas,
                                            std::uint64_t seed, double sigma = 4.0);
/// thin(p) loop counts vs Poisson(p mu); thin(p) + thin(1 - p) of independent
/// soups vs a fresh soup.
std::vector<TestReport> thinning_check(const Network& network, double p, std::size_t replicas,
                                       std::uint64_t seed, double sigma = 4.0);
/// E[exp(-sum k W_alpha)] against (det L / det(L + diag k))^alpha.
TestReport soup_laplace_check(const Network& network, std::span<const double> k, double alpha,
                              std::size_t replicas, std::uint64_t seed, double sigma = 4.0);
/// E[prod (1 + k/lambda)^{-V_alpha}] against (prod (1 + k/lambda) det L / det(L + diag k))^alpha.
TestReport soup_visits_laplace_check(const Network& network, std::span<const double> k, double alpha,
                                     std::size_t replicas, std::uint64_t seed, double sigma = 4.0);
/// Per-site comparison of V - 1 from Wilson with the soup visit field.
std::vector<TestReport> visits_vs_wilson_check(const Network& network, std::size_t replicas, std::uint64_t seed,
                                               double sigma = 4.0);
/// W_{1/2} against Gamma^2 / 2: per-site KS and pairwise second moments.
std::vector<TestReport> isomorphism_check(const Network& network, std::size_t replicas, std::uint64_t seed,
                                          double sigma = 4.0);
/// Chi-square of the edge field law for |t| <= cutoff.
TestReport edge_law_check(const Network& network, std::size_t replicas, std::uint64_t seed, int cutoff = 8,
                          double sigma = 4.0);
/// Loop-count law of resampled pairings against fresh c = 1 soups.
std::vector<TestReport> pairing_invariance_check(const Network& network, std::size_t replicas,
                                                 std::uint64_t seed, double sigma = 4.0);

}  // namespace gfflab
