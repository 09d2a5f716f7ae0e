#pragma once

#include <cstdint>
#include <vector>

#include "gfflab/field.hpp"
#include "gfflab/network.hpp"
#include "gfflab/rng.hpp"
#include "gfflab/stats.hpp"

namespace gfflab {

/// Cable-graph field observed at the network vertices and at m-1 equally
/// spaced points inside every edge. Edge e has length 1 / c_e.
///
/// Point ids: vertex ids first, then N + e*(m-1) + (j-1) for the j-th inner
/// point of edge e counted from edge.a (the same ids subdivide() assigns).
struct CableField {
  int segments = 1;
  int vertex_count = 0;
  std::vector<double> values;   // per point id; boundary vertices hold 0
  std::vector<double> lengths;  // per edge
  /// Per segment (index e*m + j, between positions j and j+1 of edge e):
  /// the bridge has a zero there although both ends have the same sign.
  std::vector<char> hidden_zero;

  int point(int edge, int j, const Network& network) const;
  bool operator==(const CableField&) const = default;
};

class CableSampler {
 public:
  CableSampler(const Network& network, int m);
  CableField sample(Engine& rng) const;
  const Network& network() const { return *network_; }

 private:
  const Network* network_;
  int m_;
  GffSampler vertex_sampler_;
};

CableField sample_cable_gff(const Network& network, int m, std::uint64_t seed);

struct Excursion {
  int sign = 1;
  std::vector<int> points;  // point ids, sorted
};

/// Sign components of the cable minus its zero set, as seen from the sample
/// points. Consecutive points are joined unless the sign changes or the
/// segment carries a hidden zero. Throws std::domain_error on an exact zero
/// at a non-boundary point.
std::vector<Excursion> excursions(const Network& network, const CableField& field);

/// Negates the field on one excursion.
CableField flip_excursion(const CableField& field, const std::vector<Excursion>& excursions, int id);

/// Flips the excursion containing vertex x.
CableField flip_at(const Network& network, const CableField& field, int x);

/// Cable value at the midpoint of `edge` (m = 2) against the GFF of the
/// 2-subdivided network at the new vertex: two-sample KS and variance.
std::vector<TestReport> midpoint_law_check(const Network& network, int edge, std::size_t replicas,
                                           std::uint64_t seed, double sigma = 4.0);

/// Conditional variance of the bridge at each inner point against l s (1 - s).
std::vector<TestReport> bridge_variance_check(const Network& network, int edge, int m, std::size_t replicas,
                                              std::uint64_t seed, double sigma = 4.0);

/// Second moments at the vertices after flipping the excursion of x.
std::vector<TestReport> flip_invariance_check(const Network& network, int m, int x, std::size_t replicas,
                                              std::uint64_t seed, double sigma = 4.0);

/// Per-point two-sample KS of W_{1/2} on the m-subdivided network against
/// Gamma_cable^2 / 2.
std::vector<TestReport> occupation_coupling_subdivided(const Network& network, int m, std::size_t replicas,
                                                       std::uint64_t seed, double sigma = 4.0);

}  // namespace gfflab
