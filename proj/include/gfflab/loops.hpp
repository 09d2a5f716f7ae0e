#pragma once

#include <vector>

#include "gfflab/exact.hpp"
#include "gfflab/network.hpp"

namespace gfflab {

/// Closed nearest-neighbour path stored as a cyclic word: step i leaves
/// vertices[i] along edges[i] and arrives at vertices[(i + 1) % length()].
/// For a rooted loop the root is vertices[0].
struct Loop {
  std::vector<int> vertices;
  std::vector<int> edges;

  int length() const { return static_cast<int>(edges.size()); }
  int root() const { return vertices.front(); }
  auto operator<=>(const Loop&) const = default;
  bool operator==(const Loop&) const = default;
};

/// Throws std::invalid_argument unless every step uses an edge joining the
/// two consecutive vertices and the loop has length >= 2.
void validate_loop(const Network& network, const Loop& loop);

/// Rotation of the loop starting at position k.
Loop rotate(const Loop& loop, int k);
/// Same loop traversed backwards, still rooted at vertices[0].
Loop reversed(const Loop& loop);

/// Lexicographically minimal rotation of the (vertex, edge) word.
Loop canonical_unrooted(const Loop& loop);
/// Minimal over rotations of the loop and of its reversal.
Loop canonical_unoriented(const Loop& loop);

/// J: number of identical repetitions composing the loop.
int multiplicity(const Loop& loop);
/// delta: 1 if the loop equals its reversal as an unrooted loop, else 2.
int reversal_factor(const Loop& loop);
/// Number of positions i in [0, length) with vertices[i] == y.
int visits(const Loop& loop, int y);

/// prod over steps of c_e / lambda(from).
double step_weight(const Network& network, const Loop& loop);
/// step_weight / j(root).
double rooted_mass(const Network& network, const Loop& loop);
/// step_weight / J.
double unrooted_mass(const Network& network, const Loop& loop);
/// (delta / 2) * step_weight / J.
double unoriented_mass(const Network& network, const Loop& loop);

Rational exact_step_weight(const Network& network, const Loop& loop);
Rational exact_rooted_mass(const Network& network, const Loop& loop);
Rational exact_unrooted_mass(const Network& network, const Loop& loop);

/// Distinct rooted loops at `base` representing the same unrooted loop.
std::vector<Loop> rootings_at(const Loop& loop, int base);

/// Concatenation of two loops rooted at the same vertex.
Loop concatenate(const Loop& a, const Loop& b);

}  // namespace gfflab
