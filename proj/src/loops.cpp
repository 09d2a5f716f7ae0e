#include "gfflab/loops.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace gfflab {

void validate_loop(const Network& network, const Loop& loop) {
  const int m = loop.length();
  if (m < 2 || static_cast<int>(loop.vertices.size()) != m)
    throw std::invalid_argument("loop: need matching vertex and edge words of length >= 2");
  for (int i = 0; i < m; ++i) {
    int e = loop.edges[static_cast<std::size_t>(i)];
    if (e < 0 || e >= network.edge_count()) throw std::invalid_argument("loop: unknown edge");
    int from = loop.vertices[static_cast<std::size_t>(i)];
    int to = loop.vertices[static_cast<std::size_t>((i + 1) % m)];
    const Edge& ed = network.edge(e);
    if (!((ed.a == from && ed.b == to) || (ed.b == from && ed.a == to)))
      throw std::invalid_argument("loop: step does not follow its edge");
  }
}

Loop rotate(const Loop& loop, int k) {
  const int m = loop.length();
  Loop out;
  out.vertices.resize(static_cast<std::size_t>(m));
  out.edges.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    out.vertices[static_cast<std::size_t>(i)] = loop.vertices[static_cast<std::size_t>((i + k) % m)];
    out.edges[static_cast<std::size_t>(i)] = loop.edges[static_cast<std::size_t>((i + k) % m)];
  }
  return out;
}

Loop reversed(const Loop& loop) {
  const int m = loop.length();
  Loop out;
  out.vertices.resize(static_cast<std::size_t>(m));
  out.edges.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    out.vertices[static_cast<std::size_t>(i)] = loop.vertices[static_cast<std::size_t>((m - i) % m)];
    out.edges[static_cast<std::size_t>(i)] = loop.edges[static_cast<std::size_t>(m - 1 - i)];
  }
  return out;
}

namespace {

// Compares rotations a and b of the interleaved word without materializing them.
bool rotation_less(const Loop& l, int a, int b) {
  const int m = l.length();
  for (int i = 0; i < m; ++i) {
    int va = l.vertices[static_cast<std::size_t>((a + i) % m)], vb = l.vertices[static_cast<std::size_t>((b + i) % m)];
    if (va != vb) return va < vb;
    int ea = l.edges[static_cast<std::size_t>((a + i) % m)], eb = l.edges[static_cast<std::size_t>((b + i) % m)];
    if (ea != eb) return ea < eb;
  }
  return false;
}

int minimal_rotation(const Loop& l) {
  int best = 0;
  for (int k = 1; k < l.length(); ++k)
    if (rotation_less(l, k, best)) best = k;
  return best;
}

}  // namespace

Loop canonical_unrooted(const Loop& loop) { return rotate(loop, minimal_rotation(loop)); }

Loop canonical_unoriented(const Loop& loop) {
  Loop a = canonical_unrooted(loop);
  Loop b = canonical_unrooted(reversed(loop));
  return std::min(a, b);
}

int multiplicity(const Loop& loop) {
  const int m = loop.length();
  for (int p = 1; p <= m; ++p) {
    if (m % p) continue;
    bool periodic = true;
    for (int i = 0; i < m && periodic; ++i)
      periodic = loop.vertices[static_cast<std::size_t>(i)] == loop.vertices[static_cast<std::size_t>((i + p) % m)] &&
                 loop.edges[static_cast<std::size_t>(i)] == loop.edges[static_cast<std::size_t>((i + p) % m)];
    if (periodic) return m / p;
  }
  return 1;
}

int reversal_factor(const Loop& loop) {
  return canonical_unrooted(loop) == canonical_unrooted(reversed(loop)) ? 1 : 2;
}

int visits(const Loop& loop, int y) {
  return static_cast<int>(std::count(loop.vertices.begin(), loop.vertices.end(), y));
}

double step_weight(const Network& network, const Loop& loop) {
  double w = 1.0;
  for (int i = 0; i < loop.length(); ++i)
    w *= network.edge(loop.edges[static_cast<std::size_t>(i)]).conductance /
         network.lambda(loop.vertices[static_cast<std::size_t>(i)]);
  return w;
}

double rooted_mass(const Network& network, const Loop& loop) {
  return step_weight(network, loop) / visits(loop, loop.root());
}

double unrooted_mass(const Network& network, const Loop& loop) {
  return step_weight(network, loop) / multiplicity(loop);
}

double unoriented_mass(const Network& network, const Loop& loop) {
  return 0.5 * reversal_factor(loop) * unrooted_mass(network, loop);
}

Rational exact_step_weight(const Network& network, const Loop& loop) {
  Rational w = 1;
  for (int i = 0; i < loop.length(); ++i) {
    int v = loop.vertices[static_cast<std::size_t>(i)];
    Rational lambda = 0;
    for (int e : network.incident(v)) lambda += rational_from_double(network.edge(e).conductance);
    w *= rational_from_double(network.edge(loop.edges[static_cast<std::size_t>(i)]).conductance) / lambda;
  }
  return w;
}

Rational exact_rooted_mass(const Network& network, const Loop& loop) {
  return exact_step_weight(network, loop) / visits(loop, loop.root());
}

Rational exact_unrooted_mass(const Network& network, const Loop& loop) {
  return exact_step_weight(network, loop) / multiplicity(loop);
}

std::vector<Loop> rootings_at(const Loop& loop, int base) {
  std::set<Loop> seen;
  for (int k = 0; k < loop.length(); ++k)
    if (loop.vertices[static_cast<std::size_t>(k)] == base) seen.insert(rotate(loop, k));
  return {seen.begin(), seen.end()};
}

Loop concatenate(const Loop& a, const Loop& b) {
  if (a.root() != b.root()) throw std::invalid_argument("concatenate: loops have different roots");
  Loop out = a;
  out.vertices.insert(out.vertices.end(), b.vertices.begin(), b.vertices.end());
  out.edges.insert(out.edges.end(), b.edges.begin(), b.edges.end());
  return out;
}

}  // namespace gfflab
