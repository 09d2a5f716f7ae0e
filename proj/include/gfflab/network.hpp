#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gfflab {

/// Undirected edge. parallel_index distinguishes edges sharing the same
/// endpoint pair, so paths and loops can keep track of which edge they used.
struct Edge {
  int a = 0;
  int b = 0;
  double conductance = 0.0;
  int parallel_index = 0;
};

/// Finite electric network: vertex set split into interior and boundary,
/// with positive symmetric conductances. Immutable after construction.
///
/// Vertex ids are dense in [0, vertex_count()). The interior carries an
/// explicit ordering (x_1, ..., x_n); matrices indexed by "interior index"
/// follow this ordering.
class Network {
 public:
  Network() = default;

  /// Validates and builds. If interior_order is empty, interior vertices are
  /// ordered by id. Throws std::invalid_argument on any violated invariant.
  Network(std::vector<bool> boundary_flags, std::vector<Edge> edges,
          std::vector<int> interior_order = {},
          std::vector<std::vector<double>> coordinates = {});

  int vertex_count() const { return static_cast<int>(is_boundary_.size()); }
  int interior_count() const { return static_cast<int>(interior_.size()); }
  std::span<const int> interior() const { return interior_; }
  std::span<const int> boundary() const { return boundary_; }
  bool is_boundary(int v) const { return is_boundary_[static_cast<std::size_t>(v)]; }
  /// Position of v in the interior ordering, or -1 for boundary vertices.
  int interior_index(int v) const { return interior_index_[static_cast<std::size_t>(v)]; }

  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int other_end(int e, int v) const {
    const Edge& ed = edge(e);
    return ed.a == v ? ed.b : ed.a;
  }

  /// Total conductance incident to v.
  double lambda(int v) const { return lambda_[static_cast<std::size_t>(v)]; }

  /// Edge ids incident to v, in a fixed order.
  std::span<const int> incident(int v) const {
    auto b = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(v)]);
    auto e = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(v) + 1]);
    return std::span<const int>(incident_).subspan(b, e - b);
  }

  /// Picks the edge taken by the random walk from v given u in [0, 1):
  /// edge e is chosen with probability c_e / lambda(v).
  int pick_edge(int v, double u) const;

  /// Optional embedding (lattice boxes and their subdivisions).
  const std::vector<std::vector<double>>& coordinates() const { return coordinates_; }

  /// Id of the cemetery vertex added by add_mass, or -1.
  int cemetery() const { return cemetery_; }

  /// Sum of conductances of edges joining a and b (all parallel copies).
  double conductance_between(int a, int b) const;

  /// d when every conductance equals 1/(2d) and every interior lambda is 1
  /// (a subset of Z^d), otherwise 0.
  int lattice_dimension() const { return lattice_dimension_; }

  friend Network add_mass(const Network&, std::span<const double>);

 private:
  std::vector<bool> is_boundary_;
  std::vector<int> interior_;
  std::vector<int> boundary_;
  std::vector<int> interior_index_;
  std::vector<Edge> edges_;
  std::vector<double> lambda_;
  std::vector<int> offsets_;
  std::vector<int> incident_;
  std::vector<double> cumulative_;  // per-vertex normalized cumulative conductances
  std::vector<std::vector<double>> coordinates_;
  int cemetery_ = -1;
  int lattice_dimension_ = 0;
};

/// Box {1..s_1} x ... x {1..s_d} in Z^d with its outer vertex boundary and
/// conductance 1/(2d) on every edge with at least one interior endpoint.
Network build_lattice_box(int d, std::span<const int> side_lengths);

/// Adds a cemetery boundary vertex joined to each x with k(x) > 0 by an edge
/// of conductance k(x). k is indexed by interior index.
Network add_mass(const Network& network, std::span<const double> k);

/// Boundary contracted to a single root. Wired vertex ids are interior
/// indices 0..n-1 and root() == n.
struct WiredGraph {
  int root = 0;
  std::vector<Edge> edges;
  /// Original edge id -> wired edge id; -1 for edges with no interior endpoint.
  std::vector<int> edge_map;
  /// Wired edge id -> original edge id.
  std::vector<int> inverse_map;

  int vertex_count() const { return root + 1; }
};

WiredGraph contract_boundary(const Network& network);

/// Result of subdivide: the new network and, for each original edge, the
/// new vertex ids along it ordered from edge.a to edge.b.
struct Subdivision {
  Network network;
  std::vector<std::vector<int>> edge_points;
  int segments = 1;
};

/// Replaces each edge of conductance c by m series edges of conductance m*c
/// through m-1 new interior vertices. Original vertex ids are preserved.
Subdivision subdivide_with_map(const Network& network, int m);
Network subdivide(const Network& network, int m);

/// Restricts the interior to `keep` (interior indices); all other interior
/// vertices become boundary. Vertex ids are preserved.
Network restrict_interior(const Network& network, std::span<const int> keep_interior_indices);

nlohmann::json network_to_json(const Network& network);
Network network_from_json(const nlohmann::json& j);

/// Parses builder specs such as "d=2,w=8,h=8" or "d=3,sides=4x4x4".
Network lattice_from_spec(const std::string& spec);

}  // namespace gfflab
