#include "gfflab/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace gfflab {

namespace {

void assign_parallel_indices(std::vector<Edge>& edges) {
  std::map<std::pair<int, int>, int> seen;
  for (auto& e : edges) {
    auto key = std::minmax(e.a, e.b);
    e.parallel_index = seen[key]++;
  }
}

}  // namespace

Network::Network(std::vector<bool> boundary_flags, std::vector<Edge> edges,
                 std::vector<int> interior_order, std::vector<std::vector<double>> coordinates)
    : is_boundary_(std::move(boundary_flags)),
      edges_(std::move(edges)),
      coordinates_(std::move(coordinates)) {
  const int nv = vertex_count();
  if (nv == 0) throw std::invalid_argument("network: no vertices");
  if (!coordinates_.empty() && static_cast<int>(coordinates_.size()) != nv)
    throw std::invalid_argument("network: coordinate count mismatch");

  for (int v = 0; v < nv; ++v) {
    if (is_boundary(v))
      boundary_.push_back(v);
  }
  if (interior_order.empty()) {
    for (int v = 0; v < nv; ++v)
      if (!is_boundary(v)) interior_order.push_back(v);
  }
  interior_ = std::move(interior_order);
  interior_index_.assign(static_cast<std::size_t>(nv), -1);
  for (std::size_t i = 0; i < interior_.size(); ++i) {
    int v = interior_[i];
    if (v < 0 || v >= nv || is_boundary(v) || interior_index_[static_cast<std::size_t>(v)] != -1)
      throw std::invalid_argument("network: interior ordering is not a permutation of the interior");
    interior_index_[static_cast<std::size_t>(v)] = static_cast<int>(i);
  }
  for (int v = 0; v < nv; ++v)
    if (!is_boundary(v) && interior_index_[static_cast<std::size_t>(v)] == -1)
      throw std::invalid_argument("network: interior ordering misses a vertex");

  lambda_.assign(static_cast<std::size_t>(nv), 0.0);
  std::vector<int> degree(static_cast<std::size_t>(nv), 0);
  for (const auto& e : edges_) {
    if (e.a < 0 || e.a >= nv || e.b < 0 || e.b >= nv)
      throw std::invalid_argument("network: edge endpoint out of range");
    if (e.a == e.b) throw std::invalid_argument("network: self-loops are not allowed");
    if (!(e.conductance > 0.0) || !std::isfinite(e.conductance))
      throw std::invalid_argument("network: conductances must be positive and finite");
    lambda_[static_cast<std::size_t>(e.a)] += e.conductance;
    lambda_[static_cast<std::size_t>(e.b)] += e.conductance;
    ++degree[static_cast<std::size_t>(e.a)];
    ++degree[static_cast<std::size_t>(e.b)];
  }
  assign_parallel_indices(edges_);

  offsets_.assign(static_cast<std::size_t>(nv) + 1, 0);
  for (int v = 0; v < nv; ++v)
    offsets_[static_cast<std::size_t>(v) + 1] = offsets_[static_cast<std::size_t>(v)] + degree[static_cast<std::size_t>(v)];
  incident_.assign(static_cast<std::size_t>(offsets_.back()), 0);
  cumulative_.assign(incident_.size(), 0.0);
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (int id = 0; id < edge_count(); ++id) {
    const auto& e = edges_[static_cast<std::size_t>(id)];
    incident_[static_cast<std::size_t>(fill[static_cast<std::size_t>(e.a)]++)] = id;
    incident_[static_cast<std::size_t>(fill[static_cast<std::size_t>(e.b)]++)] = id;
  }
  for (int v = 0; v < nv; ++v) {
    double acc = 0.0;
    auto b = offsets_[static_cast<std::size_t>(v)], en = offsets_[static_cast<std::size_t>(v) + 1];
    for (int i = b; i < en; ++i) {
      acc += edges_[static_cast<std::size_t>(incident_[static_cast<std::size_t>(i)])].conductance;
      cumulative_[static_cast<std::size_t>(i)] = acc / lambda_[static_cast<std::size_t>(v)];
    }
    if (en > b) cumulative_[static_cast<std::size_t>(en - 1)] = 1.0;
  }

  for (int v : interior_)
    if (!(lambda_[static_cast<std::size_t>(v)] > 0.0))
      throw std::invalid_argument("network: interior vertex with no incident conductance");

  // Every interior vertex must reach the boundary, and the non-isolated part
  // of the graph must be connected.
  std::vector<char> reached(static_cast<std::size_t>(nv), 0);
  std::queue<int> q;
  for (int v : boundary_)
    if (degree[static_cast<std::size_t>(v)] > 0) {
      reached[static_cast<std::size_t>(v)] = 1;
      q.push(v);
    }
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int e : incident(v)) {
      int w = other_end(e, v);
      if (!reached[static_cast<std::size_t>(w)]) {
        reached[static_cast<std::size_t>(w)] = 1;
        q.push(w);
      }
    }
  }
  for (int v : interior_)
    if (!reached[static_cast<std::size_t>(v)])
      throw std::invalid_argument("network: interior vertex cannot reach the boundary");

  std::fill(reached.begin(), reached.end(), 0);
  int start = -1;
  for (int v = 0; v < nv && start < 0; ++v)
    if (degree[static_cast<std::size_t>(v)] > 0) start = v;
  if (start >= 0) {
    reached[static_cast<std::size_t>(start)] = 1;
    q.push(start);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int e : incident(v)) {
        int w = other_end(e, v);
        if (!reached[static_cast<std::size_t>(w)]) {
          reached[static_cast<std::size_t>(w)] = 1;
          q.push(w);
        }
      }
    }
    for (int v = 0; v < nv; ++v)
      if (degree[static_cast<std::size_t>(v)] > 0 && !reached[static_cast<std::size_t>(v)])
        throw std::invalid_argument("network: graph is not connected");
  }

  if (!edges_.empty()) {
    double c0 = edges_.front().conductance;
    bool uniform = std::all_of(edges_.begin(), edges_.end(),
                               [&](const Edge& e) { return e.conductance == c0; });
    double d = 1.0 / (2.0 * c0);
    bool unit_lambda = std::all_of(interior_.begin(), interior_.end(), [&](int v) {
      return std::abs(lambda_[static_cast<std::size_t>(v)] - 1.0) < 1e-12;
    });
    if (uniform && unit_lambda && std::abs(d - std::round(d)) < 1e-12 && d >= 1.0)
      lattice_dimension_ = static_cast<int>(std::round(d));
  }
}

int Network::pick_edge(int v, double u) const {
  auto b = cumulative_.begin() + offsets_[static_cast<std::size_t>(v)];
  auto e = cumulative_.begin() + offsets_[static_cast<std::size_t>(v) + 1];
  auto it = std::upper_bound(b, e, u);
  if (it == e) --it;
  return incident_[static_cast<std::size_t>(it - cumulative_.begin())];
}

double Network::conductance_between(int a, int b) const {
  double c = 0.0;
  for (int e : incident(a))
    if (other_end(e, a) == b) c += edge(e).conductance;
  return c;
}

Network build_lattice_box(int d, std::span<const int> side_lengths) {
  if (d < 1) throw std::invalid_argument("build_lattice_box: dimension must be >= 1");
  if (static_cast<int>(side_lengths.size()) != d)
    throw std::invalid_argument("build_lattice_box: need one side length per dimension");
  for (int s : side_lengths)
    if (s < 1) throw std::invalid_argument("build_lattice_box: empty box");

  std::size_t n = 1;
  for (int s : side_lengths) n *= static_cast<std::size_t>(s);

  // Interior points in lexicographic order with the first coordinate fastest.
  std::vector<std::vector<int>> points;
  points.reserve(n);
  std::map<std::vector<int>, int> id_of;
  std::vector<int> c(static_cast<std::size_t>(d), 1);
  for (std::size_t i = 0; i < n; ++i) {
    id_of[c] = static_cast<int>(points.size());
    points.push_back(c);
    for (int k = 0; k < d; ++k) {
      if (++c[static_cast<std::size_t>(k)] <= side_lengths[static_cast<std::size_t>(k)]) break;
      c[static_cast<std::size_t>(k)] = 1;
    }
  }
  auto inside = [&](const std::vector<int>& p) {
    for (int k = 0; k < d; ++k)
      if (p[static_cast<std::size_t>(k)] < 1 || p[static_cast<std::size_t>(k)] > side_lengths[static_cast<std::size_t>(k)])
        return false;
    return true;
  };

  const double cond = 1.0 / (2.0 * d);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) {
      for (int step : {-1, 1}) {
        std::vector<int> q = points[i];
        q[static_cast<std::size_t>(k)] += step;
        if (inside(q)) {
          int j = id_of.at(q);
          if (j > static_cast<int>(i)) edges.push_back({static_cast<int>(i), j, cond, 0});
        } else {
          auto [it, fresh] = id_of.try_emplace(q, static_cast<int>(points.size()));
          if (fresh) points.push_back(q);
          edges.push_back({static_cast<int>(i), it->second, cond, 0});
        }
      }
    }
  }
  std::vector<bool> flags(points.size(), false);
  for (std::size_t i = n; i < points.size(); ++i) flags[i] = true;
  std::vector<std::vector<double>> coords;
  coords.reserve(points.size());
  for (const auto& p : points) coords.emplace_back(p.begin(), p.end());
  return Network(std::move(flags), std::move(edges), {}, std::move(coords));
}

Network add_mass(const Network& network, std::span<const double> k) {
  if (static_cast<int>(k.size()) != network.interior_count())
    throw std::invalid_argument("add_mass: one mass value per interior vertex required");
  for (double v : k)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("add_mass: negative mass");

  const int cemetery = network.vertex_count();
  std::vector<bool> flags(static_cast<std::size_t>(cemetery) + 1, false);
  for (int v = 0; v < cemetery; ++v) flags[static_cast<std::size_t>(v)] = network.is_boundary(v);
  flags[static_cast<std::size_t>(cemetery)] = true;
  std::vector<Edge> edges(network.edges().begin(), network.edges().end());
  for (int i = 0; i < network.interior_count(); ++i)
    if (k[static_cast<std::size_t>(i)] > 0.0)
      edges.push_back({network.interior()[static_cast<std::size_t>(i)], cemetery, k[static_cast<std::size_t>(i)], 0});
  std::vector<std::vector<double>> coords = network.coordinates();
  if (!coords.empty()) coords.push_back(std::vector<double>(coords.front().size(), std::nan("")));
  Network out(std::move(flags), std::move(edges),
              std::vector<int>(network.interior().begin(), network.interior().end()), std::move(coords));
  out.cemetery_ = cemetery;
  return out;
}

WiredGraph contract_boundary(const Network& network) {
  WiredGraph g;
  g.root = network.interior_count();
  g.edge_map.assign(static_cast<std::size_t>(network.edge_count()), -1);
  auto wired_id = [&](int v) { return network.is_boundary(v) ? g.root : network.interior_index(v); };
  for (int e = 0; e < network.edge_count(); ++e) {
    const Edge& ed = network.edge(e);
    if (network.is_boundary(ed.a) && network.is_boundary(ed.b)) continue;
    g.edge_map[static_cast<std::size_t>(e)] = static_cast<int>(g.edges.size());
    g.inverse_map.push_back(e);
    g.edges.push_back({wired_id(ed.a), wired_id(ed.b), ed.conductance, 0});
  }
  assign_parallel_indices(g.edges);
  return g;
}

Subdivision subdivide_with_map(const Network& network, int m) {
  if (m < 1) throw std::invalid_argument("subdivide: segment count must be >= 1");
  Subdivision out;
  out.segments = m;
  out.edge_points.resize(static_cast<std::size_t>(network.edge_count()));
  std::vector<bool> flags(static_cast<std::size_t>(network.vertex_count()));
  for (int v = 0; v < network.vertex_count(); ++v) flags[static_cast<std::size_t>(v)] = network.is_boundary(v);
  std::vector<int> order(network.interior().begin(), network.interior().end());
  std::vector<std::vector<double>> coords = network.coordinates();
  const bool with_coords = !coords.empty();
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(network.edge_count() * m));
  int next = network.vertex_count();
  for (int e = 0; e < network.edge_count(); ++e) {
    const Edge& ed = network.edge(e);
    int prev = ed.a;
    for (int j = 1; j < m; ++j) {
      int v = next++;
      flags.push_back(false);
      order.push_back(v);
      out.edge_points[static_cast<std::size_t>(e)].push_back(v);
      if (with_coords) {
        const auto& pa = coords[static_cast<std::size_t>(ed.a)];
        const auto& pb = coords[static_cast<std::size_t>(ed.b)];
        std::vector<double> p(pa.size());
        double s = static_cast<double>(j) / m;
        for (std::size_t k = 0; k < p.size(); ++k) p[k] = (1.0 - s) * pa[k] + s * pb[k];
        coords.push_back(std::move(p));
      }
      edges.push_back({prev, v, ed.conductance * m, 0});
      prev = v;
    }
    edges.push_back({prev, ed.b, ed.conductance * m, 0});
  }
  out.network = Network(std::move(flags), std::move(edges), std::move(order), std::move(coords));
  return out;
}

Network subdivide(const Network& network, int m) { return subdivide_with_map(network, m).network; }

Network restrict_interior(const Network& network, std::span<const int> keep_interior_indices) {
  std::vector<bool> flags(static_cast<std::size_t>(network.vertex_count()), true);
  std::vector<int> order;
  for (int i : keep_interior_indices) {
    if (i < 0 || i >= network.interior_count())
      throw std::invalid_argument("restrict_interior: index out of range");
    int v = network.interior()[static_cast<std::size_t>(i)];
    if (!flags[static_cast<std::size_t>(v)]) throw std::invalid_argument("restrict_interior: duplicate index");
    flags[static_cast<std::size_t>(v)] = false;
    order.push_back(v);
  }
  std::vector<Edge> edges(network.edges().begin(), network.edges().end());
  return Network(std::move(flags), std::move(edges), std::move(order), network.coordinates());
}

nlohmann::json network_to_json(const Network& network) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (int v = 0; v < network.vertex_count(); ++v) {
    nlohmann::json vj{{"id", v}, {"boundary", network.is_boundary(v)}};
    if (!network.coordinates().empty()) {
      nlohmann::json c = nlohmann::json::array();
      for (double x : network.coordinates()[static_cast<std::size_t>(v)])
        c.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr));
      vj["coord"] = c;
    }
    j["vertices"].push_back(vj);
  }
  j["interior_order"] = std::vector<int>(network.interior().begin(), network.interior().end());
  j["edges"] = nlohmann::json::array();
  for (const auto& e : network.edges()) j["edges"].push_back({e.a, e.b, e.conductance});
  if (network.cemetery() >= 0) j["cemetery"] = network.cemetery();
  return j;
}

Network network_from_json(const nlohmann::json& j) {
  const auto& verts = j.at("vertices");
  std::vector<bool> flags(verts.size(), false);
  std::vector<std::vector<double>> coords;
  bool has_coords = !verts.empty() && verts.front().contains("coord");
  if (has_coords) coords.resize(verts.size());
  for (const auto& vj : verts) {
    int id = vj.at("id").get<int>();
    if (id < 0 || id >= static_cast<int>(verts.size()))
      throw std::invalid_argument("network json: vertex id out of range");
    flags[static_cast<std::size_t>(id)] = vj.value("boundary", false);
    if (has_coords) {
      for (const auto& x : vj.at("coord"))
        coords[static_cast<std::size_t>(id)].push_back(x.is_null() ? std::nan("") : x.get<double>());
    }
  }
  std::vector<Edge> edges;
  for (const auto& ej : j.at("edges")) {
    if (ej.size() != 3) throw std::invalid_argument("network json: edges are [a, b, c] triples");
    edges.push_back({ej[0].get<int>(), ej[1].get<int>(), ej[2].get<double>(), 0});
  }
  std::vector<int> order;
  if (j.contains("interior_order")) order = j["interior_order"].get<std::vector<int>>();
  if (j.contains("cemetery")) {
    // Rebuild through add_mass so the cemetery id is tracked.
    int cem = j["cemetery"].get<int>();
    if (cem != static_cast<int>(verts.size()) - 1)
      throw std::invalid_argument("network json: cemetery must be the last vertex");
    std::vector<bool> base_flags(flags.begin(), flags.end() - 1);
    std::vector<Edge> base_edges;
    std::vector<double> mass_by_vertex(verts.size(), 0.0);
    for (const auto& e : edges) {
      if (e.b == cem) mass_by_vertex[static_cast<std::size_t>(e.a)] += e.conductance;
      else if (e.a == cem) mass_by_vertex[static_cast<std::size_t>(e.b)] += e.conductance;
      else base_edges.push_back(e);
    }
    if (!coords.empty()) coords.pop_back();
    Network base(std::move(base_flags), std::move(base_edges), order, std::move(coords));
    std::vector<double> k;
    for (int v : base.interior()) k.push_back(mass_by_vertex[static_cast<std::size_t>(v)]);
    return add_mass(base, k);
  }
  return Network(std::move(flags), std::move(edges), std::move(order), std::move(coords));
}

Network lattice_from_spec(const std::string& spec) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("lattice spec: expected key=value in '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  int d = kv.count("d") ? std::stoi(kv["d"]) : 2;
  std::vector<int> sides;
  if (kv.count("sides")) {
    std::stringstream s2(kv["sides"]);
    std::string part;
    while (std::getline(s2, part, 'x')) sides.push_back(std::stoi(part));
  } else {
    const char* keys[] = {"w", "h", "l"};
    for (int k = 0; k < d; ++k) {
      std::string key = k < 3 ? keys[k] : "s" + std::to_string(k + 1);
      if (!kv.count(key)) throw std::invalid_argument("lattice spec: missing side '" + key + "'");
      sides.push_back(std::stoi(kv[key]));
    }
  }
  return build_lattice_box(d, sides);
}

}  // namespace gfflab
