#include "gfflab/cable.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gfflab/laplace.hpp"
#include "gfflab/loopsoup.hpp"

namespace gfflab {

int CableField::point(int edge, int j, const Network& network) const {
  if (j == 0) return network.edge(edge).a;
  if (j == segments) return network.edge(edge).b;
  return vertex_count + edge * (segments - 1) + (j - 1);
}

CableSampler::CableSampler(const Network& network, int m) : network_(&network), m_(m), vertex_sampler_(network) {
  if (m < 1) throw std::invalid_argument("sample_cable_gff: m must be >= 1");
}

CableField CableSampler::sample(Engine& rng) const {
  const Network& net = *network_;
  const int N = net.vertex_count();
  const int m = m_;
  CableField f;
  f.segments = m;
  f.vertex_count = N;
  f.values.assign(static_cast<std::size_t>(N + net.edge_count() * (m - 1)), 0.0);
  f.lengths.resize(static_cast<std::size_t>(net.edge_count()));
  f.hidden_zero.assign(static_cast<std::size_t>(net.edge_count() * m), 0);
  FieldSample vs = vertex_sampler_.sample(rng);
  for (int v = 0; v < N; ++v) f.values[static_cast<std::size_t>(v)] = vs.at(net, v);

  for (int e = 0; e < net.edge_count(); ++e) {
    const double ell = 1.0 / net.edge(e).conductance;
    f.lengths[static_cast<std::size_t>(e)] = ell;
    const double b = f.values[static_cast<std::size_t>(net.edge(e).b)];
    const double delta = 1.0 / m;
    double u = f.values[static_cast<std::size_t>(net.edge(e).a)];
    // Sequential bridge: condition on the current value and the far endpoint.
    for (int j = 1; j < m; ++j) {
      const double s_prev = (j - 1) * delta, s = j * delta;
      const double mean = u + (b - u) * delta / (1.0 - s_prev);
      const double var = ell * delta * (1.0 - s) / (1.0 - s_prev);
      u = mean + std::sqrt(var) * standard_normal(rng);
      f.values[static_cast<std::size_t>(f.point(e, j, net))] = u;
    }
    // Given both ends of a segment of length h with values of equal sign, a
    // Brownian bridge touches zero with probability exp(-2 u v / h).
    const double h = ell * delta;
    for (int j = 0; j < m; ++j) {
      double p = f.values[static_cast<std::size_t>(f.point(e, j, net))];
      double q = f.values[static_cast<std::size_t>(f.point(e, j + 1, net))];
      if (p * q > 0.0 && uniform01(rng) < std::exp(-2.0 * p * q / h))
        f.hidden_zero[static_cast<std::size_t>(e * m + j)] = 1;
    }
  }
  return f;
}

CableField sample_cable_gff(const Network& network, int m, std::uint64_t seed) {
  CableSampler s(network, m);
  Engine rng = make_engine(seed, 0);
  return s.sample(rng);
}

std::vector<Excursion> excursions(const Network& network, const CableField& field) {
  const int P = static_cast<int>(field.values.size());
  const int m = field.segments;
  auto is_zero_point = [&](int p) { return p < field.vertex_count && network.is_boundary(p); };
  for (int p = 0; p < P; ++p)
    if (!is_zero_point(p) && field.values[static_cast<std::size_t>(p)] == 0.0)
      throw std::domain_error("excursions: exact zero at a sample point; resample");
  std::vector<int> parent(static_cast<std::size_t>(P));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
    return v;
  };
  for (int e = 0; e < network.edge_count(); ++e)
    for (int j = 0; j < m; ++j) {
      int p = field.point(e, j, network), q = field.point(e, j + 1, network);
      if (is_zero_point(p) || is_zero_point(q)) continue;
      if (field.values[static_cast<std::size_t>(p)] * field.values[static_cast<std::size_t>(q)] <= 0.0) continue;
      if (field.hidden_zero[static_cast<std::size_t>(e * m + j)]) continue;
      parent[static_cast<std::size_t>(find(p))] = find(q);
    }
  std::vector<int> id(static_cast<std::size_t>(P), -1);
  std::vector<Excursion> out;
  for (int p = 0; p < P; ++p) {
    if (is_zero_point(p)) continue;
    int r = find(p);
    if (id[static_cast<std::size_t>(r)] < 0) {
      id[static_cast<std::size_t>(r)] = static_cast<int>(out.size());
      out.push_back({field.values[static_cast<std::size_t>(p)] > 0 ? 1 : -1, {}});
    }
    out[static_cast<std::size_t>(id[static_cast<std::size_t>(r)])].points.push_back(p);
  }
  return out;
}

CableField flip_excursion(const CableField& field, const std::vector<Excursion>& exc, int id) {
  if (id < 0 || id >= static_cast<int>(exc.size())) throw std::out_of_range("flip_excursion: invalid excursion id");
  CableField out = field;
  for (int p : exc[static_cast<std::size_t>(id)].points) out.values[static_cast<std::size_t>(p)] = -out.values[static_cast<std::size_t>(p)];
  return out;
}

CableField flip_at(const Network& network, const CableField& field, int x) {
  if (network.interior_index(x) < 0) throw std::invalid_argument("flip_at: anchor must be interior");
  auto exc = excursions(network, field);
  for (int i = 0; i < static_cast<int>(exc.size()); ++i)
    if (std::binary_search(exc[static_cast<std::size_t>(i)].points.begin(), exc[static_cast<std::size_t>(i)].points.end(), x))
      return flip_excursion(field, exc, i);
  throw std::logic_error("flip_at: anchor not found in any excursion");
}

std::vector<TestReport> midpoint_law_check(const Network& network, int edge, std::size_t replicas, std::uint64_t seed,
                                           double sigma) {
  CableSampler cable(network, 2);
  Subdivision sub = subdivide_with_map(network, 2);
  GffSampler sub_sampler(sub.network);
  const int mid = sub.edge_points[static_cast<std::size_t>(edge)][0];
  const int mid_idx = sub.network.interior_index(mid);
  std::vector<double> a(replicas), b(replicas), sq(replicas);
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    auto f = cable.sample(rng);
    a[r] = f.values[static_cast<std::size_t>(f.point(edge, 1, network))];
    sq[r] = a[r] * a[r];
    b[r] = sub_sampler.sample(rng).values(mid_idx);
  });
  const double var = sub_sampler.green()(mid_idx, mid_idx);
  auto r1 = ks_two_sample("cable midpoint vs subdivided GFF", a, b, sigma);
  r1.anchor = "the cable GFF interpolates Gamma via Brownian bridges; subdivision adds a vertex with the same law";
  auto r2 = moment_test("cable midpoint variance", estimate_mean(sq), var, sigma);
  r2.anchor = r1.anchor;
  return {r1, r2};
}

std::vector<TestReport> bridge_variance_check(const Network& network, int edge, int m, std::size_t replicas,
                                              std::uint64_t seed, double sigma) {
  CableSampler cable(network, m);
  std::vector<std::vector<double>> res(static_cast<std::size_t>(m - 1), std::vector<double>(replicas));
  const double ell = 1.0 / network.edge(edge).conductance;
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    auto f = cable.sample(rng);
    double ua = f.values[static_cast<std::size_t>(network.edge(edge).a)];
    double ub = f.values[static_cast<std::size_t>(network.edge(edge).b)];
    for (int j = 1; j < m; ++j) {
      double s = static_cast<double>(j) / m;
      double d = f.values[static_cast<std::size_t>(f.point(edge, j, network))] - ((1 - s) * ua + s * ub);
      res[static_cast<std::size_t>(j - 1)][r] = d * d;
    }
  });
  std::vector<TestReport> out;
  for (int j = 1; j < m; ++j) {
    double s = static_cast<double>(j) / m;
    auto rep = moment_test("bridge conditional variance at s=" + std::to_string(s),
                           estimate_mean(res[static_cast<std::size_t>(j - 1)]), ell * s * (1 - s), sigma);
    rep.anchor = "Brownian bridge of length l: conditional variance l s (1 - s)";
    out.push_back(rep);
  }
  return out;
}

std::vector<TestReport> flip_invariance_check(const Network& network, int m, int x, std::size_t replicas,
                                              std::uint64_t seed, double sigma) {
  CableSampler cable(network, m);
  const int n = network.interior_count();
  Eigen::MatrixXd G = green(network);
  std::vector<std::vector<double>> vals(static_cast<std::size_t>(n), std::vector<double>(replicas));
  std::vector<std::vector<double>> orig = vals;
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    auto f = cable.sample(rng);
    auto g = flip_at(network, f, x);
    for (int i = 0; i < n; ++i) {
      int v = network.interior()[static_cast<std::size_t>(i)];
      vals[static_cast<std::size_t>(i)][r] = g.values[static_cast<std::size_t>(v)];
      orig[static_cast<std::size_t>(i)][r] = f.values[static_cast<std::size_t>(v)];
    }
  });
  std::vector<TestReport> out;
  const std::string anchor = "the signs of the excursions of the cable GFF are independent fair coin tosses given |Gamma|";
  for (int i = 0; i < n; ++i) {
    auto rep = moment_test("E[S_x Gamma] at interior index " + std::to_string(i), estimate_mean(vals[static_cast<std::size_t>(i)]), 0.0, sigma);
    rep.anchor = anchor;
    out.push_back(rep);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      auto rep = moment_test("E[S_x Gamma(x_i) S_x Gamma(x_j)] at (" + std::to_string(i) + "," + std::to_string(j) + ")",
                             estimate_product_mean(vals[static_cast<std::size_t>(i)], vals[static_cast<std::size_t>(j)]), G(i, j), sigma);
      rep.anchor = anchor;
      if (i == j) {
        // Cable constant: vertex variance of the cable field over G(x, x).
        rep.detail["cable_constant"] = estimate_product_mean(orig[static_cast<std::size_t>(i)], orig[static_cast<std::size_t>(i)]).mean / G(i, i);
      }
      out.push_back(rep);
    }
  return out;
}

std::vector<TestReport> occupation_coupling_subdivided(const Network& network, int m, std::size_t replicas,
                                                       std::uint64_t seed, double sigma) {
  if (m != 1 && m != 2 && m != 4) throw std::invalid_argument("occupation_coupling_subdivided: m must be 1, 2 or 4");
  Subdivision sub = subdivide_with_map(network, m);
  const Network& sn = sub.network;
  CableSampler cable(network, m);
  const int n = sn.interior_count();
  std::vector<std::vector<double>> soup_w(static_cast<std::size_t>(n), std::vector<double>(replicas)), cable_w = soup_w;
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    auto occ = occupation_fields(sn, sample_soup(sn, 0.5, rng), rng);
    auto w = add_stationary(sn, occ.time, 0.5, rng);
    auto f = cable.sample(rng);
    for (int i = 0; i < n; ++i) {
      int p = sn.interior()[static_cast<std::size_t>(i)];
      soup_w[static_cast<std::size_t>(i)][r] = w[static_cast<std::size_t>(i)];
      double g = f.values[static_cast<std::size_t>(p)];
      cable_w[static_cast<std::size_t>(i)][r] = 0.5 * g * g;
    }
  });
  std::vector<TestReport> out;
  for (int i = 0; i < n; ++i) {
    int p = sn.interior()[static_cast<std::size_t>(i)];
    auto rep = ks_two_sample("W_1/2 on subdivided network vs Gamma_cable^2/2 at point " + std::to_string(p),
                             soup_w[static_cast<std::size_t>(i)], cable_w[static_cast<std::size_t>(i)], sigma);
    rep.anchor = "the occupation field of the cable loop soup is a constant times the square of the cable GFF";
    rep.detail["point"] = p;
    rep.detail["original_vertex"] = p < network.vertex_count();
    out.push_back(rep);
  }
  return out;
}

}  // namespace gfflab
