#include "gfflab/loopsoup.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "gfflab/laplace.hpp"

namespace gfflab {

double mass_loops_through(const Network& network, int x, std::span<const int> forbidden) {
  if (x < 0 || x >= network.vertex_count() || network.is_boundary(x))
    throw std::invalid_argument("mass_loops_through: x must be interior");
  std::vector<char> drop(static_cast<std::size_t>(network.vertex_count()), 0);
  for (int v : forbidden) {
    if (v == x) throw std::invalid_argument("mass_loops_through: x is forbidden");
    drop[static_cast<std::size_t>(v)] = 1;
  }
  std::vector<int> keep;
  for (int i = 0; i < network.interior_count(); ++i)
    if (!drop[static_cast<std::size_t>(network.interior()[static_cast<std::size_t>(i)])]) keep.push_back(i);
  Network sub = restrict_interior(network, keep);
  Eigen::MatrixXd G = green(sub);
  int ix = sub.interior_index(x);
  return std::log(network.lambda(x) * G(ix, ix));
}

double total_loop_mass(const Network& network) {
  double log_prod_lambda = 0.0;
  for (int v : network.interior()) log_prod_lambda += std::log(network.lambda(v));
  return log_prod_lambda - det_laplacian(network).log_value;
}

std::vector<Loop> split_erased_loop(const ErasedLoop& erased, Engine& rng) {
  std::vector<Loop> ex = erased.excursions();
  const int k = static_cast<int>(ex.size());
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<char> done(static_cast<std::size_t>(k), 0);
  std::vector<Loop> out;
  for (int s = 0; s < k; ++s) {
    if (done[static_cast<std::size_t>(s)]) continue;
    Loop l;
    for (int i = s; !done[static_cast<std::size_t>(i)]; i = perm[static_cast<std::size_t>(i)]) {
      done[static_cast<std::size_t>(i)] = 1;
      const Loop& e = ex[static_cast<std::size_t>(i)];
      l.vertices.insert(l.vertices.end(), e.vertices.begin(), e.vertices.end());
      l.edges.insert(l.edges.end(), e.edges.begin(), e.edges.end());
    }
    out.push_back(std::move(l));
  }
  return out;
}

Rational split_check(int k) {
  if (k < 1 || k > kExactLimit) throw std::invalid_argument("split_check: k must be in [1, 12]");
  Rational total = 0;
  // parts so far: r, product of parts
  auto recurse = [&](auto&& self, int remaining, int r, BigInt prod) -> void {
    if (remaining == 0) {
      BigInt fact = 1;
      for (int i = 2; i <= r; ++i) fact *= i;
      total += Rational(1, fact * prod);
      return;
    }
    for (int j = 1; j <= remaining; ++j) self(self, remaining - j, r + 1, prod * j);
  };
  recurse(recurse, k, 0, BigInt(1));
  return total;
}

LoopSoup soup_from_wilson(const WilsonResult& run, Engine& rng) {
  LoopSoup soup;
  for (const auto& el : run.erased)
    for (auto& l : split_erased_loop(el, rng)) soup.loops.push_back(canonical_unrooted(l));
  return soup;
}

LoopSoup thin(const LoopSoup& soup, double p, Engine& rng) {
  LoopSoup out;
  out.intensity = soup.intensity * p;
  out.oriented = soup.oriented;
  for (const auto& l : soup.loops)
    if (uniform01(rng) < p) out.loops.push_back(l);
  return out;
}

LoopSoup superpose(const LoopSoup& a, const LoopSoup& b) {
  if (a.oriented != b.oriented) throw std::invalid_argument("superpose: orientation mismatch");
  LoopSoup out = a;
  out.intensity += b.intensity;
  out.loops.insert(out.loops.end(), b.loops.begin(), b.loops.end());
  return out;
}

LoopSoup sample_soup(const Network& network, double alpha, Engine& rng) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("sample_soup: alpha must be positive");
  LoopSoup out;
  out.intensity = 0.0;
  const double whole = std::floor(alpha);
  const double frac = alpha - whole;
  for (int c = 0; c < static_cast<int>(whole); ++c) out = superpose(out, soup_from_wilson(wilson_ust(network, {}, rng), rng));
  if (frac > 0.0) out = superpose(out, thin(soup_from_wilson(wilson_ust(network, {}, rng), rng), frac, rng));
  out.intensity = alpha;
  return out;
}

LoopSoup sample_soup(const Network& network, double alpha, std::uint64_t seed) {
  Engine rng = make_engine(seed, 0);
  return sample_soup(network, alpha, rng);
}

SoupOccupation occupation_fields(const Network& network, const LoopSoup& soup, Engine& rng) {
  SoupOccupation occ;
  occ.visits.assign(static_cast<std::size_t>(network.interior_count()), 0);
  occ.time.assign(static_cast<std::size_t>(network.interior_count()), 0.0);
  occ.traversals.assign(static_cast<std::size_t>(network.edge_count()), 0);
  for (const auto& l : soup.loops) {
    for (int i = 0; i < l.length(); ++i) {
      int v = l.vertices[static_cast<std::size_t>(i)];
      int idx = network.interior_index(v);
      if (idx < 0) throw std::invalid_argument("occupation_fields: loop visits the boundary");
      ++occ.visits[static_cast<std::size_t>(idx)];
      occ.time[static_cast<std::size_t>(idx)] += standard_exponential(rng) / network.lambda(v);
      ++occ.traversals[static_cast<std::size_t>(l.edges[static_cast<std::size_t>(i)])];
    }
  }
  return occ;
}

std::vector<double> add_stationary(const Network& network, std::span<const double> time, double alpha, Engine& rng) {
  if (!(alpha > 0.0)) throw std::invalid_argument("add_stationary: alpha must be positive");
  if (static_cast<int>(time.size()) != network.interior_count())
    throw std::invalid_argument("add_stationary: one value per interior vertex required");
  std::vector<double> out(time.begin(), time.end());
  std::gamma_distribution<double> gamma(alpha, 1.0);
  for (int i = 0; i < network.interior_count(); ++i)
    out[static_cast<std::size_t>(i)] += gamma(rng) / network.lambda(network.interior()[static_cast<std::size_t>(i)]);
  return out;
}

LoopSoup convert_orientation(const LoopSoup& soup, bool to_unoriented, Engine& rng) {
  LoopSoup out;
  out.loops.reserve(soup.loops.size());
  if (to_unoriented) {
    out.oriented = false;
    out.intensity = soup.oriented ? 2.0 * soup.intensity : soup.intensity;
    for (const auto& l : soup.loops) out.loops.push_back(canonical_unoriented(l));
  } else {
    out.oriented = true;
    out.intensity = soup.oriented ? soup.intensity : 0.5 * soup.intensity;
    for (const auto& l : soup.loops)
      out.loops.push_back(canonical_unrooted(uniform01(rng) < 0.5 ? l : reversed(l)));
  }
  return out;
}

LoopSoup resample_pairings(const Network& network, std::span<const int> T, Engine& rng) {
  if (static_cast<int>(T.size()) != network.edge_count())
    throw std::invalid_argument("resample_pairings: one count per edge required");
  // Copies of edges; end 2c sits at edge.a, end 2c+1 at edge.b.
  std::vector<int> copy_edge;
  std::vector<std::vector<int>> ends_at(static_cast<std::size_t>(network.vertex_count()));
  for (int e = 0; e < network.edge_count(); ++e) {
    int t = T[static_cast<std::size_t>(e)];
    if (t < 0) throw std::invalid_argument("resample_pairings: negative count");
    if (t == 0) continue;
    const Edge& ed = network.edge(e);
    if (network.is_boundary(ed.a) || network.is_boundary(ed.b))
      throw std::invalid_argument("resample_pairings: loops cannot use boundary edges");
    for (int k = 0; k < t; ++k) {
      int c = static_cast<int>(copy_edge.size());
      copy_edge.push_back(e);
      ends_at[static_cast<std::size_t>(ed.a)].push_back(2 * c);
      ends_at[static_cast<std::size_t>(ed.b)].push_back(2 * c + 1);
    }
  }
  std::vector<int> partner(copy_edge.size() * 2, -1);
  for (auto& ends : ends_at) {
    if (ends.size() % 2) throw std::invalid_argument("resample_pairings: inadmissible field (odd site sum)");
    std::shuffle(ends.begin(), ends.end(), rng);
    for (std::size_t i = 0; i < ends.size(); i += 2) {
      partner[static_cast<std::size_t>(ends[i])] = ends[i + 1];
      partner[static_cast<std::size_t>(ends[i + 1])] = ends[i];
    }
  }
  LoopSoup soup;
  soup.oriented = false;
  soup.intensity = 1.0;
  std::vector<char> used(copy_edge.size(), 0);
  for (std::size_t c0 = 0; c0 < copy_edge.size(); ++c0) {
    if (used[c0]) continue;
    Loop l;
    int end = static_cast<int>(2 * c0);  // leave through this end
    while (!used[static_cast<std::size_t>(end / 2)]) {
      int c = end / 2;
      used[static_cast<std::size_t>(c)] = 1;
      const Edge& ed = network.edge(copy_edge[static_cast<std::size_t>(c)]);
      l.vertices.push_back(end % 2 == 0 ? ed.a : ed.b);
      l.edges.push_back(copy_edge[static_cast<std::size_t>(c)]);
      int arrive = end ^ 1;
      end = partner[static_cast<std::size_t>(arrive)];
    }
    soup.loops.push_back(canonical_unoriented(l));
  }
  return soup;
}

double pairings_count(int u) {
  double r = 1.0;
  for (int i = 1; i <= u; ++i) r *= (2.0 * i - 1.0);
  return r;
}

double edge_law_probability(const Network& network, std::span<const int> t) {
  const int d = network.lattice_dimension();
  if (d == 0) throw std::invalid_argument("edge_law_probability: defined for lattice networks only");
  if (static_cast<int>(t.size()) != network.edge_count()) throw std::invalid_argument("edge_law_probability: size mismatch");
  std::vector<int> site(static_cast<std::size_t>(network.vertex_count()), 0);
  double log_p = 0.5 * det_laplacian(network).log_value;
  long total = 0;
  for (int e = 0; e < network.edge_count(); ++e) {
    int te = t[static_cast<std::size_t>(e)];
    if (te == 0) continue;
    const Edge& ed = network.edge(e);
    if (te < 0 || network.is_boundary(ed.a) || network.is_boundary(ed.b)) return 0.0;
    site[static_cast<std::size_t>(ed.a)] += te;
    site[static_cast<std::size_t>(ed.b)] += te;
    total += te;
    log_p -= std::lgamma(te + 1.0);
  }
  for (int s : site) {
    if (s % 2) return 0.0;
    log_p += std::log(pairings_count(s / 2));
  }
  log_p -= static_cast<double>(total) * std::log(2.0 * d);
  return std::exp(log_p);
}

std::vector<std::vector<int>> admissible_edge_fields(const Network& network, int cutoff) {
  std::vector<int> inner;
  for (int e = 0; e < network.edge_count(); ++e)
    if (!network.is_boundary(network.edge(e).a) && !network.is_boundary(network.edge(e).b)) inner.push_back(e);
  if (inner.size() > 16) throw std::invalid_argument("admissible_edge_fields: too many interior edges to enumerate");
  std::vector<std::vector<int>> out;
  std::vector<int> t(static_cast<std::size_t>(network.edge_count()), 0);
  auto recurse = [&](auto&& self, std::size_t i, int budget) -> void {
    if (i == inner.size()) {
      std::vector<int> site(static_cast<std::size_t>(network.vertex_count()), 0);
      for (int e : inner) {
        site[static_cast<std::size_t>(network.edge(e).a)] += t[static_cast<std::size_t>(e)];
        site[static_cast<std::size_t>(network.edge(e).b)] += t[static_cast<std::size_t>(e)];
      }
      if (std::all_of(site.begin(), site.end(), [](int s) { return s % 2 == 0; })) out.push_back(t);
      return;
    }
    for (int v = 0; v <= budget; ++v) {
      t[static_cast<std::size_t>(inner[i])] = v;
      self(self, i + 1, budget - v);
    }
    t[static_cast<std::size_t>(inner[i])] = 0;
  };
  recurse(recurse, 0, cutoff);
  return out;
}

TestReport empty_soup_check(const Network& network, double alpha, std::size_t replicas, std::uint64_t seed,
                            double sigma) {
  std::vector<double> empty(replicas);
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    empty[r] = sample_soup(network, alpha, rng).loops.empty() ? 1.0 : 0.0;
  });
  double target = std::exp(-alpha * total_loop_mass(network));
  auto rep = proportion_test("P[soup empty], alpha=" + std::to_string(alpha), estimate_mean(empty), target, sigma);
  rep.anchor = "P[no loop in the soup] = 1 / (det G_D)^alpha";
  return rep;
}

std::vector<TestReport> loops_through_check(const Network& network, int x, std::size_t replicas, std::uint64_t seed,
                                            double sigma) {
  std::vector<double> count(replicas);
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    auto soup = sample_soup(network, 1.0, rng);
    count[r] = static_cast<double>(std::count_if(soup.loops.begin(), soup.loops.end(),
                                                 [x](const Loop& l) { return visits(l, x) > 0; }));
  });
  const double mu = mass_loops_through(network, x);
  std::vector<double> sq(replicas);
  for (std::size_t r = 0; r < replicas; ++r) sq[r] = (count[r] - mu) * (count[r] - mu);
  auto a = moment_test("mean #loops through x", estimate_mean(count), mu, sigma);
  a.anchor = "exp(-mu_D(M_{D,x})) = 1 / G_D(x,x): loops through x are Poisson(log G_D(x,x))";
  auto b = moment_test("variance #loops through x", estimate_mean(sq), mu, sigma);
  b.anchor = a.anchor;
  return {a, b};
}

namespace {

std::vector<double> poisson_expected(double mean, std::size_t cells, std::size_t n) {
  std::vector<double> e(cells, 0.0);
  boost::math::poisson_distribution<double> pd(mean);
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < cells; ++k) {
    e[k] = static_cast<double>(n) * boost::math::pdf(pd, static_cast<double>(k));
    acc += e[k];
  }
  e[cells - 1] = std::max(0.0, static_cast<double>(n) - acc);
  return e;
}

std::vector<double> histogram(const std::vector<std::size_t>& values, std::size_t cells) {
  std::vector<double> h(cells, 0.0);
  for (auto v : values) h[std::min(v, cells - 1)] += 1.0;
  return h;
}

}  // namespace

std::vector<TestReport> thinning_check(const Network& network, double p, std::size_t replicas, std::uint64_t seed,
                                       double sigma) {
  std::vector<std::size_t> thinned(replicas), combined(replicas), fresh(replicas);
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    auto a = thin(sample_soup(network, 1.0, rng), p, rng);
    auto b = thin(sample_soup(network, 1.0, rng), 1.0 - p, rng);
    thinned[r] = a.loops.size();
    combined[r] = superpose(a, b).loops.size();
    fresh[r] = sample_soup(network, 1.0, rng).loops.size();
  });
  const double mu = total_loop_mass(network);
  const std::size_t cells = 12;
  std::vector<TestReport> out;
  auto r1 = chi2_test("thin(p) loop count ~ Poisson(p mu)", histogram(thinned, cells),
                      poisson_expected(p * mu, cells, replicas), sigma);
  r1.anchor = "thinning a Poisson point process of intensity mu with probability p gives intensity p mu";
  out.push_back(r1);
  auto r2 = chi2_test("thin(p) + thin(1-p) loop count ~ Poisson(mu)", histogram(combined, cells),
                      poisson_expected(mu, cells, replicas), sigma);
  r2.anchor = "superposition of independent Poisson point processes adds intensities";
  out.push_back(r2);
  auto r3 = chi2_two_sample("thin(p) + thin(1-p) vs fresh soup", histogram(combined, cells), histogram(fresh, cells), sigma);
  r3.anchor = r2.anchor;
  out.push_back(r3);
  return out;
}

TestReport soup_laplace_check(const Network& network, std::span<const double> k, double alpha, std::size_t replicas,
                              std::uint64_t seed, double sigma) {
  const int n = network.interior_count();
  std::vector<double> vals(replicas);
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    auto soup = sample_soup(network, alpha, rng);
    auto occ = occupation_fields(network, soup, rng);
    auto w = add_stationary(network, occ.time, alpha, rng);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += k[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
    vals[r] = std::exp(-acc);
  });
  double target = std::pow(occupation_laplace_transform(network, k), alpha);
  auto rep = moment_test("E[exp(-sum k W_alpha)], alpha=" + std::to_string(alpha), estimate_mean(vals), target, sigma);
  rep.anchor = "E[exp(-sum_x k(x) W_alpha(x))] = (det(-Delta_D) / det(-Delta_D + I_k))^alpha";
  return rep;
}

TestReport soup_visits_laplace_check(const Network& network, std::span<const double> k, double alpha,
                                     std::size_t replicas, std::uint64_t seed, double sigma) {
  const int n = network.interior_count();
  std::vector<double> vals(replicas);
  double log_prod = 0.0;
  for (int i = 0; i < n; ++i)
    log_prod += std::log1p(k[static_cast<std::size_t>(i)] / network.lambda(network.interior()[static_cast<std::size_t>(i)]));
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    auto occ = occupation_fields(network, sample_soup(network, alpha, rng), rng);
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      acc += occ.visits[static_cast<std::size_t>(i)] *
             std::log1p(k[static_cast<std::size_t>(i)] / network.lambda(network.interior()[static_cast<std::size_t>(i)]));
    vals[r] = std::exp(-acc);
  });
  double target = std::pow(std::exp(log_prod) * occupation_laplace_transform(network, k), alpha);
  auto rep = moment_test("E[prod (1+k)^-V_alpha], alpha=" + std::to_string(alpha), estimate_mean(vals), target, sigma);
  rep.anchor = "E[prod_x (1 + k(x))^{-V_alpha(x)}] = (prod_x (1 + k(x)) det(-Delta_D) / det(-Delta_D + I_k))^alpha";
  return rep;
}

std::vector<TestReport> visits_vs_wilson_check(const Network& network, std::size_t replicas, std::uint64_t seed,
                                               double sigma) {
  const int n = network.interior_count();
  std::vector<std::vector<std::size_t>> a(static_cast<std::size_t>(n), std::vector<std::size_t>(replicas)), b = a;
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    auto run = wilson_ust(network, {}, rng);
    // The soup comes from an independent run so the comparison is in law.
    auto occ = occupation_fields(network, sample_soup(network, 1.0, rng), rng);
    for (int i = 0; i < n; ++i) {
      a[static_cast<std::size_t>(i)][r] = static_cast<std::size_t>(run.occupation.V[static_cast<std::size_t>(i)] - 1);
      b[static_cast<std::size_t>(i)][r] = static_cast<std::size_t>(occ.visits[static_cast<std::size_t>(i)]);
    }
  });
  std::vector<TestReport> out;
  const std::size_t cells = 40;
  for (int i = 0; i < n; ++i) {
    auto rep = chi2_two_sample("V-1 vs soup visits at interior index " + std::to_string(i),
                               histogram(a[static_cast<std::size_t>(i)], cells),
                               histogram(b[static_cast<std::size_t>(i)], cells), sigma);
    rep.anchor = "the law of the soup occupation field V_1 is identical to that of (V(x) - 1)_x";
    out.push_back(rep);
  }
  return out;
}

std::vector<TestReport> isomorphism_check(const Network& network, std::size_t replicas, std::uint64_t seed,
                                          double sigma) {
  const int n = network.interior_count();
  Eigen::MatrixXd G = green(network);
  std::vector<std::vector<double>> W(static_cast<std::size_t>(n), std::vector<double>(replicas));
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    auto occ = occupation_fields(network, sample_soup(network, 0.5, rng), rng);
    auto w = add_stationary(network, occ.time, 0.5, rng);
    for (int i = 0; i < n; ++i) W[static_cast<std::size_t>(i)][r] = w[static_cast<std::size_t>(i)];
  });
  std::vector<TestReport> out;
  for (int i = 0; i < n; ++i) {
    const double g = G(i, i);
    auto rep = ks_test("W_1/2 vs Gamma^2/2 at interior index " + std::to_string(i), W[static_cast<std::size_t>(i)],
                       [g](double w) { return w <= 0 ? 0.0 : boost::math::erf(std::sqrt(w / g)); }, sigma);
    rep.anchor = "(W_{1/2}(x))_x is distributed like (Gamma(x)^2 / 2)_x";
    out.push_back(rep);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      auto est = estimate_product_mean(W[static_cast<std::size_t>(i)], W[static_cast<std::size_t>(j)]);
      double target = (G(i, i) * G(j, j) + 2.0 * G(i, j) * G(i, j)) / 4.0;
      auto rep = moment_test("E[W_1/2(x) W_1/2(y)] at (" + std::to_string(i) + "," + std::to_string(j) + ")", est, target, sigma);
      rep.anchor = "E[Gamma(x)^2 Gamma(y)^2] / 4 = (G(x,x)G(y,y) + 2 G(x,y)^2) / 4";
      out.push_back(rep);
    }
  return out;
}

TestReport edge_law_check(const Network& network, std::size_t replicas, std::uint64_t seed, int cutoff, double sigma) {
  auto fields = admissible_edge_fields(network, cutoff);
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t i = 0; i < fields.size(); ++i) index[fields[i]] = i;
  const std::size_t tail = fields.size(), bad = fields.size() + 1;
  std::vector<std::size_t> cell(replicas);
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    auto soup = convert_orientation(sample_soup(network, 0.5, rng), true, rng);
    auto t = occupation_fields(network, soup, rng).traversals;
    auto it = index.find(t);
    if (it != index.end()) {
      cell[r] = it->second;
      return;
    }
    long total = std::accumulate(t.begin(), t.end(), 0L);
    cell[r] = (total > cutoff && edge_law_probability(network, t) > 0.0) ? tail : bad;
  });
  std::vector<double> observed(fields.size() + 2, 0.0), expected(fields.size() + 2, 0.0);
  for (auto c : cell) observed[c] += 1.0;
  double covered = 0.0;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    double p = edge_law_probability(network, fields[i]);
    covered += p;
    expected[i] = static_cast<double>(replicas) * p;
  }
  expected[tail] = static_cast<double>(replicas) * std::max(0.0, 1.0 - covered);
  expected[bad] = 0.0;
  auto rep = chi2_test("edge occupation law, |t| <= " + std::to_string(cutoff), observed, expected, sigma);
  rep.anchor = "P[T = t] = (1/sqrt(det G_D)) (2d)^{-|t|} prod_x P(2 s(x)) prod_e 1/t(e)!";
  rep.detail["fields"] = fields.size();
  rep.detail["inadmissible_observed"] = observed[bad];
  return rep;
}

std::vector<TestReport> pairing_invariance_check(const Network& network, std::size_t replicas, std::uint64_t seed,
                                                 double sigma) {
  std::vector<std::size_t> resampled(replicas), fresh(replicas);
  std::vector<double> len_a(replicas), len_b(replicas);
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    auto a = convert_orientation(sample_soup(network, 0.5, rng), true, rng);
    auto t = occupation_fields(network, a, rng).traversals;
    auto re = resample_pairings(network, t, rng);
    auto b = convert_orientation(sample_soup(network, 0.5, rng), true, rng);
    resampled[r] = re.loops.size();
    fresh[r] = b.loops.size();
    auto longest = [](const LoopSoup& s) {
      int m = 0;
      for (const auto& l : s.loops) m = std::max(m, l.length());
      return static_cast<double>(m);
    };
    len_a[r] = longest(re);
    len_b[r] = longest(b);
  });
  const std::size_t cells = 12;
  auto r1 = chi2_two_sample("loop count: resampled pairings vs fresh soup", histogram(resampled, cells),
                            histogram(fresh, cells), sigma);
  r1.anchor = "given T, the connections at the sites are independent uniform pairings";
  auto r2 = two_sample_mean_test("longest loop: resampled pairings vs fresh soup", estimate_mean(len_a),
                                 estimate_mean(len_b), sigma);
  r2.anchor = r1.anchor;
  return {r1, r2};
}

}  // namespace gfflab
