#include "gfflab/wilson.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "gfflab/laplace.hpp"

namespace gfflab {

WalkPath run_walk(const Network& network, int start, Engine& rng, bool continuous_time,
                  std::uint64_t step_cap, std::span<const char> stop) {
  if (start < 0 || start >= network.vertex_count() || network.is_boundary(start))
    throw std::invalid_argument("run_walk: start must be an interior vertex");
  auto stopped = [&](int v) {
    return stop.empty() ? network.is_boundary(v) : stop[static_cast<std::size_t>(v)] != 0;
  };
  WalkPath p;
  p.vertices.push_back(start);
  int v = start;
  std::uint64_t steps = 0;
  while (!stopped(v)) {
    if (++steps > step_cap) throw std::runtime_error("run_walk: step cap exceeded");
    if (continuous_time) p.holding.push_back(standard_exponential(rng) / network.lambda(v));
    int e = network.pick_edge(v, uniform01(rng));
    v = network.other_end(e, v);
    p.edges.push_back(e);
    p.vertices.push_back(v);
  }
  return p;
}

int ErasedLoop::returns() const {
  return static_cast<int>(std::count(piece.vertices.begin() + 1, piece.vertices.end(), root));
}

Loop ErasedLoop::loop() const {
  Loop l;
  l.vertices.assign(piece.vertices.begin(), piece.vertices.end() - 1);
  l.edges = piece.edges;
  return l;
}

std::vector<Loop> ErasedLoop::excursions() const {
  std::vector<Loop> out;
  Loop cur;
  for (int i = 0; i < piece.steps(); ++i) {
    cur.vertices.push_back(piece.vertices[static_cast<std::size_t>(i)]);
    cur.edges.push_back(piece.edges[static_cast<std::size_t>(i)]);
    if (piece.vertices[static_cast<std::size_t>(i) + 1] == root) {
      out.push_back(std::move(cur));
      cur = Loop{};
    }
  }
  return out;
}

LoopErasure loop_erase(const WalkPath& path) {
  if (path.vertices.empty()) throw std::invalid_argument("loop_erase: empty path");
  const bool timed = !path.holding.empty();
  std::map<int, int> last;
  for (int i = 0; i < static_cast<int>(path.vertices.size()); ++i) last[path.vertices[static_cast<std::size_t>(i)]] = i;

  LoopErasure out;
  const int end = static_cast<int>(path.vertices.size()) - 1;
  int s = 0;
  for (;;) {
    int v = path.vertices[static_cast<std::size_t>(s)];
    int r = last[v];
    if (r > s) {
      ErasedLoop el;
      el.root = v;
      el.lerw_position = static_cast<int>(out.lerw.vertices.size());
      el.piece.vertices.assign(path.vertices.begin() + s, path.vertices.begin() + r + 1);
      el.piece.edges.assign(path.edges.begin() + s, path.edges.begin() + r);
      if (timed) el.piece.holding.assign(path.holding.begin() + s, path.holding.begin() + r);
      out.erased.push_back(std::move(el));
    }
    out.lerw.vertices.push_back(v);
    if (r == end) break;
    out.lerw.edges.push_back(path.edges[static_cast<std::size_t>(r)]);
    if (timed) out.lerw.holding.push_back(path.holding[static_cast<std::size_t>(r)]);
    s = r + 1;
  }
  return out;
}

WalkPath resplice(const LoopErasure& erasure) {
  const WalkPath& l = erasure.lerw;
  const bool timed = !l.holding.empty() || std::any_of(erasure.erased.begin(), erasure.erased.end(),
                                                       [](const ErasedLoop& e) { return !e.piece.holding.empty(); });
  WalkPath out;
  std::size_t next = 0;
  for (int j = 0; j < static_cast<int>(l.vertices.size()); ++j) {
    if (next < erasure.erased.size() && erasure.erased[next].lerw_position == j) {
      const WalkPath& p = erasure.erased[next].piece;
      out.vertices.insert(out.vertices.end(), p.vertices.begin(), p.vertices.end() - 1);
      out.edges.insert(out.edges.end(), p.edges.begin(), p.edges.end());
      if (timed) out.holding.insert(out.holding.end(), p.holding.begin(), p.holding.end());
      ++next;
    }
    out.vertices.push_back(l.vertices[static_cast<std::size_t>(j)]);
    if (j < l.steps()) {
      out.edges.push_back(l.edges[static_cast<std::size_t>(j)]);
      if (timed) out.holding.push_back(l.holding[static_cast<std::size_t>(j)]);
    }
  }
  if (next != erasure.erased.size()) throw std::invalid_argument("resplice: erased loop positions out of order");
  return out;
}

WilsonResult wilson_ust(const Network& network, std::span<const int> ordering, Engine& rng, bool continuous_time) {
  const int n = network.interior_count();
  std::vector<int> order(ordering.begin(), ordering.end());
  if (order.empty()) order.assign(network.interior().begin(), network.interior().end());
  if (static_cast<int>(order.size()) != n) throw std::invalid_argument("wilson_ust: ordering must list every interior vertex");

  std::vector<char> in_tree(static_cast<std::size_t>(network.vertex_count()), 0);
  for (int v : network.boundary()) in_tree[static_cast<std::size_t>(v)] = 1;

  WilsonResult res;
  res.occupation.V.assign(static_cast<std::size_t>(n), 0);
  res.occupation.W.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<std::pair<int, int>> tree;  // (edge, branch)
  int branch = 0;
  for (int x : order) {
    if (network.interior_index(x) < 0) throw std::invalid_argument("wilson_ust: ordering contains a boundary vertex");
    if (in_tree[static_cast<std::size_t>(x)]) continue;
    WalkPath path = run_walk(network, x, rng, continuous_time, kDefaultStepCap, in_tree);
    for (int i = 0; i < path.steps(); ++i) {
      int idx = network.interior_index(path.vertices[static_cast<std::size_t>(i)]);
      ++res.occupation.V[static_cast<std::size_t>(idx)];
      if (continuous_time) res.occupation.W[static_cast<std::size_t>(idx)] += path.holding[static_cast<std::size_t>(i)];
    }
    LoopErasure le = loop_erase(path);
    for (int e : le.lerw.edges) tree.emplace_back(e, branch);
    for (int v : le.lerw.vertices) in_tree[static_cast<std::size_t>(v)] = 1;
    for (auto& el : le.erased) res.erased.push_back(std::move(el));
    ++branch;
  }
  std::sort(tree.begin(), tree.end());
  for (auto [e, b] : tree) {
    res.tree.edges.push_back(e);
    res.tree.branch.push_back(b);
  }
  return res;
}

WilsonResult wilson_ust(const Network& network, std::span<const int> ordering, std::uint64_t seed,
                        bool continuous_time) {
  Engine rng = make_engine(seed, 0);
  return wilson_ust(network, ordering, rng, continuous_time);
}

double tree_probability(const Network& network, std::span<const int> tree_edges) {
  double logw = 0.0;
  for (int e : tree_edges) logw += std::log(network.edge(e).conductance);
  return std::exp(logw - det_laplacian(network).log_value);
}

double occupation_laplace_transform(const Network& network, std::span<const double> k) {
  return std::exp(det_laplacian(network).log_value - det_laplacian(add_mass(network, k)).log_value);
}

std::vector<TestReport> verify_w_laplace(const Network& network, std::span<const double> k, std::size_t replicas,
                                         std::uint64_t seed, std::span<const int> ordering, double sigma) {
  const int n = network.interior_count();
  std::vector<double> w_stat(replicas), v_stat(replicas);
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    WilsonResult res = wilson_ust(network, ordering, rng, true);
    double a = 0.0, b = 0.0;
    for (int i = 0; i < n; ++i) {
      double lambda = network.lambda(network.interior()[static_cast<std::size_t>(i)]);
      a += k[static_cast<std::size_t>(i)] * res.occupation.W[static_cast<std::size_t>(i)];
      b += res.occupation.V[static_cast<std::size_t>(i)] * std::log1p(k[static_cast<std::size_t>(i)] / lambda);
    }
    w_stat[r] = std::exp(-a);
    v_stat[r] = std::exp(-b);
  });
  double target = occupation_laplace_transform(network, k);
  auto rw = moment_test("E[exp(-sum k W)]", estimate_mean(w_stat), target, sigma);
  rw.anchor = "E[exp(-sum_x k(x) W(x))] = det(-Delta_D) / det(-Delta_D + I_k)";
  auto rv = moment_test("E[prod (1+k/lambda)^-V]", estimate_mean(v_stat), target, sigma);
  rv.anchor = "E[prod_x (1 + k(x))^{-V(x)}] = det(-Delta_D) / det(-Delta_D + I_k)";
  return {rw, rv};
}

TestReport marginal_w_law(const Network& network, int x, std::size_t replicas, std::uint64_t seed,
                          std::span<const int> ordering, double sigma) {
  int ix = network.interior_index(x);
  if (ix < 0) throw std::invalid_argument("marginal_w_law: x must be interior");
  std::vector<double> w(replicas);
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    w[r] = wilson_ust(network, ordering, rng, true).occupation.W[static_cast<std::size_t>(ix)];
  });
  const double mean = green(network)(ix, ix);
  auto rep = ks_test("W(x) ~ Exp(G(x,x))", std::move(w), [mean](double t) { return t <= 0 ? 0.0 : -std::expm1(-t / mean); },
                     sigma);
  rep.anchor = "W(x) is exponential with mean G_D(x, x)";
  rep.detail["mean"] = mean;
  return rep;
}

TestReport verify_tree_law(const Network& network, std::size_t replicas, std::uint64_t seed,
                           std::span<const int> ordering, double sigma) {
  auto trees = enumerate_wired_spanning_trees(network);
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t i = 0; i < trees.size(); ++i) index[trees[i]] = i;
  std::vector<int> hit(replicas);
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    auto t = wilson_ust(network, ordering, rng).tree.edges;
    auto it = index.find(t);
    hit[r] = it == index.end() ? -1 : static_cast<int>(it->second);
  });
  std::vector<double> observed(trees.size() + 1, 0.0), expected(trees.size() + 1, 0.0);
  for (int h : hit) observed[h < 0 ? trees.size() : static_cast<std::size_t>(h)] += 1.0;
  for (std::size_t i = 0; i < trees.size(); ++i)
    expected[i] = static_cast<double>(replicas) * tree_probability(network, trees[i]);
  auto rep = chi2_test("Wilson tree law", observed, expected, sigma);
  rep.anchor = "P[T = T] = w_c(T) det G_{D,c}";
  rep.detail["trees"] = trees.size();
  return rep;
}

std::vector<TestReport> verify_w_coupling(const Network& network, std::size_t replicas, std::uint64_t seed,
                                          double sigma) {
  const int n = network.interior_count();
  Eigen::MatrixXd G = green(network);
  std::vector<std::vector<double>> W(static_cast<std::size_t>(n), std::vector<double>(replicas));
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    auto res = wilson_ust(network, {}, rng, true);
    for (int i = 0; i < n; ++i) W[static_cast<std::size_t>(i)][r] = res.occupation.W[static_cast<std::size_t>(i)];
  });
  std::vector<TestReport> out;
  for (int i = 0; i < n; ++i) {
    // (Gamma_1^2 + Gamma_2^2)/2 at one site is exponential with mean G(x,x).
    const double mean = G(i, i);
    auto rep = ks_test("W(x) vs (Gamma1^2+Gamma2^2)/2 at interior index " + std::to_string(i), W[static_cast<std::size_t>(i)],
                       [mean](double t) { return t <= 0 ? 0.0 : -std::expm1(-t / mean); }, sigma);
    rep.anchor = "(W(x))_x is distributed like ((Gamma_1(x)^2 + Gamma_2(x)^2)/2)_x";
    out.push_back(rep);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      auto est = estimate_product_mean(W[static_cast<std::size_t>(i)], W[static_cast<std::size_t>(j)]);
      auto rep = moment_test("E[W(x)W(y)] at (" + std::to_string(i) + "," + std::to_string(j) + ")", est,
                             G(i, i) * G(j, j) + G(i, j) * G(i, j), sigma);
      rep.anchor = "E[W(x)W(y)] = G(x,x)G(y,y) + G(x,y)^2";
      out.push_back(rep);
    }
  return out;
}

}  // namespace gfflab
