#include "gfflab/loewner.hpp"
#include "gfflab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>


namespace gfflab {

DrivingFunction constant_driving(double c, double T, double dt) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw std::invalid_argument("constant_driving: need dt > 0 and T >= 0");
  DrivingFunction d;
  d.dt = dt;
  d.W.assign(static_cast<std::size_t>(std::llround(T / dt)) + 1, c);
  d.generator = "constant";
  return d;
}

DrivingFunction brownian_driving(double kappa, double T, double dt, Engine& rng) {
  if (!(dt > 0.0) || !(T >= 0.0) || kappa < 0.0) throw std::invalid_argument("brownian_driving: bad parameters");
  DrivingFunction d;
  d.dt = dt;
  const std::size_t n = static_cast<std::size_t>(std::llround(T / dt));
  d.W.resize(n + 1);
  d.W[0] = 0.0;
  const double s = std::sqrt(kappa * dt);
  for (std::size_t i = 1; i <= n; ++i) d.W[i] = d.W[i - 1] + s * standard_normal(rng);
  d.generator = "brownian(kappa=" + std::to_string(kappa) + ")";
  return d;
}

DrivingFunction scale_driving(const DrivingFunction& d, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("scale_driving: lambda must be positive");
  DrivingFunction out = d;
  out.dt = d.dt / (lambda * lambda);
  for (double& w : out.W) w /= lambda;
  return out;
}

namespace {

Complex upper_root(Complex square, double sign_hint) {
  Complex s = std::sqrt(square);
  if (s.imag() < 0.0) s = -s;
  if (s.imag() == 0.0) s = Complex(std::copysign(std::abs(s.real()), sign_hint), 0.0);
  return s;
}

}  // namespace

Complex slit_map(Complex f, double dt) { return upper_root(f * f + 4.0 * dt, f.real()); }

Complex slit_map_inverse(Complex w, double dt) { return upper_root(w * w - 4.0 * dt, w.real()); }

LoewnerState initial_state(const DrivingFunction& d, const std::vector<Complex>& points) {
  LoewnerState s;
  s.W = d.W.empty() ? 0.0 : d.W[0];
  for (Complex z : points) {
    if (!(z.imag() > 0.0)) throw std::invalid_argument("forward_flow: points must lie in the open upper half-plane");
    FlowPoint p;
    p.z0 = z;
    p.f = z - s.W;
    s.points.push_back(p);
  }
  return s;
}

void advance(LoewnerState& state, const DrivingFunction& d, int i0, int i1) {
  if (i0 < 0 || i1 > d.steps() || i0 > i1) throw std::invalid_argument("advance: bad index range");
  for (int i = i0; i < i1; ++i) {
    const double jump = d.W[static_cast<std::size_t>(i) + 1] - d.W[static_cast<std::size_t>(i)];
    const double t_next = (i + 1) * d.dt;
    for (auto& p : state.points) {
      if (!p.alive) continue;
      Complex s = slit_map(p.f, d.dt);
      p.derivative *= p.f / s;
      p.f = s - jump;
      if (std::abs(p.f) < kSwallowEps) {
        p.alive = false;
        p.swallow_time = t_next;
      } else if (!(p.f.imag() > 0.0)) {
        throw std::runtime_error("advance: tracked point left the upper half-plane");
      }
    }
    state.t = t_next;
    state.W = d.W[static_cast<std::size_t>(i) + 1];
  }
}

std::vector<LoewnerState> forward_flow(const DrivingFunction& d, const std::vector<Complex>& points, int stride) {
  if (!(d.dt > 0.0)) throw std::invalid_argument("forward_flow: dt must be positive");
  LoewnerState s = initial_state(d, points);
  std::vector<LoewnerState> out;
  if (stride > 0) {
    out.push_back(s);
    for (int i = 0; i < d.steps(); i += stride) {
      advance(s, d, i, std::min(d.steps(), i + stride));
      out.push_back(s);
    }
  } else {
    advance(s, d, 0, d.steps());
    out.push_back(s);
  }
  return out;
}

TraceCurve trace(const DrivingFunction& d, int stride, double tip_eps) {
  if (stride < 1) throw std::invalid_argument("trace: stride must be >= 1");
  if (tip_eps < 0.0) tip_eps = std::sqrt(d.dt);
  TraceCurve c;
  c.times.push_back(0.0);
  c.points.emplace_back(d.W.empty() ? 0.0 : d.W[0], 0.0);
  const int N = d.steps();
  std::vector<int> marks;
  for (int n = stride; n < N; n += stride) marks.push_back(n);
  if (N > 0) marks.push_back(N);
  for (int k : marks) {
    Complex w(d.W[static_cast<std::size_t>(k) - 1], tip_eps);
    for (int i = k; i >= 1; --i) {
      const double held = d.W[static_cast<std::size_t>(i) - 1];
      w = held + slit_map_inverse(w - held, d.dt);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) throw std::runtime_error("trace: reverse flow blew up");
    }
    c.times.push_back(k * d.dt);
    c.points.push_back(w);
  }
  return c;
}

double half_plane_capacity(const DrivingFunction& d, int nodes) {
  double radius = 1.0 + 2.0 * std::sqrt(d.duration());
  for (double w : d.W) radius = std::max(radius, 1.0 + std::abs(w) + 2.0 * std::sqrt(d.duration()));
  radius *= 8.0;
  // Nodes in the upper half; the lower half follows from g(conj z) = conj g(z).
  std::vector<Complex> pts;
  for (int k = 0; k < nodes / 2; ++k) pts.push_back(std::polar(radius, std::numbers::pi * (k + 0.5) / (nodes / 2)));
  LoewnerState s = forward_flow(d, pts).back();
  Complex acc = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    Complex z = pts[k];
    Complex g = s.g(k);
    acc += (g - z) * z;
    acc += std::conj(g - z) * std::conj(z);
  }
  return (acc / static_cast<double>(2 * pts.size())).real();
}

double level_line_gap() { return std::numbers::pi / std::sqrt(2.0 * std::numbers::pi); }

namespace {

// One grid step of length tau with driving increment R. Where the step is
// coarse compared with |f|^2 the driving is refined by a Brownian bridge
// pinned to R, so every point sees a Brownian motion matching the grid.
bool bridged_step(Complex& f, double R, double tau, double kappa, Engine& rng) {
  constexpr double adapt = 1e-3;
  while (tau > 0.0) {
    const double h = adapt * std::norm(f);
    if (h >= tau * (1.0 - 1e-12)) {
      f = slit_map(f, tau) - R;
      tau = 0.0;
    } else {
      const double x = R * h / tau + std::sqrt(kappa * h * (tau - h) / tau) * standard_normal(rng);
      f = slit_map(f, h) - x;
      R -= x;
      tau -= h;
    }
    if (std::abs(f) < kSwallowEps) return false;
    if (!(f.imag() > 0.0)) throw std::runtime_error("sle_angle_martingale: point left the upper half-plane");
  }
  return true;
}

}  // namespace

std::vector<TestReport> sle_angle_martingale(double kappa, std::size_t replicas, const std::vector<Complex>& z_list,
                                             const std::vector<double>& times, double dt, std::uint64_t seed,
                                             double sigma) {
  if (times.empty() || z_list.empty()) throw std::invalid_argument("sle_angle_martingale: need points and times");
  std::vector<int> idx;
  for (double t : times) idx.push_back(static_cast<int>(std::llround(t / dt)));
  const double T = times.back();
  const std::size_t nz = z_list.size(), nt = times.size();
  std::vector<double> theta(replicas * nz * nt);
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    DrivingFunction d = brownian_driving(kappa, T, dt, rng);
    for (std::size_t j = 0; j < nz; ++j) {
      Complex f = z_list[j] - d.W[0];
      bool alive = true;
      int at = 0;
      for (std::size_t k = 0; k < nt; ++k) {
        for (; at < idx[k] && alive; ++at) {
          const auto i = static_cast<std::size_t>(at);
          alive = bridged_step(f, d.W[i + 1] - d.W[i], dt, kappa, rng);
        }
        theta[(r * nz + j) * nt + k] = std::arg(f);
      }
    }
  });
  std::vector<TestReport> out;
  for (std::size_t j = 0; j < nz; ++j) {
    const double theta0 = std::arg(z_list[j]);
    for (std::size_t k = 0; k < nt; ++k) {
      std::vector<double> v(replicas);
      for (std::size_t r = 0; r < replicas; ++r) v[r] = theta[(r * nz + j) * nt + k];
      MeanEstimate est = estimate_mean(v);
      const std::string label = "z=(" + std::to_string(z_list[j].real()) + "," + std::to_string(z_list[j].imag()) +
                                "), t=" + std::to_string(times[k]) + ", kappa=" + std::to_string(kappa);
      if (kappa == 4.0) {
        auto rep = moment_test_with_bias("E[theta_t] = theta_0 at " + label, est, theta0, 3.0 * dt, sigma);
        rep.anchor = "(theta_t(z), t >= 0) is a continuous martingale for SLE_4";
        out.push_back(rep);
      } else if (k + 1 == nt) {
        const double predicted = (2.0 - kappa / 2.0) * std::imag(1.0 / (z_list[j] * z_list[j]));
        const double signed_z = (est.mean - theta0) / est.stderr_ * (predicted >= 0 ? 1.0 : -1.0);
        // Passes when the drift has the predicted sign and is at least sigma
        // standard errors away from zero.
        auto rep = make_report("drift detected at " + label, -signed_z, -sigma, replicas,
                               "d theta = (2 - kappa/2) Im(1/f^2) dt - sqrt(kappa) Im(1/f) d beta");
        rep.detail["mean_drift"] = est.mean - theta0;
        rep.detail["predicted_sign"] = predicted >= 0 ? 1 : -1;
        out.push_back(rep);
      }
    }
  }
  return out;
}

SideProbability side_probability(std::size_t replicas, Complex z, const SideOptions& o, std::uint64_t seed,
                                 double sigma) {
  if (!(z.imag() > 0.0)) throw std::invalid_argument("side_probability: z must lie in the upper half-plane");
  std::vector<double> right(replicas);
  std::vector<char> unresolved(replicas, 0);
  const double sqrt_kappa = 2.0;
  for_each_replica(replicas, seed, [&](std::size_t r, Engine& rng) {
    Complex f = z;
    double t = 0.0;
    std::uint64_t steps = 0;
    for (;;) {
      double th = std::arg(f);
      if (std::min(th, std::numbers::pi - th) < o.resolve_eps) {
        right[r] = th > 0.5 * std::numbers::pi ? 1.0 : 0.0;
        return;
      }
      if (t > o.t_long || steps >= o.max_steps) {
        right[r] = th / std::numbers::pi;
        unresolved[r] = 1;
        return;
      }
      // The angle only depends on f / |f|, so steps proportional to |f|^2
      // keep the per-step accuracy constant as the curve moves away.
      const double h = std::max(o.dt, o.adapt * std::norm(f));
      f = slit_map(f, h) - sqrt_kappa * std::sqrt(h) * standard_normal(rng);
      t += h;
      ++steps;
    }
  });
  SideProbability sp;
  MeanEstimate est = estimate_mean(right);
  sp.estimate = est.mean;
  sp.stderr_ = est.stderr_;
  sp.replicas = replicas;
  sp.unresolved_fraction = static_cast<double>(std::count(unresolved.begin(), unresolved.end(), 1)) / static_cast<double>(replicas);
  const double target = std::arg(z) / std::numbers::pi;
  sp.report = moment_test("P[theta -> pi] at z=(" + std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")", est,
                          target, sigma);
  sp.report.anchor = "theta_infinity(z) is 0 or pi according to the side of eta; optional stopping gives theta_0(z)/pi";
  sp.report.detail["unresolved_fraction"] = sp.unresolved_fraction;
  if (sp.unresolved_fraction >= 0.01) sp.report.pass = false;
  return sp;
}

double BumpFunction::operator()(Complex z) const {
  double u = (z.real() - cx) / half_width, v = (z.imag() - cy) / half_width;
  if (std::abs(u) >= 1.0 || std::abs(v) >= 1.0) return 0.0;
  return (1 - u * u) * (1 - u * u) * (1 - v * v) * (1 - v * v);
}

namespace {

double green_half_plane(Complex x, Complex y) {
  return std::log(std::abs(x - std::conj(y)) / std::abs(x - y)) / (2.0 * std::numbers::pi);
}

}  // namespace

DepletionResult green_depletion_check(const DrivingFunction& d, const BumpFunction& phi, int nodes) {
  GaussRule rule = gauss_legendre(nodes);
  std::vector<Complex> pts;
  std::vector<double> weight;
  for (std::size_t a = 0; a < rule.x.size(); ++a)
    for (std::size_t b = 0; b < rule.x.size(); ++b) {
      Complex z(phi.cx + phi.half_width * rule.x[a], phi.cy + phi.half_width * rule.x[b]);
      pts.push_back(z);
      weight.push_back(rule.w[a] * rule.w[b] * phi.half_width * phi.half_width * phi(z));
    }
  const std::size_t P = pts.size();
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto H = [&](const std::vector<Complex>& f) {
    double acc = 0.0;
    for (std::size_t k = 0; k < P; ++k) acc += weight[k] * std::imag(-2.0 / f[k]);
    return inv_sqrt_2pi * acc;
  };

  LoewnerState s = initial_state(d, pts);
  double rhs = 0.0;
  std::vector<Complex> pre(P), post(P);
  for (int i = 0; i < d.steps(); ++i) {
    for (std::size_t k = 0; k < P; ++k) {
      pre[k] = s.points[k].f;
      post[k] = slit_map(pre[k], d.dt);
    }
    double h0 = H(pre), h1 = H(post);
    rhs += 0.5 * d.dt * (h0 * h0 + h1 * h1);
    advance(s, d, i, i + 1);
    for (const auto& p : s.points)
      if (!p.alive) throw std::runtime_error("green_depletion_check: a quadrature node was swallowed");
  }

  double lhs = 0.0;
  for (std::size_t a = 0; a < P; ++a)
    for (std::size_t b = 0; b < P; ++b) {
      double diff;
      const Complex fa = s.points[a].f, fb = s.points[b].f;
      if (a == b) {
        diff = (std::log(2.0 * pts[a].imag()) - std::log(2.0 * fa.imag()) + std::log(std::abs(s.points[a].derivative))) /
               (2.0 * std::numbers::pi);
      } else {
        diff = green_half_plane(pts[a], pts[b]) - green_half_plane(fa, fb);
      }
      lhs += weight[a] * weight[b] * diff;
    }
  DepletionResult r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.deviation = lhs != 0.0 ? std::abs(lhs - rhs) / std::abs(lhs) : std::abs(rhs);
  return r;
}

}  // namespace gfflab
