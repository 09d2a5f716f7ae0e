#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "gfflab/rng.hpp"
#include "gfflab/stats.hpp"

namespace gfflab {

using Complex = std::complex<double>;

/// Driving function sampled on a uniform grid t_i = i dt, i = 0..N.
struct DrivingFunction {
  double dt = 0.0;
  std::vector<double> W;
  std::string generator;

  int steps() const { return static_cast<int>(W.size()) - 1; }
  double duration() const { return dt * steps(); }
};

DrivingFunction constant_driving(double c, double T, double dt);
/// W = sqrt(kappa) beta with beta built from sqrt(dt) N(0,1) increments.
DrivingFunction brownian_driving(double kappa, double T, double dt, Engine& rng);
/// W'(t) = W(lambda^2 t) / lambda on the grid dt / lambda^2.
DrivingFunction scale_driving(const DrivingFunction& d, double lambda);

/// sqrt(f^2 + 4 dt) on the branch with nonnegative imaginary part (the
/// vertical-slit map). Real arguments keep the sign of f.
Complex slit_map(Complex f, double dt);
/// Inverse of slit_map: sqrt(w^2 - 4 dt) on the same branch.
Complex slit_map_inverse(Complex w, double dt);

inline constexpr double kSwallowEps = 1e-6;

struct FlowPoint {
  Complex z0;
  Complex f;             // g_t(z) - W_t
  Complex derivative{1.0, 0.0};  // d g_t / dz
  bool alive = true;
  double swallow_time = -1.0;

  double theta() const { return std::arg(f); }
};

struct LoewnerState {
  double t = 0.0;
  double W = 0.0;
  std::vector<FlowPoint> points;

  Complex g(std::size_t i) const { return points[i].f + W; }
};

LoewnerState initial_state(const DrivingFunction& d, const std::vector<Complex>& points);

/// Advances from grid index i0 to i1, holding W constant on each step.
/// Throws std::runtime_error if a point leaves the upper half-plane.
void advance(LoewnerState& state, const DrivingFunction& d, int i0, int i1);

/// Flow over the whole driving function. `stride` > 0 records every stride
/// steps (plus the final state); stride 0 records only the final state.
std::vector<LoewnerState> forward_flow(const DrivingFunction& d, const std::vector<Complex>& points, int stride = 0);

struct TraceCurve {
  std::vector<double> times;
  std::vector<Complex> points;
};

/// eta(t_n) = g_{t_n}^{-1}(W_{n-1} + i tip_eps) through the inverse slit maps,
/// for n = stride, 2 stride, ... (and N). eta(0) = W_0. A negative tip_eps
/// means sqrt(dt).
TraceCurve trace(const DrivingFunction& d, int stride = 1, double tip_eps = -1.0);

/// Coefficient a in g_T(z) = z + a / z + ..., from a contour integral of
/// (g_T(z) - z) z on a large circle. Equals 2T.
double half_plane_capacity(const DrivingFunction& d, int nodes = 256);

/// Harmonic height gap between the two sides of an SLE_4 level line, pi / sqrt(2 pi).
double level_line_gap();

/// For kappa = 4: E[theta_t(z)] = theta_0(z) within sigma stderr + 3 dt.
/// The driving is sampled on the dt grid; grid steps that are coarse
/// compared with |f|^2 are refined by Brownian bridges.
/// For kappa != 4: the drift at the last time must have the sign of
/// (2 - kappa/2) Im(1 / z^2) and exceed sigma standard errors.
std::vector<TestReport> sle_angle_martingale(double kappa, std::size_t replicas, const std::vector<Complex>& z_list,
                                             const std::vector<double>& times, double dt, std::uint64_t seed,
                                             double sigma = 4.0);

struct SideProbability {
  double estimate = 0.0;
  double stderr_ = 0.0;
  double unresolved_fraction = 0.0;
  std::size_t replicas = 0;
  TestReport report;
};

struct SideOptions {
  double dt = 0.0;            // smallest step
  double adapt = 1e-3;        // step = max(dt, adapt |f|^2)
  double resolve_eps = 1e-3;  // stop when min(theta, pi - theta) < resolve_eps
  double t_long = 1e12;
  std::uint64_t max_steps = 200000;
};

/// P[theta_t(z) -> pi] for SLE_4, compared with theta_0(z) / pi.
SideProbability side_probability(std::size_t replicas, Complex z, const SideOptions& options, std::uint64_t seed,
                                 double sigma = 4.0);

struct DepletionResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double deviation = 0.0;  // |lhs - rhs| / |lhs|
};

/// Test function supported on [cx - h, cx + h] x [cy - h, cy + h]:
/// phi = (1 - u^2)^2 (1 - v^2)^2 in rescaled coordinates.
struct BumpFunction {
  double cx = 0.0;
  double cy = 2.0;
  double half_width = 0.5;
  double operator()(Complex z) const;
};

/// Integrated Green's function depletion along the realized curve up to the
/// end of `d`: int int (G_H(x,y) - G_H(g_t x, g_t y)) phi phi against
/// int_0^t H_s^2 ds with H_s = (1/sqrt(2 pi)) int phi Im(-2 / f_s).
DepletionResult green_depletion_check(const DrivingFunction& d, const BumpFunction& phi, int nodes = 8);

}  // namespace gfflab
