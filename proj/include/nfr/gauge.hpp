// gauge.hpp
// The gauge map u ↦ v ↦ w, its inverse, smooth approximants and the residual
// check for the transformed equation (eq:w).
//
// J(u) = ∂_x⁻¹ P_{≠c}(|u|²) with |u|² taken pointwise on the grid, so that
// v = e^{−iλJ(u)}u and its inverse u = e^{+iλJ(v)}v (|v| = |u| pointwise)
// round-trip exactly up to transform truncation.

#ifndef NFR_GAUGE_HPP_
#define NFR_GAUGE_HPP_

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nfr/core.hpp"
#include "nfr/cutoffs.hpp"
#include "nfr/dynamics.hpp"
#include "nfr/norms.hpp"

namespace nfr {

// ∂_x⁻¹ on the physical side: divide coefficients by iξ, zero mode → 0.
// The mean is removed automatically; `had_mean` (optional) reports whether a
// nonzero mean was dropped.
inline PhysicalField antiderivative(const PhysicalField& f,
                                    bool* had_mean = nullptr) {
  SpectralField fh = fft_forward(f);
  if (had_mean) *had_mean = std::abs(fh.at(0)) > 1e-13;
  return fft_inverse(antiderivative_spectral(std::move(fh)));
}

// J(u) evaluated on the grid; real-valued up to rounding.
inline PhysicalField gauge_phase(const PhysicalField& u) {
  PhysicalField sq(u.lat, u.t);
  for (int m = 0; m < u.lat.grid_points; ++m) sq.s[m] = std::norm(u.s[m]);
  return antiderivative(sq);
}

inline PhysicalField gauge_forward(const PhysicalField& u, double lambda) {
  PhysicalField J = gauge_phase(u);
  PhysicalField v(u.lat, u.t);
  for (int m = 0; m < u.lat.grid_points; ++m)
    v.s[m] = std::polar(1.0, -lambda * J.s[m].real()) * u.s[m];
  return v;
}

inline PhysicalField gauge_inverse(const PhysicalField& v, double lambda) {
  // |v| = |u| pointwise, so J(v) = J(u) and the inverse is the opposite phase.
  return gauge_forward(v, -lambda);
}

// Spectral-side wrappers (truncate the non-band-limited phase factor back to
// the lattice; the truncation error is what round-trip tests measure).
inline SpectralField gauge_forward(const SpectralField& uhat, double lambda) {
  return fft_forward(gauge_forward(fft_inverse(uhat), lambda));
}
inline SpectralField gauge_inverse(const SpectralField& vhat, double lambda) {
  return fft_forward(gauge_inverse(fft_inverse(vhat), lambda));
}

// ---------------------------------------------------------------------------
// w(t, x) = v(t, x − D(t)),  D(t) = 2λ∫₀ᵗ P_c(|v|²)dt′, as a spectral phase.
// ---------------------------------------------------------------------------
struct GaugeContext {
  double lambda = -1.0;
  std::vector<double> pc_v2;  // P_c(|v(t_k)|²) per stored index
  std::vector<double> D;      // accumulated drift, D[0] = 0 (trapezoid)
};

inline double pc_abs2(const SpectralField& f) {
  double acc = 0;
  for (const auto& v : f.c) acc += std::norm(v);
  return acc / TWO_PI;  // P_c(|f|²) = (1/2π)∫|f|² = (1/2π)Σ|f̂|²
}

inline SpectralField translate(SpectralField f, double shift) {
  // f(x − shift): multiply coefficients by e^{−iξ·shift}
  for (int xi = -f.X(); xi <= f.X(); ++xi)
    f.at(xi) *= std::polar(1.0, -xi * shift);
  return f;
}

// Map a v-trajectory to the w-trajectory; fills ctx with the drift history.
inline Trajectory gauge_w(const Trajectory& v_traj, GaugeContext& ctx) {
  ctx.lambda = v_traj.lambda;
  ctx.pc_v2.clear();
  ctx.D.clear();
  Trajectory out{v_traj.lat, v_traj.lambda, v_traj.dt, {}};
  double D = 0.0;
  for (int k = 0; k < v_traj.size(); ++k) {
    double pc = pc_abs2(v_traj.fields[k]);
    if (k > 0)
      D += v_traj.dt * 0.5 * (pc + ctx.pc_v2.back()) * 2.0 * ctx.lambda;
    ctx.pc_v2.push_back(pc);
    ctx.D.push_back(D);
    out.fields.push_back(translate(v_traj.fields[k], D));
  }
  return out;
}

inline Trajectory gauge_w_inverse(const Trajectory& w_traj,
                                  const GaugeContext& ctx) {
  Trajectory out{w_traj.lat, w_traj.lambda, w_traj.dt, {}};
  for (int k = 0; k < w_traj.size(); ++k)
    out.fields.push_back(translate(w_traj.fields[k], -ctx.D[k]));
  return out;
}

// u_N := P_{≤N}u and its gauged companion v_N := e^{−iλJ(u_N)}u_N.
inline std::pair<SpectralField, SpectralField> smooth_approximant(
    const SpectralField& uhat, int N, double lambda) {
  SpectralField uN = lp_project_leq(uhat, N);
  return {uN, gauge_forward(uN, lambda)};
}

// ---------------------------------------------------------------------------
// Residual of eq:w on a stored trajectory:
//   ∂_t w − i∂_x²w + λ(w²∂_xw̄ − 2P_c(w∂_xw̄)w) − iλ²(…quintic…)
// measured in H^{−1/2−ε}; ∂_t by centered 5-point finite differences.
// Returns the max over interior admissible indices.
// ---------------------------------------------------------------------------
inline double transformed_residual(const Trajectory& w_traj,
                                   double eps = 0.01) {
  if (w_traj.size() < 5)
    throw std::invalid_argument("transformed_residual: need >= 5 states");
  double worst = 0;
  const double h = w_traj.dt;
  for (int k = 2; k + 2 < w_traj.size(); ++k) {
    // 4th-order centered: (f[-2] − 8f[-1] + 8f[+1] − f[+2]) / (12h)
    SpectralField dw(w_traj.lat, w_traj.fields[k].t);
    for (int xi = -dw.X(); xi <= dw.X(); ++xi)
      dw.at(xi) = (w_traj.fields[k - 2].at(xi) -
                   8.0 * w_traj.fields[k - 1].at(xi) +
                   8.0 * w_traj.fields[k + 1].at(xi) -
                   w_traj.fields[k + 2].at(xi)) /
                  (12.0 * h);
    const SpectralField& w = w_traj.fields[k];
    SpectralField rhs = rhs_w_nonlinear(w, w_traj.lambda);
    for (int xi = -w.X(); xi <= w.X(); ++xi)
      rhs.at(xi) += cplx(0.0, -double(xi) * xi) * w.at(xi);  // i∂_x²w
    dw -= rhs;
    worst = std::max(worst, sobolev(dw, -0.5 - eps));
  }
  return worst;
}

}  // namespace nfr

#endif  // NFR_GAUGE_HPP_
