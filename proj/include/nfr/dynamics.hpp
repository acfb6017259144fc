// dynamics.hpp
// Pseudospectral DNLS evolution (integrating-factor RK4/RK2 on the
// interaction variable a(ξ) = e^{itξ²}û(ξ)), the gauged w-equation, Duhamel
// residuals, conservation drift and Strichartz profiles.

#ifndef NFR_DYNAMICS_HPP_
#define NFR_DYNAMICS_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "nfr/core.hpp"
#include "nfr/cutoffs.hpp"
#include "nfr/norms.hpp"

namespace nfr {

// ---------------------------------------------------------------------------
// Trajectory: uniformly spaced stored states, û convention, t recorded per
// field.  dt is the distance between *stored* states (solver dt × stride).
// ---------------------------------------------------------------------------
struct Trajectory {
  FrequencyLattice lat;
  double lambda = -1.0;
  double dt = 0.0;  // spacing of stored states
  std::vector<SpectralField> fields;

  int size() const { return static_cast<int>(fields.size()); }
  double t(int k) const { return fields[k].t; }
};

// Interaction representation ω(ξ) = e^{itξ²}û(ξ) and its inverse; each uses
// the field's own time stamp.
inline SpectralField interaction_rep(const SpectralField& uhat) {
  return free_flow(uhat, -uhat.t);
}
inline SpectralField physical_rep(const SpectralField& omega) {
  return free_flow(omega, omega.t);
}

inline Trajectory interaction_rep(const Trajectory& traj) {
  Trajectory out{traj.lat, traj.lambda, traj.dt, {}};
  out.fields.reserve(traj.fields.size());
  for (const auto& f : traj.fields) out.fields.push_back(interaction_rep(f));
  return out;
}
inline Trajectory physical_rep(const Trajectory& traj) {
  Trajectory out{traj.lat, traj.lambda, traj.dt, {}};
  out.fields.reserve(traj.fields.size());
  for (const auto& f : traj.fields) out.fields.push_back(physical_rep(f));
  return out;
}

// ---------------------------------------------------------------------------
// Right-hand sides (û-side nonlinearities; exact dealiased products).
// ---------------------------------------------------------------------------

// F[λ ∂_x(|u|²u)] with |u|²u = u·u·ū — the nonlinear part of
// ∂_t u = i∂_x²u + λ∂_x(|u|²u), i.e. (dnls) with the i divided out.
inline SpectralField rhs_u_nonlinear(const SpectralField& uhat, double lambda) {
  SpectralField cubic = exact_product(
      {{&uhat, false, 0}, {&uhat, false, 0}, {&uhat, true, 0}}, uhat.lat,
      uhat.t);
  cubic = derivative(std::move(cubic));
  cubic *= cplx(lambda);
  return cubic;
}

// A lattice just wide enough to hold products up to half-width `half`.
inline FrequencyLattice product_lattice(int half) {
  int X = std::max(half, 4);
  return FrequencyLattice(X, next_pow2(2 * (2 * X + 1)));
}

// Cubic terms of the gauged equation: F[−λ(w²∂_xw̄ − 2P_c(w∂_xw̄)w)].
inline SpectralField w_cubic_terms(const SpectralField& what, double lambda) {
  const auto& lat = what.lat;
  const double t = what.t;
  // w² ∂_xw̄  (∂_x of the conjugate = conjugate of ∂_x w)
  SpectralField cubic = exact_product(
      {{&what, false, 0}, {&what, false, 0}, {&what, true, 1}}, lat, t);
  // P_c(w ∂_xw̄): only the zero mode is needed
  SpectralField pair =
      exact_product({{&what, false, 0}, {&what, true, 1}}, lat, t);
  cplx pc_wdw = mean_value(pair);
  SpectralField out = what;
  out *= cplx(2.0 * lambda) * pc_wdw;  // +2λ P_c(w∂_xw̄) w
  out -= cplx(lambda) * cubic;         // −λ w²∂_xw̄
  return out;
}

// Quintic terms: F[iλ²(½P_{≠c}(|w|⁴)w − P_c(|w|²)P_{≠c}(|w|²)w)].
// Intermediate products stay on wide lattices so nothing is truncated before
// the final multiplication by w.
inline SpectralField w_quintic_terms(const SpectralField& what, double lambda) {
  const auto& lat = what.lat;
  const double t = what.t;
  SpectralField out(lat, t);
  {
    FrequencyLattice wide2 = product_lattice(2 * lat.xi_max);
    SpectralField q2 =
        exact_product({{&what, false, 0}, {&what, true, 0}}, wide2, t);
    double pc_w2 = mean_value(q2).real();
    q2.at(0) = 0.0;  // P_{≠c}(|w|²)
    SpectralField r2 = exact_product({{&q2, false, 0}, {&what, false, 0}}, lat, t);
    r2 *= cplx(0.0, -lambda * lambda * pc_w2);  // −iλ² P_c(|w|²)·(…)
    out += r2;
  }
  FrequencyLattice wide4 = product_lattice(4 * lat.xi_max);
  SpectralField q4 = exact_product({{&what, false, 0},
                                    {&what, false, 0},
                                    {&what, true, 0},
                                    {&what, true, 0}},
                                   wide4, t);
  q4.at(0) = 0.0;  // P_{≠c}(|w|⁴)
  SpectralField r4 = exact_product({{&q4, false, 0}, {&what, false, 0}}, lat, t);
  r4 *= cplx(0.0, 0.5 * lambda * lambda);  // +i(λ²/2)(…)
  out += r4;
  return out;
}

// Nonlinear part of the gauged equation, i.e. the full RHS of
//   ∂_t w = i∂_x²w − λ(w²∂_xw̄ − 2P_c(w∂_xw̄)w)
//           + iλ²(½P_{≠c}(|w|⁴)w − P_c(|w|²)P_{≠c}(|w|²)w)
// minus the linear i∂_x² term.
inline SpectralField rhs_w_nonlinear(const SpectralField& what, double lambda) {
  SpectralField out = w_cubic_terms(what, lambda);
  out += w_quintic_terms(what, lambda);
  return out;
}

enum class Model { u_equation, w_equation };

// ∂_t a in the interaction picture: a(ξ) = e^{itξ²}û(ξ), so
// ∂_t a = e^{itξ²}·(nonlinear û-side RHS).
inline SpectralField rhs_interaction(const SpectralField& a, double t,
                                     Model model, double lambda) {
  SpectralField uhat = a;
  uhat.t = t;
  uhat = physical_rep(uhat);
  SpectralField nl = (model == Model::u_equation)
                         ? rhs_u_nonlinear(uhat, lambda)
                         : rhs_w_nonlinear(uhat, lambda);
  nl.t = t;
  return interaction_rep(nl);
}

// ---------------------------------------------------------------------------
// Integrating-factor Runge–Kutta steppers.
// ---------------------------------------------------------------------------
struct SolveConfig {
  double lambda = -1.0;
  double dt = 0.0;       // 0 → auto 0.5/Ξmax², rounded so T/dt is integral
  double T = 0.1;
  int save_stride = 1;
  int rk_order = 4;      // 4 or 2
  Model model = Model::u_equation;
  double blowup_guard = 1e6;  // abort if any |a(ξ)| exceeds this
};

// One IF-RK step on the interaction variable (a, t) → (a, t+dt).
inline void step_interaction(SpectralField& a, double t, double dt, Model model,
                             double lambda, int rk_order) {
  auto f = [&](const SpectralField& y, double s) {
    return rhs_interaction(y, s, model, lambda);
  };
  if (rk_order == 2) {
    SpectralField k1 = f(a, t);
    k1 *= cplx(0.5 * dt);
    SpectralField mid = a;
    mid += k1;
    SpectralField k2 = f(mid, t + 0.5 * dt);
    k2 *= cplx(dt);
    a += k2;
  } else {
    SpectralField k1 = f(a, t);
    SpectralField y2 = a;
    {
      SpectralField h = k1;
      h *= cplx(0.5 * dt);
      y2 += h;
    }
    SpectralField k2 = f(y2, t + 0.5 * dt);
    SpectralField y3 = a;
    {
      SpectralField h = k2;
      h *= cplx(0.5 * dt);
      y3 += h;
    }
    SpectralField k3 = f(y3, t + 0.5 * dt);
    SpectralField y4 = a;
    {
      SpectralField h = k3;
      h *= cplx(dt);
      y4 += h;
    }
    SpectralField k4 = f(y4, t + dt);
    k2 *= cplx(2.0);
    k3 *= cplx(2.0);
    k1 += k2;
    k1 += k3;
    k1 += k4;
    k1 *= cplx(dt / 6.0);
    a += k1;
  }
  a.t = t + dt;
}

// û-side step wrapper: advance a lab-frame state by dt.
inline SpectralField step(const SpectralField& uhat, double dt,
                          const SolveConfig& cfg) {
  SpectralField a = interaction_rep(uhat);
  step_interaction(a, uhat.t, dt, cfg.model, cfg.lambda, cfg.rk_order);
  for (const auto& v : a.c)
    if (!std::isfinite(std::abs(v)) || std::abs(v) > cfg.blowup_guard)
      throw std::runtime_error("step: blow-up guard triggered");
  return physical_rep(a);
}

inline Trajectory solve(const SpectralField& u0, const SolveConfig& cfg_in) {
  SolveConfig cfg = cfg_in;
  double dt_cap = 0.5 / (double(u0.X()) * u0.X());
  if (cfg.dt <= 0.0)
    cfg.dt = cfg.T / std::ceil(cfg.T / dt_cap);
  if (cfg.dt > dt_cap * (1.0 + 1e-12))
    throw std::invalid_argument("solve: dt exceeds the 0.5/xi_max^2 guard");
  int steps = static_cast<int>(std::llround(cfg.T / cfg.dt));
  if (std::abs(steps * cfg.dt - cfg.T) > 1e-9 * std::max(1.0, cfg.T))
    throw std::invalid_argument("solve: T must be an integer multiple of dt");

  Trajectory traj{u0.lat, cfg.lambda, cfg.dt * cfg.save_stride, {}};
  SpectralField a = interaction_rep(u0);
  traj.fields.push_back(u0);
  for (int k = 0; k < steps; ++k) {
    step_interaction(a, k * cfg.dt, cfg.dt, cfg.model, cfg.lambda,
                     cfg.rk_order);
    double m = 0;
    for (const auto& v : a.c) m = std::max(m, std::abs(v));
    if (!std::isfinite(m) || m > cfg.blowup_guard)
      throw std::runtime_error("solve: blow-up guard triggered at t=" +
                               std::to_string((k + 1) * cfg.dt) +
                               " (max|a|=" + std::to_string(m) + ")");
    if ((k + 1) % cfg.save_stride == 0) traj.fields.push_back(physical_rep(a));
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Diagnostics.
// ---------------------------------------------------------------------------
inline double l2_drift(const Trajectory& traj) {
  if (traj.fields.empty()) throw std::invalid_argument("l2_drift: empty");
  double base = traj.fields.front().l2();
  if (base == 0.0) return 0.0;
  double worst = 0;
  for (const auto& f : traj.fields)
    worst = std::max(worst, std::abs(f.l2() - base) / base);
  return worst;
}

// ‖u(t) − S(t−t0)u(t0) − λ∫_{t0}^t S(t−t′)∂_x(|u|²u)(t′)dt′‖_{H^{−1/2−ε}},
// quadrature over the stored states.
inline double duhamel_residual(const Trajectory& traj, int k0, int k1,
                               double eps = 0.01) {
  if (k0 < 0 || k1 >= traj.size() || k0 > k1)
    throw std::invalid_argument("duhamel_residual: bad indices");
  const auto& u1 = traj.fields[k1];
  SpectralField res = u1;
  res -= free_flow(traj.fields[k0], u1.t - traj.fields[k0].t);
  if (k1 > k0) {
    int n = k1 - k0 + 1;
    auto w = simpson_weights(n, traj.dt);
    SpectralField acc(traj.lat, u1.t);
    for (int k = k0; k <= k1; ++k) {
      const auto& uk = traj.fields[k];
      // λ∫ S(t−t′) ∂_x(|u|²u) dt′ ; rhs_u_nonlinear already carries iλ∂_x
      SpectralField g = rhs_u_nonlinear(uk, traj.lambda);
      g.t = uk.t;
      g = free_flow(std::move(g), u1.t - uk.t);
      g *= cplx(w[k - k0]);
      acc += g;
    }
    res -= acc;
  }
  return sobolev(res, -0.5 - eps);
}

struct NormProfile {
  std::vector<int> N;
  std::vector<double> norm;  // ‖P_N u‖_{L⁴_T L^∞}
  double alpha = 0.0;        // fitted decay exponent in N^{−α}
  bool fit_valid = false;
};

// Table of ‖P_N u‖_{L⁴_T L^∞} with a least-squares log-log fit over the upper
// dyadic half of the lattice.
inline NormProfile strichartz_profile(const Trajectory& traj) {
  NormProfile prof;
  auto scales = dyadic_scales(traj.lat.xi_max);
  for (int N : scales) {
    std::vector<double> linf;
    linf.reserve(traj.fields.size());
    for (const auto& f : traj.fields)
      linf.push_back(linf_norm(lp_project(f, N)));
    prof.N.push_back(N);
    prof.norm.push_back(time_lr(linf, traj.dt, 4.0));
  }
  // fit on N ≥ Ntop/8 (upper dyadic half in log scale), nonzero rows only
  int ntop = scales.back();
  std::vector<double> lx, ly;
  for (size_t i = 0; i < prof.N.size(); ++i) {
    if (prof.N[i] * 8 >= ntop && prof.norm[i] > 0) {
      lx.push_back(std::log2(double(prof.N[i])));
      ly.push_back(std::log2(prof.norm[i]));
    }
  }
  if (lx.size() >= 3) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = static_cast<int>(lx.size());
    for (int i = 0; i < n; ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    prof.alpha = -slope;
    prof.fit_valid = true;
  }
  return prof;
}

// ---------------------------------------------------------------------------
// Initial-data library (seeds recorded by callers in reports).
// ---------------------------------------------------------------------------
inline SpectralField data_plane_wave(const FrequencyLattice& lat, int xi0,
                                     double amp = 1.0) {
  SpectralField f(lat);
  f.at(xi0) = amp * SQRT_2PI;  // u(x) = amp·e^{iξ₀x}
  return f;
}

inline SpectralField data_gaussian(const FrequencyLattice& lat,
                                   double width = 0.15, double amp = 1.0) {
  SpectralField f(lat);
  for (int xi = -lat.xi_max; xi <= lat.xi_max; ++xi)
    f.at(xi) = amp * std::exp(-width * xi * xi);
  return f;
}

inline SpectralField data_random_h12(const FrequencyLattice& lat, uint64_t seed,
                                     double target = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  SpectralField f(lat);
  for (int xi = -lat.xi_max; xi <= lat.xi_max; ++xi)
    f.at(xi) = std::exp(-0.02 * xi * xi) * cplx(g(rng), g(rng));
  double n = sobolev(f, 0.5);
  if (n > 0) f *= cplx(target / n);
  return f;
}

}  // namespace nfr

#endif  // NFR_DYNAMICS_HPP_
