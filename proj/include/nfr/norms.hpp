// norms.hpp
// Sobolev / Ĥ^s / Besov / Lebesgue norms and the trajectory norms
// L^∞_T H^{1/2}, L^4_T B^{0+}_{∞,1}, S_T.  Time integrals use composite
// Simpson (3/8 tail when the interval count is odd).

#ifndef NFR_NORMS_HPP_
#define NFR_NORMS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "nfr/core.hpp"
#include "nfr/cutoffs.hpp"

namespace nfr {

inline double jap(double xi) { return std::sqrt(1.0 + xi * xi); }

// ‖⟨ξ⟩^s f̂‖_{ℓ²}. Same formula serves H^s (on û) and Ĥ^s (on ω).
inline double sobolev(const SpectralField& f, double s) {
  double acc = 0;
  for (int xi = -f.X(); xi <= f.X(); ++xi)
    acc += std::pow(jap(xi), 2.0 * s) * std::norm(f.at(xi));
  return std::sqrt(acc);
}

// Physical L^p via the grid quadrature (exact for p=2 on band-limited data).
inline double lp_norm(const PhysicalField& u, double p) {
  const double dx = TWO_PI / u.lat.grid_points;
  if (!std::isfinite(p)) {
    double m = 0;
    for (const auto& v : u.s) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0;
  for (const auto& v : u.s) acc += std::pow(std::abs(v), p);
  return std::pow(dx * acc, 1.0 / p);
}

inline double linf_norm(const SpectralField& f) {
  return lp_norm(fft_inverse(f), std::numeric_limits<double>::infinity());
}

// B^s_{p,q}: ‖ N^s ‖P_N u‖_{L^p_x} ‖_{ℓ^q_N} over the admissible dyadic range.
inline double besov(const SpectralField& f, double s, double p, double q) {
  double acc = 0, m = 0;
  for (int N : dyadic_scales(f.X())) {
    double piece;
    if (p == 2.0) {
      piece = lp_project(f, N).l2();
    } else {
      piece = lp_norm(fft_inverse(lp_project(f, N)), p);
    }
    double term = std::pow(double(N), s) * piece;
    if (!std::isfinite(q))
      m = std::max(m, term);
    else
      acc += std::pow(term, q);
  }
  return std::isfinite(q) ? std::pow(acc, 1.0 / q) : m;
}

// Composite Simpson weights for uniformly spaced samples.
inline std::vector<double> simpson_weights(int n_samples, double h) {
  if (n_samples < 2) return std::vector<double>(std::max(n_samples, 0), 0.0);
  std::vector<double> w(n_samples, 0.0);
  int n_int = n_samples - 1;
  int simpson_end = (n_int % 2 == 0) ? n_int : n_int - 3;
  for (int i = 0; i + 2 <= simpson_end; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (simpson_end < n_int) {
    if (simpson_end < 0) {  // 1 or 3 intervals total
      if (n_int == 1) {
        w[0] += h / 2.0;
        w[1] += h / 2.0;
        return w;
      }
      simpson_end = 0;
    }
    // 3/8 rule on the last three intervals
    int i = simpson_end;
    w[i] += 3.0 * h / 8.0;
    w[i + 1] += 9.0 * h / 8.0;
    w[i + 2] += 9.0 * h / 8.0;
    w[i + 3] += 3.0 * h / 8.0;
  }
  return w;
}

// ‖g‖_{L^r_T} from samples g(t_k), t_k uniform with spacing h: (∫|g|^r)^{1/r}.
inline double time_lr(const std::vector<double>& g, double h, double r) {
  if (!std::isfinite(r)) {
    double m = 0;
    for (double v : g) m = std::max(m, v);
    return m;
  }
  auto w = simpson_weights(static_cast<int>(g.size()), h);
  double acc = 0;
  for (size_t k = 0; k < g.size(); ++k) acc += w[k] * std::pow(g[k], r);
  return std::pow(std::max(acc, 0.0), 1.0 / r);
}

struct TrajNormConfig {
  double eps = 0.01;  // the global "0+"
};

// S_T = L^∞_T H^{1/2} + L^4_T B^{ε}_{∞,1} on a uniformly sampled trajectory.
inline double st_norm(const std::vector<SpectralField>& fields, double h,
                      const TrajNormConfig& cfg = {}) {
  std::vector<double> hs, bs;
  hs.reserve(fields.size());
  bs.reserve(fields.size());
  for (const auto& f : fields) {
    hs.push_back(sobolev(f, 0.5));
    bs.push_back(besov(f, cfg.eps, std::numeric_limits<double>::infinity(), 1.0));
  }
  return time_lr(hs, h, std::numeric_limits<double>::infinity()) +
         time_lr(bs, h, 4.0);
}

}  // namespace nfr

#endif  // NFR_NORMS_HPP_
