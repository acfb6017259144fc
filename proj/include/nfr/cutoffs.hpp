// cutoffs.hpp
// Smooth dyadic cutoffs: η, ψ_N, ψ̃_N, Littlewood–Paley projections.
//
// η is built from the classical e^{−1/x} smoothstep and satisfies exactly
// 1_{[−5/4,5/4]} ≤ η ≤ 1_{[−8/5,8/5]}.  For N ≥ 2, ψ_N(ξ) = η(ξ/N) − η(2ξ/N)
// with supp ψ_N = {5N/8 < |ξ| < 8N/5} ⊂ I_N = {N/2 ≤ |ξ| ≤ 2N}; ψ_1 = η.
// Telescoping: Σ_{N=1}^{Ntop} ψ_N(ξ) = η(ξ/Ntop) = 1 whenever |ξ| ≤ 5·Ntop/4.

#ifndef NFR_CUTOFFS_HPP_
#define NFR_CUTOFFS_HPP_

#include <cmath>
#include <vector>

#include "nfr/core.hpp"

namespace nfr {

inline double bump_f(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// C^∞ step: 0 for y ≤ 0, 1 for y ≥ 1, strictly increasing between.
inline double smoothstep(double y) {
  double a = bump_f(y), b = bump_f(1.0 - y);
  return a / (a + b);
}

inline double eta(double x) {
  double ax = std::fabs(x);
  if (ax <= 1.25) return 1.0;
  if (ax >= 1.6) return 0.0;
  return 1.0 - smoothstep((ax - 1.25) / 0.35);
}

inline double psi(int N, double xi) {
  if (N == 1) return eta(xi);
  return eta(xi / N) - eta(2.0 * xi / N);
}

// Fattened cutoff, ≡ 1 on supp ψ_N; self-similar: ψ̃_N(ξ) = ψ̃_2(ξ/(N/2)).
inline double psi_tilde(int N, double xi) {
  if (N == 1) return eta(xi / 2.0);
  return eta(xi / (2.0 * N)) - eta(4.0 * xi / N);
}

// I_N membership (integer annuli): I_1 = {|ξ| ≤ 2}, I_N = {N/2 ≤ |ξ| ≤ 2N}.
inline bool in_I(int N, int xi) {
  int a = std::abs(xi);
  if (N == 1) return a <= 2;
  return 2 * a >= N && a <= 2 * N;
}

// Admissible dyadic scales for a lattice of half-width X: 1,2,...,Ntop with
// Ntop the smallest power of two ≥ X (so the partition of unity is exact on
// the lattice).
inline std::vector<int> dyadic_scales(int xi_max) {
  std::vector<int> out;
  int ntop = next_pow2(xi_max);
  for (int N = 1; N <= ntop; N *= 2) out.push_back(N);
  return out;
}

inline int ilog2(int n) {
  int l = 0;
  while ((1 << (l + 1)) <= n) ++l;
  return l;
}

// Per-frequency list of dyadic scales with ψ_N(ξ) ≠ 0 (at most two entries).
struct DyadicHit {
  int N;
  double w;  // ψ_N(ξ)
};

class CutoffTable {
 public:
  CutoffTable() = default;
  // half_range: largest |ξ| that will ever be queried (internal tree nodes can
  // exceed the lattice half-width).
  CutoffTable(int xi_max, int half_range = 0)
      : xi_max_(xi_max),
        range_(half_range > 0 ? half_range : xi_max),
        scales_(dyadic_scales(std::max(xi_max, (4 * range_ + 4) / 5))) {
    hits_.resize(2 * range_ + 1);
    for (int xi = -range_; xi <= range_; ++xi) {
      for (int N : scales_) {
        double w = psi(N, xi);
        if (w != 0.0) hits_[xi + range_].push_back({N, w});
      }
    }
  }

  const std::vector<int>& scales() const { return scales_; }
  int range() const { return range_; }
  const std::vector<DyadicHit>& hits(int xi) const {
    static const std::vector<DyadicHit> empty;
    if (xi < -range_ || xi > range_) return empty;
    return hits_[xi + range_];
  }

 private:
  int xi_max_ = 0, range_ = 0;
  std::vector<int> scales_;
  std::vector<std::vector<DyadicHit>> hits_;
};

// P_N u and P_{≤N} u.
inline SpectralField lp_project(const SpectralField& u, int N) {
  SpectralField out = u;
  for (int xi = -u.X(); xi <= u.X(); ++xi) out.at(xi) *= psi(N, xi);
  return out;
}

inline SpectralField lp_project_leq(const SpectralField& u, int N) {
  // Σ_{N'≤N} ψ_{N'}(ξ) = η(ξ/N) by telescoping.
  SpectralField out = u;
  for (int xi = -u.X(); xi <= u.X(); ++xi) out.at(xi) *= eta(double(xi) / N);
  return out;
}

}  // namespace nfr

#endif  // NFR_CUTOFFS_HPP_
