// multiplier.hpp
// Coifman–Meyer Fourier-series multiplier engine and the lattice counting
// lemma.
//
// A multiplier b localized to dyadic boxes I_{N_1}×…×I_{N_d} is expanded in a
// Fourier series of the rescaled periodization
//   f(η) = b(N_1η_1, …, N_dη_d) ∏_j χ_j(N_jη_j)   on [−π,π]^d,
// giving the modulated-translate representation
//   b(ξ⃗) = Σ_k f̂(k) e^{i Σ_j k_jξ_j/N_j}   on supp ∏ψ_{N_j},
// which turns the trilinear multiplier operator into an ℓ¹-weighted sum of
// pointwise products of translated band-limited fields.  χ_j is a C²
// localization equal to 1 on supp ψ_{N_j} and supported in the ψ̃_{N_j} box
// {|ξ| < 3.2N_j} (quintic-smoothstep transitions, so the certified truncation
// error decays at the C² rate, at least quadratically in K_max); sign-split
// or singular axes get the annular version vanishing for |ξ| ≤ 0.3125N_j.
//
// Two expansion modes:
//  * cm_expand — the continuum periodization above, sampled on a uniform
//    grid and transformed by FFT; the certificate records the retained ℓ¹
//    mass, a tail bound (twice the dropped ℓ¹ mass), and the achieved
//    sup-norm truncation error.
//  * cm_expand_lattice — the multiplier table on integer frequencies
//    ξ⃗ ∈ [−K,K]^d with period P = 2K+1 per axis; the discrete Fourier
//    representation is then exact (up to roundoff) at every lattice point,
//    so certificate evaluation agrees with direct summation to ~1e−13.
//    This is the fast path used on a frequency lattice of half-width ≤ K.
//
// Operator convention (plain lattice sums, no 2π factors):
//   T[w1,w2,w3](ξ) = Σ_{ξ=ξ1+ξ2+ξ3} b(ξ1,ξ2,ξ3)
//                      (P_1ŵ1)(ξ1)(P_2ŵ2)(ξ2)(P_3 F[w̄3])(ξ3),
// with F[w̄](ξ) = conj(ŵ(−ξ)) and P_j = ψ_{N_j} × sign selector.
//
// The CM3 path handles N_1 ≁ N_2 ∼ N_3 with a cancellation in ξ_23: the
// two-variable expansion of ξ_3/ξ_13 composes with the K-annulus factor
// 1_{K≤|ξ'|<2K}/ξ' applied to the (ξ_2,ξ_3)-pairing.
//
// The counting lemma is evaluated as an exact truncated lattice sum
//   Σ_{|ξ1|,|ξ2|≤L, |ξ−ξ1|≥1, |ξ−ξ2|≥1} ⟨φ* + 2(ξ−ξ1)(ξ−ξ2)⟩^{−1−ε},
// whose growth in ⟨φ*⟩ is sub-polynomial by the divisor bound
//   #{(ξ1,ξ2) : 2(ξ−ξ1)(ξ−ξ2) = −φ*+ν} ≲ |φ*|^{0+}.

#ifndef NFR_MULTIPLIER_HPP_
#define NFR_MULTIPLIER_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nfr/core.hpp"
#include "nfr/cutoffs.hpp"
#include "nfr/norms.hpp"

namespace nfr {

// ---------------------------------------------------------------------------
// Localized multipliers and expansion certificates.
// ---------------------------------------------------------------------------
struct LocalizedMultiplier {
  std::string id;
  int dim = 3;  // 2 (CM3 inner), 3 (CM1), 4 (CM2)
  // b(ξ_1..ξ_dim); for dim 4 the first argument is the output frequency ξ
  std::function<cplx(const std::array<double, 4>&)> b;
  std::array<int, 4> N{1, 1, 1, 1};    // dyadic box scales
  std::array<int, 4> sgn{0, 0, 0, 0};  // ±1 selects a signed half-annulus
  // annular: force the cutoff hole at |ξ| ≤ 0.3125N even without a sign
  // selector (needed when a singular set passes near the axis origin)
  std::array<char, 4> annular{0, 0, 0, 0};
  // use_cutoff: include the χ localization factor on this axis; disable for
  // globally smooth multipliers (e.g. constants) to get sharp certificates
  std::array<char, 4> use_cutoff{1, 1, 1, 1};
  double B = 1.0;  // claimed lemma bound
  // axis pairs (a,b) where b blows up on ξ_a + ξ_b = 0 (e.g. ξ13, ξ23)
  std::vector<std::pair<int, int>> singular_pairs;
};

struct ExpansionCertificate {
  std::string id;
  int dim = 3;
  int K_max = 16;
  int grid = 0;
  bool lattice = false;
  std::array<int, 4> N{1, 1, 1, 1};
  std::array<int, 4> sgn{0, 0, 0, 0};
  std::array<double, 4> scale{1, 1, 1, 1};  // s_j: translates are k_j/s_j
  std::vector<cplx> coef;                   // (2K+1)^dim, row-major
  double l1 = 0.0;            // ℓ¹ of retained coefficients
  double tail = 0.0;          // certified bound on the dropped ℓ¹ mass
  double achieved_err = 0.0;  // measured sup-norm truncation error
  double B = 1.0;
  double l1_over_B = 0.0;

  const cplx& at(const std::array<int, 4>& k) const {
    int W = 2 * K_max + 1;
    size_t idx = 0;
    for (int j = 0; j < dim; ++j) idx = idx * W + (k[j] + K_max);
    return coef[idx];
  }
};

// C² step: 0 for y ≤ 0, 1 for y ≥ 1 (quintic smoothstep).
inline double qstep(double y) {
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return 1.0;
  return y * y * y * (10.0 + y * (-15.0 + 6.0 * y));
}

// Expansion cutoff χ: ≡1 on supp ψ_N, supported in the ψ̃_N box |ξ| < 3.2N;
// annular axes vanish for |ξ| ≤ 0.3125N and rise to 1 by 0.625N.
inline double cm_chi(int N, int sgn, bool annular, double xi) {
  if (sgn != 0 && xi * sgn <= 0.0) return 0.0;
  // outer transition ends at 3.1N < πN so the s = N periodization is seamless
  double a = std::fabs(xi) / N;
  if (a >= 3.1) return 0.0;
  double v = a <= 1.6 ? 1.0 : qstep((3.1 - a) / 1.5);
  if (annular) {
    if (a <= 0.3125) return 0.0;
    v *= qstep((a - 0.3125) / 0.3125);
  }
  return v;
}

namespace cm_detail {

inline std::array<char, 4> resolved_annular(const LocalizedMultiplier& m) {
  std::array<char, 4> an{0, 0, 0, 0};
  for (int j = 0; j < m.dim; ++j) an[j] = (m.sgn[j] != 0 || m.annular[j]) ? 1 : 0;
  return an;
}

}  // namespace cm_detail

// supp χ magnitude interval: (0.3125N, 3.2N) annular, [0, 3.2N) otherwise.
inline double box_lo(int N, bool annular) { return annular ? 0.3125 * N : 0.0; }
inline double box_hi(int N) { return 3.2 * N; }

// Minimal |ξ_a + ξ_b| over the (signed) cutoff boxes of axes a and b.
inline double singular_distance(const LocalizedMultiplier& m, int a, int b) {
  auto an = cm_detail::resolved_annular(m);
  double la = box_lo(m.N[a], an[a]), ha = box_hi(m.N[a]);
  double lb = box_lo(m.N[b], an[b]), hb = box_hi(m.N[b]);
  bool opposite_allowed =
      m.sgn[a] == 0 || m.sgn[b] == 0 || m.sgn[a] != m.sgn[b];
  bool same_allowed = m.sgn[a] == 0 || m.sgn[b] == 0 || m.sgn[a] == m.sgn[b];
  double d = 1e300;
  if (same_allowed) d = std::min(d, la + lb);
  if (opposite_allowed)
    d = std::min(d, std::max(0.0, std::max(la, lb) - std::min(ha, hb)));
  return d;
}

namespace cm_detail {

inline void validate(const LocalizedMultiplier& m) {
  if (m.dim < 2 || m.dim > 4)
    throw std::invalid_argument("cm_expand: dim must be 2..4");
  auto an = resolved_annular(m);
  for (int j = 0; j < m.dim; ++j) {
    if (m.N[j] == 1 && m.sgn[j] != 0)
      throw std::invalid_argument("cm_expand: N=1 box cannot be sign-split");
    if (m.N[j] == 1 && an[j])
      throw std::invalid_argument("cm_expand: N=1 box cannot be annular");
  }
  // singularity margin: the box must stay N_min/8 away from every declared
  // singular set
  int nmin = m.N[0];
  for (int j = 1; j < m.dim; ++j) nmin = std::min(nmin, m.N[j]);
  for (auto [a, b] : m.singular_pairs) {
    double d = singular_distance(m, a, b);
    if (d <= nmin / 8.0) {
      std::ostringstream os;
      os << "cm_expand: singular set |xi_" << a << "+xi_" << b
         << "|=0 within margin (distance " << d << ", margin " << nmin / 8.0
         << ")";
      throw std::invalid_argument(os.str());
    }
  }
}

// in-place d-dimensional DFT, one 1-D pass per axis
inline void dft_nd(std::vector<cplx>& data, int d, int n, int sign) {
  auto& eng = FftEngine::instance();
  std::vector<cplx> line(n);
  size_t total = data.size();
  for (int axis = 0; axis < d; ++axis) {
    size_t stride = 1;
    for (int j = axis + 1; j < d; ++j) stride *= n;
    size_t block = stride * n;
    for (size_t base = 0; base < total; base += block)
      for (size_t off = 0; off < stride; ++off) {
        for (int i = 0; i < n; ++i) line[i] = data[base + off + i * stride];
        eng.dft(line, sign);
        for (int i = 0; i < n; ++i) data[base + off + i * stride] = line[i];
      }
  }
}

}  // namespace cm_detail

// ---------------------------------------------------------------------------
// cm_expand: continuum periodization, sampled and transformed by FFT.
// ---------------------------------------------------------------------------
inline ExpansionCertificate cm_expand(const LocalizedMultiplier& m,
                                      int K_max = 16, int grid = 0) {
  cm_detail::validate(m);
  const int d = m.dim;
  int n = grid > 0 ? grid : (d == 2 ? 256 : d == 3 ? 128 : 48);
  if (2 * K_max + 1 > n)
    throw std::invalid_argument("cm_expand: grid too small for K_max");
  auto an = cm_detail::resolved_annular(m);

  ExpansionCertificate cert;
  cert.id = m.id;
  cert.dim = d;
  cert.K_max = K_max;
  cert.grid = n;
  cert.N = m.N;
  cert.sgn = m.sgn;
  cert.B = m.B;
  for (int j = 0; j < d; ++j) cert.scale[j] = (double)m.N[j];

  size_t total = 1;
  for (int j = 0; j < d; ++j) total *= n;
  std::vector<cplx> data(total);
  std::array<double, 4> xi{};
  std::array<int, 4> idx{};
  for (size_t lin = 0; lin < total; ++lin) {
    size_t r = lin;
    for (int j = d - 1; j >= 0; --j) {
      idx[j] = (int)(r % n);
      r /= n;
    }
    double chi = 1.0;
    for (int j = 0; j < d && chi != 0.0; ++j) {
      double eta_j = -PI + TWO_PI * idx[j] / n;
      xi[j] = cert.scale[j] * eta_j;
      if (m.use_cutoff[j]) chi *= cm_chi(m.N[j], m.sgn[j], an[j], xi[j]);
    }
    data[lin] = chi == 0.0 ? cplx(0.0) : chi * m.b(xi);
  }
  cm_detail::dft_nd(data, d, n, -1);
  // grid DFT index i ↦ frequency k = i (i ≤ n/2) or i−n; the −π grid origin
  // contributes the phase (−1)^{Σ k_j}
  const double norm = 1.0 / (double)total;
  int W = 2 * K_max + 1;
  size_t ncoef = 1;
  for (int j = 0; j < d; ++j) ncoef *= W;
  cert.coef.assign(ncoef, cplx(0.0));
  double l1 = 0.0, out_l1 = 0.0;
  for (size_t lin = 0; lin < total; ++lin) {
    size_t r = lin;
    int ksum = 0;
    bool kept = true;
    size_t cidx = 0;
    for (int j = d - 1; j >= 0; --j) {
      idx[j] = (int)(r % n);
      r /= n;
    }
    for (int j = 0; j < d; ++j) {
      int k = idx[j] <= n / 2 ? idx[j] : idx[j] - n;
      ksum += k;
      if (k < -K_max || k > K_max) kept = false;
      if (kept) cidx = cidx * W + (k + K_max);
    }
    cplx v = norm * data[lin] * ((ksum & 1) ? -1.0 : 1.0);
    if (kept) {
      cert.coef[cidx] = v;
      l1 += std::abs(v);
      data[lin] = cplx(0.0);  // keep only the dropped part
    } else {
      out_l1 += std::abs(v);
    }
  }
  cert.l1 = l1;
  cert.tail = 2.0 * out_l1 + 1e-12 * (1.0 + l1);  // ×2 aliasing headroom
  // achieved sup-norm truncation error from the dropped part
  cm_detail::dft_nd(data, d, n, +1);
  double sup = 0.0;
  for (auto& v : data) sup = std::max(sup, std::abs(v));
  cert.achieved_err = sup * norm;
  cert.l1_over_B = cert.B > 0 ? l1 / cert.B : 0.0;
  return cert;
}

// ---------------------------------------------------------------------------
// cm_expand_lattice: exact DFT of the multiplier table on the integer box
// [−K,K]^d with per-axis period 2K+1.
// ---------------------------------------------------------------------------
inline ExpansionCertificate cm_expand_lattice(const LocalizedMultiplier& m,
                                              int K_max) {
  cm_detail::validate(m);
  const int d = m.dim;
  const int P = 2 * K_max + 1;
  size_t total = 1;
  for (int j = 0; j < d; ++j) total *= P;
  if (total > (size_t)1 << 26)
    throw std::invalid_argument("cm_expand_lattice: table too large");
  auto an = cm_detail::resolved_annular(m);

  ExpansionCertificate cert;
  cert.id = m.id;
  cert.dim = d;
  cert.K_max = K_max;
  cert.grid = P;
  cert.lattice = true;
  cert.N = m.N;
  cert.sgn = m.sgn;
  cert.B = m.B;
  for (int j = 0; j < d; ++j) cert.scale[j] = P / TWO_PI;

  std::vector<cplx> data(total);
  std::array<double, 4> xi{};
  std::array<int, 4> idx{};
  for (size_t lin = 0; lin < total; ++lin) {
    size_t r = lin;
    for (int j = d - 1; j >= 0; --j) {
      idx[j] = (int)(r % P);
      r /= P;
    }
    double chi = 1.0;
    for (int j = 0; j < d && chi != 0.0; ++j) {
      xi[j] = idx[j] <= K_max ? idx[j] : idx[j] - P;  // integer frequency
      if (m.use_cutoff[j]) chi *= cm_chi(m.N[j], m.sgn[j], an[j], xi[j]);
    }
    data[lin] = chi == 0.0 ? cplx(0.0) : chi * m.b(xi);
  }
  cm_detail::dft_nd(data, d, P, -1);
  const double norm = 1.0 / (double)total;
  cert.coef.assign(total, cplx(0.0));
  double l1 = 0.0;
  for (size_t lin = 0; lin < total; ++lin) {
    size_t r = lin;
    size_t cidx = 0;
    for (int j = d - 1; j >= 0; --j) {
      idx[j] = (int)(r % P);
      r /= P;
    }
    for (int j = 0; j < d; ++j) {
      int k = idx[j] <= K_max ? idx[j] : idx[j] - P;
      cidx = cidx * P + (k + K_max);
    }
    cplx v = norm * data[lin];
    cert.coef[cidx] = v;
    l1 += std::abs(v);
  }
  cert.l1 = l1;
  cert.tail = 1e-13 * (1.0 + l1);  // roundoff only: representation is exact
  cert.achieved_err = 0.0;
  cert.l1_over_B = cert.B > 0 ? l1 / cert.B : 0.0;
  return cert;
}

// Cache keyed by (multiplier id, box shape, K_max, mode); the id must
// determine b.
inline const ExpansionCertificate& get_certificate(const LocalizedMultiplier& m,
                                                   int K_max = 16,
                                                   bool lattice = false) {
  static std::map<std::string, ExpansionCertificate> cache;
  std::ostringstream key;
  key << m.id << "|d" << m.dim << "|K" << K_max << "|L" << (lattice ? 1 : 0);
  for (int j = 0; j < m.dim; ++j)
    key << "|" << m.N[j] << "s" << m.sgn[j] << "a" << (int)m.annular[j] << "c"
        << (int)m.use_cutoff[j];
  auto it = cache.find(key.str());
  if (it == cache.end())
    it = cache
             .emplace(key.str(),
                      lattice ? cm_expand_lattice(m, K_max) : cm_expand(m, K_max))
             .first;
  return it->second;
}

// Standard multipliers.
inline LocalizedMultiplier mult_constant(std::array<int, 3> N,
                                         std::array<int, 3> sgn = {0, 0, 0}) {
  LocalizedMultiplier m;
  m.id = "one";
  m.dim = 3;
  m.b = [](const std::array<double, 4>&) { return cplx(1.0); };
  m.N = {N[0], N[1], N[2], 1};
  m.sgn = {sgn[0], sgn[1], sgn[2], 0};
  // a constant needs no localization: the certificate is a single coefficient
  m.use_cutoff = {0, 0, 0, 0};
  m.B = 1.0;
  return m;
}

inline LocalizedMultiplier mult_xi3_over_xi13xi23(std::array<int, 3> N,
                                                  std::array<int, 3> sgn) {
  LocalizedMultiplier m;
  m.id = "xi3/(xi13 xi23)";
  m.dim = 3;
  m.b = [](const std::array<double, 4>& x) {
    return cplx(x[2] / ((x[0] + x[2]) * (x[1] + x[2])));
  };
  m.N = {N[0], N[1], N[2], 1};
  m.sgn = {sgn[0], sgn[1], sgn[2], 0};
  m.B = (double)N[2] / ((double)N[0] * (double)N[1]);
  m.singular_pairs = {{0, 2}, {1, 2}};
  return m;
}

// ---------------------------------------------------------------------------
// Field projection P_j = ψ_{N_j} × sign selector, with optional conjugate
// reflection (slot 3 enters as F[w̄](ξ) = conj(ŵ(−ξ))).
// ---------------------------------------------------------------------------
inline SpectralField cm_project(const SpectralField& w, int N, int sgn,
                                bool conj_reflect) {
  SpectralField out(w.lat, w.t);
  for (int xi = -w.X(); xi <= w.X(); ++xi) {
    if (sgn != 0 && xi * sgn <= 0) continue;
    cplx v = conj_reflect ? std::conj(w.at(-xi)) : w.at(xi);
    out.at(xi) = psi(N, xi) * v;
  }
  return out;
}

namespace cm_detail {

// raw (unit-constant) physical samples: p[m] = Σ_ξ f(ξ) e^{iξ x_m}
inline std::vector<cplx> raw_physical(const SpectralField& f, int Ng,
                                      double mod_k = 0.0, double mod_s = 1.0) {
  std::vector<cplx> buf(Ng, cplx(0.0));
  for (int xi = -f.X(); xi <= f.X(); ++xi) {
    cplx v = f.at(xi);
    if (v == cplx(0.0)) continue;
    if (mod_k != 0.0) v *= std::polar(1.0, mod_k * xi / mod_s);
    buf[(xi % Ng + Ng) % Ng] = v;
  }
  FftEngine::instance().dft(buf, +1);
  return buf;
}

}  // namespace cm_detail

// ---------------------------------------------------------------------------
// cm_apply: Σ_k f̂(k) × pointwise product of modulated translates, FFT-based.
// ---------------------------------------------------------------------------
inline SpectralField cm_apply(const ExpansionCertificate& cert,
                              const SpectralField& w1, const SpectralField& w2,
                              const SpectralField& w3) {
  if (cert.dim != 3)
    throw std::invalid_argument("cm_apply: dim-3 certificate required");
  if (!(w1.lat == w2.lat) || !(w1.lat == w3.lat))
    throw std::invalid_argument("cm_apply: lattice mismatch");
  if (cert.lattice && w1.X() > cert.K_max)
    throw std::invalid_argument(
        "cm_apply: lattice certificate period too small for this lattice");
  const int Ng = w1.lat.grid_points;
  const int K = cert.K_max, W = 2 * K + 1;
  SpectralField p1 = cm_project(w1, cert.N[0], cert.sgn[0], false);
  SpectralField p2 = cm_project(w2, cert.N[1], cert.sgn[1], false);
  SpectralField p3 = cm_project(w3, cert.N[2], cert.sgn[2], true);
  std::vector<std::vector<cplx>> A(W), B(W), C(W);
  for (int k = -K; k <= K; ++k) {
    A[k + K] = cm_detail::raw_physical(p1, Ng, k, cert.scale[0]);
    B[k + K] = cm_detail::raw_physical(p2, Ng, k, cert.scale[1]);
    C[k + K] = cm_detail::raw_physical(p3, Ng, k, cert.scale[2]);
  }
  std::vector<cplx> acc(Ng, cplx(0.0)), inner(Ng);
  for (int k1 = 0; k1 < W; ++k1) {
    std::vector<cplx> e(Ng, cplx(0.0));
    bool any = false;
    for (int k2 = 0; k2 < W; ++k2) {
      std::fill(inner.begin(), inner.end(), cplx(0.0));
      const cplx* base = &cert.coef[((size_t)k1 * W + k2) * W];
      bool hit = false;
      for (int k3 = 0; k3 < W; ++k3) {
        cplx f = base[k3];
        if (f == cplx(0.0)) continue;
        hit = true;
        const auto& c3 = C[k3];
        for (int mm = 0; mm < Ng; ++mm) inner[mm] += f * c3[mm];
      }
      if (!hit) continue;
      any = true;
      const auto& b2 = B[k2];
      for (int mm = 0; mm < Ng; ++mm) e[mm] += b2[mm] * inner[mm];
    }
    if (!any) continue;
    const auto& a1 = A[k1];
    for (int mm = 0; mm < Ng; ++mm) acc[mm] += a1[mm] * e[mm];
  }
  FftEngine::instance().dft(acc, -1);
  SpectralField out(w1.lat, w1.t);
  for (int xi = -w1.X(); xi <= w1.X(); ++xi)
    out.at(xi) = acc[(xi % Ng + Ng) % Ng] / (double)Ng;
  return out;
}

// ---------------------------------------------------------------------------
// cm3_apply: the K-annulus-restricted ξ3/(ξ13ξ23) operator for N1 ≁ N2 ∼ N3,
// via the two-variable expansion of ξ3/ξ13 composed with the 1/ξ' annulus
// factor on the (ξ2,ξ3)-pairing.  Requires the ξ1- and ξ3-boxes to be
// magnitude-separated so that ξ3/ξ13 is nonsingular on the joint box.
// ---------------------------------------------------------------------------
inline SpectralField cm3_apply(const SpectralField& w1, const SpectralField& w2,
                               const SpectralField& w3, int N1, int N2, int N3,
                               double K_annulus, int g = 3) {
  if (std::abs(ilog2(N2) - ilog2(N3)) > g ||
      std::abs(ilog2(N1) - ilog2(N2)) <= g)
    throw std::invalid_argument("cm3_apply: requires N1 !~ N2 ~ N3");
  LocalizedMultiplier m;
  m.id = "cm3:xi3/xi13";
  m.dim = 2;
  m.b = [](const std::array<double, 4>& x) {
    return cplx(x[1] / (x[0] + x[1]));
  };
  m.N = {N1, N3, 1, 1};
  m.annular = {N1 >= 2, N3 >= 2, 0, 0};
  m.B = (double)N3 / (double)std::max(N1, N3);
  m.singular_pairs = {{0, 1}};
  if (singular_distance(m, 0, 1) <= std::min(N1, N3) / 8.0)
    throw std::invalid_argument(
        "cm3_apply: xi1/xi3 boxes not magnitude-separated (xi13 can vanish)");
  const int X = w1.X();
  const ExpansionCertificate& cert = get_certificate(m, X, /*lattice=*/true);

  const int Ng = w1.lat.grid_points;
  const int K = cert.K_max, W = 2 * K + 1;
  SpectralField p1 = cm_project(w1, N1, 0, false);
  SpectralField p2 = cm_project(w2, N2, 0, false);
  SpectralField p3 = cm_project(w3, N3, 0, true);
  // G_{k3}(ξ') = Σ_{ξ2+ξ3=ξ'} p2(ξ2) e^{ik3ξ3/s3} p3(ξ3), |ξ'| ≤ 2X
  auto b2 = cm_detail::raw_physical(p2, Ng);
  const int Xp = 2 * X;
  std::vector<std::vector<cplx>> G(W, std::vector<cplx>(2 * Xp + 1));
  std::vector<cplx> prod(Ng);
  for (int k3 = 0; k3 < W; ++k3) {
    auto c3 = cm_detail::raw_physical(p3, Ng, k3 - K, cert.scale[1]);
    for (int mm = 0; mm < Ng; ++mm) prod[mm] = b2[mm] * c3[mm];
    FftEngine::instance().dft(prod, -1);
    for (int xp = -Xp; xp <= Xp; ++xp)
      G[k3][xp + Xp] = prod[(xp % Ng + Ng) % Ng] / (double)Ng;
  }
  // out(ξ) = Σ_{k1} Σ_{ξ'} e^{ik1(ξ−ξ')/s1} p1(ξ−ξ') ann(ξ') M_{k1}(ξ')
  SpectralField out(w1.lat, w1.t);
  std::vector<cplx> Mk(2 * Xp + 1);
  for (int k1 = 0; k1 < W; ++k1) {
    std::fill(Mk.begin(), Mk.end(), cplx(0.0));
    bool any = false;
    for (int k3 = 0; k3 < W; ++k3) {
      cplx f = cert.coef[(size_t)k1 * W + k3];
      if (f == cplx(0.0)) continue;
      any = true;
      for (int i = 0; i <= 2 * Xp; ++i) Mk[i] += f * G[k3][i];
    }
    if (!any) continue;
    for (int xp = -Xp; xp <= Xp; ++xp) {
      double axp = std::abs((double)xp);
      if (axp < K_annulus || axp >= 2.0 * K_annulus) continue;
      cplx mv = Mk[xp + Xp] / (double)xp;
      if (mv == cplx(0.0)) continue;
      for (int xi = -X; xi <= X; ++xi) {
        int x1 = xi - xp;
        if (x1 < -X || x1 > X) continue;
        cplx v = p1.at(x1);
        if (v == cplx(0.0)) continue;
        out.at(xi) +=
            std::polar(1.0, (k1 - K) * (double)x1 / cert.scale[0]) * v * mv;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Counting lemma: exact truncated lattice sums and the divisor bound.
// ---------------------------------------------------------------------------
inline double counting_sum(long long xi, double phi_star, double eps, int L) {
  if (eps <= 0.0) throw std::invalid_argument("counting_sum: eps > 0 required");
  // fast paths for the scanned exponents: ⟨x⟩^{−3/2} and ⟨x⟩^{−2}
  int mode = eps == 0.5 ? 1 : eps == 1.0 ? 2 : 0;
  double acc = 0.0;
  for (long long x1 = -L; x1 <= L; ++x1) {
    long long f23 = xi - x1;  // ξ23 = ξ − ξ1
    if (f23 == 0) continue;
    for (long long x2 = -L; x2 <= L; ++x2) {
      long long f13 = xi - x2;
      if (f13 == 0) continue;
      double arg = phi_star + 2.0 * (double)f13 * (double)f23;
      double x = 1.0 + arg * arg;
      if (mode == 1) {
        double s = std::sqrt(x);
        acc += 1.0 / (s * std::sqrt(s));
      } else if (mode == 2) {
        acc += 1.0 / x;
      } else {
        acc += std::pow(x, -0.5 * (1.0 + eps));
      }
    }
  }
  return acc;
}

struct CountingRow {
  long long xi;
  double phi_star;
  double value;
};

inline std::vector<CountingRow> counting_scan(const std::vector<long long>& xis,
                                              const std::vector<double>& phis,
                                              double eps, int L) {
  std::vector<CountingRow> rows;
  for (long long xi : xis)
    for (double p : phis) rows.push_back({xi, p, counting_sum(xi, p, eps, L)});
  return rows;
}

// Growth exponent of sup_ξ value against ⟨φ*⟩: least-squares log-log slope
// over the upper half of the scanned log range, where the power-law ansatz
// is meaningful (the small-φ* region is dominated by the constant term).
inline double fitted_exponent(const std::vector<CountingRow>& rows) {
  std::map<double, double> sup;
  for (const auto& r : rows)
    sup[r.phi_star] = std::max(sup[r.phi_star], r.value);
  double xmin = 1e300, xmax = -1e300;
  for (auto [p, v] : sup) {
    double x = std::log(std::sqrt(1.0 + p * p));
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
  }
  double cut = 0.5 * (xmin + xmax) - 1e-9;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (auto [p, v] : sup) {
    double x = std::log(std::sqrt(1.0 + p * p));
    if (x < cut) continue;
    double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("fitted_exponent: need >= 2 points");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Ordered integer pairs (a,b) with 2ab = m; odd m → 0 by parity.  With
// `bound` set, both factors are restricted to |a|,|b| ≤ bound.
inline long long divisor_count(long long m, long long bound = 0) {
  if (m == 0) throw std::invalid_argument("divisor_count: m != 0 required");
  if (m % 2 != 0) return 0;
  long long n = std::llabs(m / 2);
  long long cnt = 0;
  for (long long d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    long long e = n / d;
    if (bound > 0 && (d > bound || e > bound)) continue;
    cnt += (d == e) ? 1 : 2;
  }
  // two sign patterns per positive pair: (+,+)/(−,−) if m/2 > 0, mixed if < 0
  return 2 * cnt;
}

// d(n) for all n ≤ nmax, by sieve (for growth scans).
inline std::vector<int> divisor_count_table(int nmax) {
  std::vector<int> d(nmax + 1, 0);
  for (int k = 1; k <= nmax; ++k)
    for (int m = k; m <= nmax; m += k) ++d[m];
  return d;
}

}  // namespace nfr

#endif  // NFR_MULTIPLIER_HPP_
