// nfr_finite.hpp
// First-generation NFR operator algebra on the interaction variable ω:
// the localized cubic sum N[ω], its resonant / boundary / remainder split at
// threshold M, and the diagonal + quintic term R[ω].
//
// Convention (matching the w-equation in interaction variables):
//   ∂_t ω = R[ω] + N[ω],
//   N[ω](ξ) = (−λ/2π) Σ_{ξ=ξ₁+ξ₂+ξ₃, |ξ₁₃|∧|ξ₂₃|≥1} e^{itφ} iξ₃ ω(ξ₁)ω(ξ₂)ω*(ξ₃),
//   ω*(ξ) = conj(ω(−ξ)), ξ₁₃ = ξ₁+ξ₃, ξ₂₃ = ξ₂+ξ₃, φ = 2ξ₁₃ξ₂₃,
//   R[ω](ξ) = −λ (iξ/2π)|ω(ξ)|²ω(ξ) + e^{itξ²}F[quintic terms](ξ).
// The dyadic decomposition N = Σ N_{N,N₁,N₂,N₃} uses ψ-cutoffs; every lattice
// point meets at most two scales per slot, so the block sum collapses to a
// pointwise weight with ≤ 16 dyadic combinations per frequency triple.

#ifndef NFR_NFR_FINITE_HPP_
#define NFR_NFR_FINITE_HPP_

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "nfr/classify.hpp"
#include "nfr/core.hpp"
#include "nfr/cutoffs.hpp"
#include "nfr/dynamics.hpp"

namespace nfr {

struct NfrParams {
  double lambda = -1.0;
  int g = 3;  // dyadic-gap comparator, shared with interaction-classify
};

using LabelMask = uint32_t;
inline constexpr LabelMask label_bit(CaseLabel l) {
  return 1u << static_cast<int>(l);
}
inline constexpr LabelMask mask_all() {
  return (1u << 11) - 1;  // the 11 non-Empty labels
}
inline constexpr LabelMask mask_only(CaseLabel l) { return label_bit(l); }
inline constexpr LabelMask mask_not(CaseLabel l) {
  return mask_all() & ~label_bit(l);
}

// ---------------------------------------------------------------------------
// Precomputed classification of all dyadic quadruples for a scale list.
// ---------------------------------------------------------------------------
class LabelTable {
 public:
  LabelTable() = default;
  LabelTable(const std::vector<int>& scales, int g) : ns_((int)scales.size()) {
    lab_.resize(ns_ * ns_ * ns_ * ns_, CaseLabel::Empty);
    swapped_.resize(lab_.size(), false);
    phi_.resize(lab_.size(), 0);
    for (int i = 0; i < ns_; ++i)
      for (int i1 = 0; i1 < ns_; ++i1)
        for (int i2 = 0; i2 < ns_; ++i2)
          for (int i3 = 0; i3 < ns_; ++i3) {
            DyadicQuadruple q{scales[i], scales[i1], scales[i2], scales[i3], g};
            auto res = classify_full(q);
            int idx = index(i, i1, i2, i3);
            lab_[idx] = res.label;
            swapped_[idx] = res.swapped;
            if (res.label != CaseLabel::Empty)
              phi_[idx] = resonance_size(res.label, q);
          }
  }
  int index(int i, int i1, int i2, int i3) const {
    return ((i * ns_ + i1) * ns_ + i2) * ns_ + i3;
  }
  CaseLabel label(int idx) const { return lab_[idx]; }
  bool swapped(int idx) const { return swapped_[idx]; }
  long long phi(int idx) const { return phi_[idx]; }

 private:
  int ns_ = 0;
  std::vector<CaseLabel> lab_;
  std::vector<bool> swapped_;
  std::vector<long long> phi_;
};

// Shared per-lattice context (cutoff hits with scale indices, label table).
class NfrContext {
 public:
  explicit NfrContext(int xi_max, int g = 3)
      : xi_max_(xi_max), g_(g), ct_(xi_max), lt_(ct_.scales(), g) {
    // map scale value -> index once
    const auto& sc = ct_.scales();
    for (size_t i = 0; i < sc.size(); ++i) scale_index_[sc[i]] = (int)i;
  }
  int xi_max() const { return xi_max_; }
  int g() const { return g_; }
  const CutoffTable& cutoffs() const { return ct_; }
  const LabelTable& labels() const { return lt_; }
  int scale_index(int N) const { return scale_index_.at(N); }

  // cached contexts, keyed (xi_max, g); single-threaded use
  static const NfrContext& get(int xi_max, int g = 3) {
    static std::map<std::pair<int, int>, NfrContext> cache;
    auto key = std::make_pair(xi_max, g);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, NfrContext(xi_max, g)).first;
    return it->second;
  }

 private:
  int xi_max_, g_;
  CutoffTable ct_;
  LabelTable lt_;
  std::map<int, int> scale_index_;
};

// ---------------------------------------------------------------------------
// Resonance decision per dyadic block at a lattice point.
// For case A the cutoff is pointwise (|φ| ≤ M); for B it is per K-annulus of
// the unreliable factor (N₁K ≤ M with K the dyadic size of |ξ₁₃| resp.
// |ξ₂₃|, swapped when the classifier ordered N₁ < N₂); for C/D/E the whole
// block is resonant iff its table size Φ ≤ M.
// ---------------------------------------------------------------------------
inline bool block_resonant(CaseLabel lab, bool swapped, long long phi_table,
                           int bigN1, long long phi_point, int f13, int f23,
                           double M) {
  switch (lab) {
    case CaseLabel::A:
      return std::llabs(phi_point) <= (long long)M;
    case CaseLabel::B1: {
      int f = swapped ? f23 : f13;
      long long K = 1LL << ilog2(std::abs(f));
      return (double)bigN1 * (double)K <= M;
    }
    case CaseLabel::B2: {
      int f = swapped ? f13 : f23;
      long long K = 1LL << ilog2(std::abs(f));
      return (double)bigN1 * (double)K <= M;
    }
    default:
      return (double)phi_table <= M;
  }
}

enum class Gen1Mode { Full, Resonant, Nonresonant, Boundary, Remainder };

// ---------------------------------------------------------------------------
// The pointwise-weighted direct cubic evaluator.  `zeta` is required for
// Remainder (three-slot Leibniz substitution).  Boundary carries the weight
// e^{itφ}/(iφ); Remainder carries 1/(iφ) with the same nonresonant indicator.
// ---------------------------------------------------------------------------
inline SpectralField gen1_sum(const SpectralField& om, const SpectralField* zeta,
                              Gen1Mode mode, LabelMask labels, double M,
                              const NfrParams& par) {
  if (mode == Gen1Mode::Remainder && zeta == nullptr)
    throw std::invalid_argument("gen1_sum: Remainder needs zeta");
  const int X = om.X();
  const NfrContext& ctx = NfrContext::get(X, par.g);
  const CutoffTable& ct = ctx.cutoffs();
  const LabelTable& lt = ctx.labels();
  const double t = om.t;
  SpectralField out(om.lat, t);

  for (int xi = -X; xi <= X; ++xi) {
    const auto& h0 = ct.hits(xi);
    if (h0.empty()) continue;
    cplx acc(0.0);
    for (int x1 = -X; x1 <= X; ++x1) {
      for (int x2 = -X; x2 <= X; ++x2) {
        int x3 = xi - x1 - x2;
        if (x3 < -X || x3 > X) continue;
        int f13 = x1 + x3, f23 = x2 + x3;
        if (f13 == 0 || f23 == 0) continue;
        long long phi = 2LL * f13 * f23;
        cplx base;
        if (mode == Gen1Mode::Remainder) {
          base = zeta->at(x1) * om.at(x2) * std::conj(om.at(-x3)) +
                 om.at(x1) * zeta->at(x2) * std::conj(om.at(-x3)) +
                 om.at(x1) * om.at(x2) * std::conj(zeta->at(-x3));
        } else {
          base = om.at(x1) * om.at(x2) * std::conj(om.at(-x3));
        }
        if (base == cplx(0.0)) continue;
        double w_sel = 0.0;
        for (const auto& a : h0)
          for (const auto& b : ct.hits(x1))
            for (const auto& c : ct.hits(x2))
              for (const auto& d : ct.hits(x3)) {
                int idx = lt.index(ctx.scale_index(a.N), ctx.scale_index(b.N),
                                   ctx.scale_index(c.N), ctx.scale_index(d.N));
                CaseLabel lab = lt.label(idx);
                if (lab == CaseLabel::Empty) continue;
                if (!((labels >> (int)lab) & 1u)) continue;
                bool take = true;
                if (mode != Gen1Mode::Full) {
                  int bigN1 = std::max(b.N, c.N);
                  bool res = block_resonant(lab, lt.swapped(idx), lt.phi(idx),
                                            bigN1, phi, f13, f23, M);
                  take = (mode == Gen1Mode::Resonant) == res;
                }
                if (take) w_sel += a.w * b.w * c.w * d.w;
              }
        if (w_sel == 0.0) continue;
        // summand constant: (−λ/2π)·iξ₃, phase e^{itφ}
        cplx coeff(0.0, -par.lambda * x3 / TWO_PI);
        cplx term = coeff * std::polar(1.0, t * (double)phi) * base * w_sel;
        if (mode == Gen1Mode::Boundary || mode == Gen1Mode::Remainder)
          term /= cplx(0.0, (double)phi);
        acc += term;
      }
    }
    out.at(xi) = acc;
  }
  return out;
}

// Named wrappers.
inline SpectralField n_full(const SpectralField& om, const NfrParams& par = {},
                            LabelMask labels = mask_all()) {
  return gen1_sum(om, nullptr, Gen1Mode::Full, labels, 0.0, par);
}
inline SpectralField n_case(const SpectralField& om, CaseLabel l,
                            const NfrParams& par = {}) {
  return gen1_sum(om, nullptr, Gen1Mode::Full, mask_only(l), 0.0, par);
}
inline SpectralField resonant_part(const SpectralField& om, double M,
                                   const NfrParams& par = {},
                                   LabelMask labels = mask_all()) {
  return gen1_sum(om, nullptr, Gen1Mode::Resonant, labels, M, par);
}
inline SpectralField nonresonant_part(const SpectralField& om, double M,
                                      const NfrParams& par = {},
                                      LabelMask labels = mask_all()) {
  return gen1_sum(om, nullptr, Gen1Mode::Nonresonant, labels, M, par);
}
inline SpectralField n0_term(const SpectralField& om, double M,
                             const NfrParams& par = {},
                             LabelMask labels = mask_not(CaseLabel::A)) {
  return gen1_sum(om, nullptr, Gen1Mode::Boundary, labels, M, par);
}
inline SpectralField n1_term(const SpectralField& om, const SpectralField& zeta,
                             double M, const NfrParams& par = {},
                             LabelMask labels = mask_not(CaseLabel::A)) {
  return gen1_sum(om, &zeta, Gen1Mode::Remainder, labels, M, par);
}

// ---------------------------------------------------------------------------
// R[ω]: resonant diagonal + quintic terms (the latter computed on the ŵ side
// and mapped back through e^{itξ²}).
// ---------------------------------------------------------------------------
inline SpectralField r_term(const SpectralField& om, const NfrParams& par = {}) {
  SpectralField out(om.lat, om.t);
  for (int xi = -om.X(); xi <= om.X(); ++xi)
    out.at(xi) = cplx(0.0, -par.lambda * xi / TWO_PI) * std::norm(om.at(xi)) *
                 om.at(xi);
  SpectralField what = physical_rep(om);
  SpectralField q = w_quintic_terms(what, par.lambda);
  out += interaction_rep(q);
  return out;
}

// ∂_tω supplied by the equation: R[ω] + N[ω].
inline SpectralField omega_rhs(const SpectralField& om,
                               const NfrParams& par = {}) {
  SpectralField out = r_term(om, par);
  out += n_full(om, par);
  return out;
}

}  // namespace nfr

#endif  // NFR_NFR_FINITE_HPP_
