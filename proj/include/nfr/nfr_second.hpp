// nfr_second.hpp
// Second-generation NFR terms L¹…L¹⁰ (remainder-of-remainder algebra), their
// R / 0 / 1 splits, and the W₀ / W₁ / ϖ assembly.
//
// L^j = N^{outer}_{1,slot}[ω, N^{inner}[ω]]: the first-generation remainder
// restricted to an outer case, with the full inner cubic block substituted in
// one slot.  The display for L¹ (outer C1, slot 1, inner C2):
//   Σ_{N₁∼N₃≫N≫N₂, NN₃>M, label(N₁,L₁,L₂,L₃)=C2}
//   ∫_{ξ=ξ₁₂₃, ξ₁=η₁₂₃} e^{it(φξ+φη)}/φξ · ξ₃η₃ ψ_N(ξ)ψ_{N₁}(ξ₁)
//   ω_{L₁}(η₁)ω_{L₂}(η₂)ω*_{L₃}(η₃) ω_{N₂}(ξ₂)ω*_{N₃}(ξ₃)
// — one cutoff on the substituted frequency; the inner block is classified on
// the outer's dyadic size at that slot.  For slot 3 the inner block enters
// conjugated (ζ*(ξ₃) = conj(inner(−ξ₃))), flipping the sign of its phase:
// the combined phase is φξ + σφη with σ = +1 for slots 1,2 and −1 for slot 3.
//
// Split at the pair-resonance threshold: the pair is nonresonant iff
// lg Φ_inner − lg Φ_outer > g (Φ_outer = table Φ, or N₁K pointwise for outer
// B; Φ_inner = the inner block's table Φ), in which case
//   L^j|_pairNR = d/dt L^j_0 − L^j_1[ω, ∂_tω],
// with L^j_0 carrying the extra weight 1/(i(φξ+σφη)) and L^j_1 the five-slot
// Leibniz expansion.  Points with φξ+σφη = 0 inside the pair-nonresonant set
// are routed to L^j_R so the telescoping identity stays exact.

#ifndef NFR_NFR_SECOND_HPP_
#define NFR_NFR_SECOND_HPP_

#include <array>
#include <map>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "nfr/nfr_finite.hpp"
#include "nfr/norms.hpp"

namespace nfr {

struct SecondGenSpec {
  int j = 0;
  LabelMask outer = 0;
  CaseLabel inner = CaseLabel::C2;
  std::vector<int> slots;  // substitution slots a* (1-based)
};

inline SecondGenSpec second_gen_spec(int j) {
  const LabelMask C1 = mask_only(CaseLabel::C1), C2 = mask_only(CaseLabel::C2),
                  D = mask_only(CaseLabel::D1) | mask_only(CaseLabel::D2),
                  B1 = mask_only(CaseLabel::B1), B2 = mask_only(CaseLabel::B2);
  switch (j) {
    case 1: return {1, C1, CaseLabel::C2, {1}};
    case 2: return {2, C1, CaseLabel::C2, {3}};
    case 3: return {3, D, CaseLabel::C1, {1}};
    case 4: return {4, C2, CaseLabel::C1, {3}};
    case 5: return {5, B2, CaseLabel::C2, {2, 3}};
    case 6: return {6, B2, CaseLabel::C2, {1}};
    case 7: return {7, B1, CaseLabel::C2, {1, 3}};
    case 8: return {8, B1, CaseLabel::C2, {2}};
    case 9: return {9, B2, CaseLabel::C1, {1}};
    case 10: return {10, B1, CaseLabel::C1, {2}};
    default: throw std::invalid_argument("second_gen_spec: j in 1..10");
  }
}

enum class Gen2Mode { Full, R, Zero, One };

namespace gen2 {

// ---------------------------------------------------------------------------
// Inner tables: for each substituted frequency ξ_s and each dyadic size N_s
// with ψ_{N_s}(ξ_s) ≠ 0, the φη-binned sums of the inner block restricted to
// label(N_s, L₁, L₂, L₃) = inner case, grouped by lg Φ_inner.  Values carry
// ψ_{N_s}(ξ_s), the inner cutoffs, the inner constant (−λ/2π)iη₃ and the
// field products — everything except the phase e^{itφη}.
// ---------------------------------------------------------------------------
struct PhiGroup {
  int lgphi;
  std::vector<long long> phis;
  std::vector<cplx> amps;
};
struct ScaleEntry {
  int N;
  std::vector<PhiGroup> groups;  // ascending lgphi
};
struct SlotTable {
  int X = 0;
  std::vector<std::vector<ScaleEntry>> at;  // index ξ + X
};

// variant: 0 = plain ω; 1..3 = ζ substituted in that inner slot.
inline SlotTable build_inner_table(const SpectralField& om,
                                   const SpectralField* zeta, int variant,
                                   CaseLabel inner, const NfrParams& par) {
  const int X = om.X();
  const NfrContext& ctx = NfrContext::get(X, par.g);
  const CutoffTable& ct = ctx.cutoffs();
  const LabelTable& lt = ctx.labels();
  SlotTable tbl;
  tbl.X = X;
  tbl.at.resize(2 * X + 1);
  auto f1 = [&](int e) { return variant == 1 ? zeta->at(e) : om.at(e); };
  auto f2 = [&](int e) { return variant == 2 ? zeta->at(e) : om.at(e); };
  auto f3 = [&](int e) {
    return std::conj(variant == 3 ? zeta->at(-e) : om.at(-e));
  };
  for (int xs = -X; xs <= X; ++xs) {
    const auto& hs = ct.hits(xs);
    if (hs.empty()) continue;
    // ordered accumulation: N -> lgphi -> phi -> amp
    std::map<int, std::map<int, std::map<long long, cplx>>> acc;
    for (int e1 = -X; e1 <= X; ++e1) {
      for (int e2 = -X; e2 <= X; ++e2) {
        int e3 = xs - e1 - e2;
        if (e3 < -X || e3 > X) continue;
        int g13 = e1 + e3, g23 = e2 + e3;
        if (g13 == 0 || g23 == 0) continue;
        cplx base = f1(e1) * f2(e2) * f3(e3);
        if (base == cplx(0.0)) continue;
        long long phieta = 2LL * g13 * g23;
        cplx coeff(0.0, -par.lambda * e3 / TWO_PI);
        for (const auto& a : hs)
          for (const auto& b : ct.hits(e1))
            for (const auto& c : ct.hits(e2))
              for (const auto& d : ct.hits(e3)) {
                int idx = lt.index(ctx.scale_index(a.N), ctx.scale_index(b.N),
                                   ctx.scale_index(c.N), ctx.scale_index(d.N));
                if (lt.label(idx) != inner) continue;
                long long phin = lt.phi(idx);
                double w = a.w * b.w * c.w * d.w;
                acc[a.N][ilog2((int)phin)][phieta] += coeff * base * w;
              }
      }
    }
    auto& dest = tbl.at[xs + X];
    for (auto& [N, bylg] : acc) {
      ScaleEntry e;
      e.N = N;
      for (auto& [lg, byphi] : bylg) {
        PhiGroup gr;
        gr.lgphi = lg;
        for (auto& [p, v] : byphi) {
          gr.phis.push_back(p);
          gr.amps.push_back(v);
        }
        e.groups.push_back(std::move(gr));
      }
      dest.push_back(std::move(e));
    }
  }
  return tbl;
}

// ---------------------------------------------------------------------------
// Cached kernels over one table, for one orientation (σ, conj) and time t.
// ---------------------------------------------------------------------------
class Kernels {
 public:
  Kernels(const SlotTable& tbl, bool conjugate, double t, int gap)
      : tbl_(tbl), conj_(conjugate), sigma_(conjugate ? -1 : 1), t_(t),
        gap_(gap) {}

  const ScaleEntry* entry(int xs, int N) const {
    if (xs < -tbl_.X || xs > tbl_.X) return nullptr;
    for (const auto& e : tbl_.at[xs + tbl_.X])
      if (e.N == N) return &e;
    return nullptr;
  }

  // Σ over all bins of amp·e^{itσφη}
  cplx full(int xs, int N) {
    long long key = pack(xs, N, 0, 0);
    auto it = full_.find(key);
    if (it != full_.end()) return it->second;
    cplx s(0.0);
    if (const ScaleEntry* e = entry(xs, N))
      for (const auto& g : e->groups) s += sum_group(g);
    full_[key] = s;
    return s;
  }

  // pair-resonant side: Σ_{lgΦin ≤ cut} + (zero combined phase: bins in the
  // nonresonant suffix with φη = −σφξ)
  cplx res_side(int xs, int N, int cut, long long phix) {
    long long key = pack(xs, N, cut, phix);
    auto it = res_.find(key);
    if (it != res_.end()) return it->second;
    cplx s(0.0);
    long long zero_phi = -(long long)sigma_ * phix;
    if (const ScaleEntry* e = entry(xs, N))
      for (const auto& g : e->groups) {
        if (g.lgphi <= cut + gap_) {
          s += sum_group(g);
        } else {
          for (size_t i = 0; i < g.phis.size(); ++i)
            if (g.phis[i] == zero_phi) s += amp(g, i) * phase(g.phis[i]);
        }
      }
    res_[key] = s;
    return s;
  }

  // Σ_{lgΦin > cut+gap, φη ≠ −σφξ} amp·e^{itσφη}/(i(φξ+σφη))
  cplx gker(int xs, int N, int cut, long long phix) {
    long long key = pack(xs, N, cut, phix);
    auto it = g_.find(key);
    if (it != g_.end()) return it->second;
    cplx s(0.0);
    long long zero_phi = -(long long)sigma_ * phix;
    if (const ScaleEntry* e = entry(xs, N))
      for (const auto& g : e->groups) {
        if (g.lgphi <= cut + gap_) continue;
        for (size_t i = 0; i < g.phis.size(); ++i) {
          if (g.phis[i] == zero_phi) continue;
          long long comb = phix + (long long)sigma_ * g.phis[i];
          s += amp(g, i) * phase(g.phis[i]) / cplx(0.0, (double)comb);
        }
      }
    g_[key] = s;
    return s;
  }

 private:
  cplx amp(const PhiGroup& g, size_t i) const {
    return conj_ ? std::conj(g.amps[i]) : g.amps[i];
  }
  cplx phase(long long phieta) const {
    return std::polar(1.0, t_ * (double)(sigma_ * phieta));
  }
  cplx sum_group(const PhiGroup& g) {
    cplx s(0.0);
    for (size_t i = 0; i < g.phis.size(); ++i)
      s += amp(g, i) * phase(g.phis[i]);
    return s;
  }
  long long pack(int xs, int N, int cut, long long phix) const {
    // phix ∈ [−8X², 8X²]; cut < 64; N ≤ 2^20
    long long p = phix + 8LL * tbl_.X * tbl_.X;
    return (((((long long)(xs + tbl_.X)) * 21 + ilog2(N)) * 64 + cut) << 26) | p;
  }
  const SlotTable& tbl_;
  bool conj_;
  int sigma_;
  double t_;
  int gap_;
  std::unordered_map<long long, cplx> full_, res_, g_;
};

}  // namespace gen2

// ---------------------------------------------------------------------------
// Engine: owns the lazily built tables and kernels for one (ω, ζ, t, M).
// ---------------------------------------------------------------------------
class Gen2Engine {
 public:
  Gen2Engine(const SpectralField& om, const SpectralField* zeta, double M,
             const NfrParams& par)
      : om_(om), zeta_(zeta), M_(M), par_(par),
        ctx_(NfrContext::get(om.X(), par.g)) {}

  // One L^j piece for a single slot.  The slot index refers to the
  // symmetrized ordering (slot 1 carries the larger of the first two dyadic
  // scales), so for combos the classifier swapped, substitution at slot 1
  // lands on physical slot 2 and vice versa; slot 3 never swaps.
  // variant: inner table variant (ζ inside).  outer_leibniz: sum ζ over the
  // two non-substituted outer slots instead of plain ω factors.
  SpectralField eval_slot(const SecondGenSpec& spec, int slot, Gen2Mode mode,
                          int variant, bool outer_leibniz) {
    const int X = om_.X();
    const CutoffTable& ct = ctx_.cutoffs();
    const LabelTable& lt = ctx_.labels();
    gen2::Kernels& ker = kernels(spec.inner, variant, slot);
    const double t = om_.t;
    SpectralField out(om_.lat, t);
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
          long long phix = 2LL * f13 * f23;
          // outer factors (slot 3 enters conjugated at −ξ₃)
          const cplx wf[3] = {om_.at(x1), om_.at(x2), std::conj(om_.at(-x3))};
          cplx zf[3];
          if (outer_leibniz) {
            zf[0] = zeta_->at(x1);
            zf[1] = zeta_->at(x2);
            zf[2] = std::conj(zeta_->at(-x3));
          }
          // product (or Leibniz sum) over the two slots ≠ eff, eff ∈ {slot,
          // 3−slot} (the latter only for swapped combos with slot ≤ 2)
          auto base_for = [&](int eff) -> cplx {
            int o1 = -1, o2 = -1;
            for (int s = 1; s <= 3; ++s)
              if (s != eff) (o1 < 0 ? o1 : o2) = s;
            if (!outer_leibniz) return wf[o1 - 1] * wf[o2 - 1];
            return zf[o1 - 1] * wf[o2 - 1] + wf[o1 - 1] * zf[o2 - 1];
          };
          cplx base_plain = base_for(slot);
          cplx base_swap =
              (slot == 3) ? base_plain : base_for(3 - slot);
          cplx coeff = cplx(0.0, -par_.lambda * x3 / TWO_PI) /
                       cplx(0.0, (double)phix) *
                       std::polar(1.0, t * (double)phix);
          for (const auto& a : h0)
            for (const auto& b : ct.hits(x1))
              for (const auto& c : ct.hits(x2))
                for (const auto& d : ct.hits(x3)) {
                  int idx = lt.index(ctx_.scale_index(a.N), ctx_.scale_index(b.N),
                                     ctx_.scale_index(c.N), ctx_.scale_index(d.N));
                  CaseLabel lab = lt.label(idx);
                  if (lab == CaseLabel::Empty) continue;
                  if (!((spec.outer >> (int)lab) & 1u)) continue;
                  bool sw = lt.swapped(idx);
                  // outer nonresonant requirement and Φ_outer
                  long long phiout;
                  if (lab == CaseLabel::B1 || lab == CaseLabel::B2) {
                    bool use13 = (lab == CaseLabel::B1) != sw;
                    long long K = 1LL << ilog2(std::abs(use13 ? f13 : f23));
                    phiout = (long long)std::max(b.N, c.N) * K;
                  } else {
                    phiout = lt.phi(idx);
                  }
                  if (!((double)phiout > M_)) continue;
                  int cut = ilog2((int)std::min(phiout, (long long)1 << 40));
                  int eff = (sw && slot != 3) ? 3 - slot : slot;
                  // ψ weight excludes the substituted slot (it lives in the
                  // table); scale of the table entry = that slot's hit
                  double w;
                  int Ns, xs;
                  if (eff == 1) {
                    w = a.w * c.w * d.w;
                    Ns = b.N;
                    xs = x1;
                  } else if (eff == 2) {
                    w = a.w * b.w * d.w;
                    Ns = c.N;
                    xs = x2;
                  } else {
                    w = a.w * b.w * c.w;
                    Ns = d.N;
                    xs = -x3;
                  }
                  cplx base = (eff == slot) ? base_plain : base_swap;
                  if (base == cplx(0.0)) continue;
                  cplx kval;
                  switch (mode) {
                    case Gen2Mode::Full: kval = ker.full(xs, Ns); break;
                    case Gen2Mode::R: kval = ker.res_side(xs, Ns, cut, phix); break;
                    default: kval = ker.gker(xs, Ns, cut, phix); break;
                  }
                  acc += coeff * base * w * kval;
                }
        }
      }
      out.at(xi) = acc;
    }
    return out;
  }

  // L^j piece summed over the spec's slots.  Mode One = five-slot Leibniz.
  SpectralField eval(const SecondGenSpec& spec, Gen2Mode mode) {
    SpectralField out(om_.lat, om_.t);
    for (int slot : spec.slots) {
      if (mode != Gen2Mode::One) {
        out += eval_slot(spec, slot, mode, 0, false);
      } else {
        if (!zeta_) throw std::invalid_argument("Gen2Engine: One needs zeta");
        for (int v = 1; v <= 3; ++v)  // ζ inside the inner block
          out += eval_slot(spec, slot, Gen2Mode::Zero, v, false);
        out += eval_slot(spec, slot, Gen2Mode::Zero, 0, true);
      }
    }
    return out;
  }

 private:
  gen2::Kernels& kernels(CaseLabel inner, int variant, int slot) {
    int conj = (slot == 3) ? 1 : 0;
    auto key = std::make_tuple((int)inner, variant, conj);
    auto it = kernels_.find(key);
    if (it == kernels_.end()) {
      const gen2::SlotTable& tbl = table(inner, variant);
      it = kernels_
               .emplace(key, std::make_unique<gen2::Kernels>(tbl, conj != 0,
                                                             om_.t, par_.g))
               .first;
    }
    return *it->second;
  }
  const gen2::SlotTable& table(CaseLabel inner, int variant) {
    auto key = std::make_pair((int)inner, variant);
    auto it = tables_.find(key);
    if (it == tables_.end()) {
      if (variant != 0 && !zeta_)
        throw std::invalid_argument("Gen2Engine: zeta variant without zeta");
      it = tables_
               .emplace(key, gen2::build_inner_table(om_, zeta_, variant, inner,
                                                     par_))
               .first;
    }
    return it->second;
  }

  const SpectralField& om_;
  const SpectralField* zeta_;
  double M_;
  NfrParams par_;
  const NfrContext& ctx_;
  std::map<std::pair<int, int>, gen2::SlotTable> tables_;
  std::map<std::tuple<int, int, int>, std::unique_ptr<gen2::Kernels>> kernels_;
};

// Public single-term entry point (spec op).  ζ required for mode One.
inline SpectralField second_gen_term(const SecondGenSpec& spec,
                                     const SpectralField& om,
                                     const SpectralField* zeta, Gen2Mode mode,
                                     double M, const NfrParams& par = {}) {
  Gen2Engine eng(om, zeta, M, par);
  return eng.eval(spec, mode);
}

// ---------------------------------------------------------------------------
// W₀, W₁, ϖ.
//   W₀[ω] = N₀^{¬A}[ω] − Σ_j L^j_0[ω]   (sign fixed by the exact telescoping
//   of this implementation's N₀/N₁ and L^j_0/L^j_1 conventions), so that
//   ∂_t(ω − W₀[ω]) = N^A[ω − W₀[ω]] + W₁[ω] holds exactly along solutions,
//   with
//   W₁[ω] = R[ω] + N_R^{¬A}[ω] − N₁^{¬A}[ω, ∂_tω]
//           + Σ_j (L^j − L^j_R + L^j_1[ω, ∂_tω]) + (N^A[ω] − N^A[ϖ]).
// ---------------------------------------------------------------------------
inline SpectralField w0_term(const SpectralField& om, double M,
                             const NfrParams& par = {}) {
  SpectralField out = n0_term(om, M, par);
  Gen2Engine eng(om, nullptr, M, par);
  for (int j = 1; j <= 10; ++j)
    out -= eng.eval(second_gen_spec(j), Gen2Mode::Zero);
  return out;
}

inline SpectralField varpi_field(const SpectralField& om, double M,
                                 const NfrParams& par = {}) {
  SpectralField out = om;
  out -= w0_term(om, M, par);
  return out;
}

inline SpectralField w1_term(const SpectralField& om, double M,
                             const NfrParams& par = {}) {
  SpectralField dom = omega_rhs(om, par);
  SpectralField out = r_term(om, par);
  out += resonant_part(om, M, par, mask_not(CaseLabel::A));
  out -= n1_term(om, dom, M, par);
  Gen2Engine eng(om, &dom, M, par);
  for (int j = 1; j <= 10; ++j) {
    auto spec = second_gen_spec(j);
    out += eng.eval(spec, Gen2Mode::Full);
    out -= eng.eval(spec, Gen2Mode::R);
    out += eng.eval(spec, Gen2Mode::One);
  }
  SpectralField vp = varpi_field(om, M, par);
  out += n_case(om, CaseLabel::A, par);
  out -= n_case(vp, CaseLabel::A, par);
  return out;
}

inline Trajectory varpi(const Trajectory& om_traj, double M,
                        const NfrParams& par = {}) {
  Trajectory out{om_traj.lat, om_traj.lambda, om_traj.dt, {}};
  for (const auto& f : om_traj.fields)
    out.fields.push_back(varpi_field(f, M, par));
  return out;
}

// Smallness flag of §4.5/§5.4 (informational, not fatal).
inline bool varpi_smallness_ok(const SpectralField& vp, double M,
                               double eps = 0.01) {
  double n = sobolev(vp, 0.5);
  return std::pow(M, -0.5 + eps) * n * n < 1.0;
}

// ---------------------------------------------------------------------------
// End-to-end identity residual on an ω-trajectory (interaction convention):
//   max_k ‖ ϖ(t_k) − ϖ(0) − ∫₀^{t_k} (N^A[ϖ] + W₁[ω]) dt ‖_{Ĥ^{−1/2}}.
// ---------------------------------------------------------------------------
inline double finite_nfr_identity_residual(const Trajectory& om_traj, double M,
                                           const NfrParams& par = {}) {
  int n = om_traj.size();
  if (n < 2) throw std::invalid_argument("finite_nfr_identity_residual");
  std::vector<SpectralField> vp, integrand;
  vp.reserve(n);
  integrand.reserve(n);
  for (int k = 0; k < n; ++k) {
    const auto& om = om_traj.fields[k];
    vp.push_back(varpi_field(om, M, par));
    SpectralField I = n_case(vp.back(), CaseLabel::A, par);
    I += w1_term(om, M, par);
    integrand.push_back(std::move(I));
  }
  double worst = 0.0;
  for (int k = 1; k < n; ++k) {
    auto wts = simpson_weights(k + 1, om_traj.dt);
    SpectralField acc = vp[k];
    acc -= vp[0];
    for (int m = 0; m <= k; ++m) {
      SpectralField g = integrand[m];
      g *= cplx(-wts[m]);
      acc += g;
    }
    worst = std::max(worst, sobolev(acc, -0.5));
  }
  return worst;
}

}  // namespace nfr

#endif  // NFR_NFR_SECOND_HPP_
