// trees.hpp
// Tree combinatorics and tree-indexed multilinear operators of the infinite
// normal-form scheme.
//
// A tree of generation J has 3J+1 nodes: a root, J parents a^1..a^J (a^1 is
// the root) each with an ordered child triple, and 2J+1 leaves.  Numbering
// respects ancestry.  The sign partition puts the root in T1; a T1 parent
// sends children 1,2 to T1 and child 3 to T2, a T2 parent the reverse.  An
// index assignment gives integer frequencies to the leaves; internal
// frequencies follow from ξ_parent = ξ_1 + ξ_2 + ξ_3, and each parent carries
// the phase φ_j = ±(ξ² − ξ_1² − ξ_2² + ξ_3²) (minus when the parent is in
// T2), with cumulative sums φ̃_j.  Closed form:
//   φ̃_J = ξ_root² − Σ_{T1 leaves} ξ_a² + Σ_{T2 leaves} ξ_a².
//
// The generation-J operator (time t, threshold schedule M_j = 10^{j−1}M):
//   N^(J;T)[ϖ](ξ) = Σ_assignments  (iC)^J e^{itφ̃_J}
//                   ∏_{j=1}^{J} Ψ_j ξ_{a^j_3} · ∏_{j=1}^{J−1} 1_{|φ̃_j|>M_j}/(iφ̃_j)
//                   · ∏_{T1 leaves} ϖ(ξ_a) ∏_{T2 leaves} conj(ϖ(−ξ_a)),
// with C = −λ/2π and Ψ_j the case-A dyadic weight (exclusion |ξ13|∧|ξ23| ≥ 1
// and all four scales comparable per the classifier's gap g).  J=1 is exactly
// the case-A part of the first-generation cubic.  Modes:
//   full      as displayed,
//   R         extra factor 1_{|φ̃_J| ≤ M_J},
//   boundary  extra factor 1_{|φ̃_J| > M_J}/(iφ̃_J),
//   remainder boundary weight, leaf a* replaced by ζ (ζ* on T2), overall −1.
// With these conventions the per-tree telescoping identity reads
//   full = R + d/dt(boundary) + Σ_{a*} remainder(a*, ∂_tϖ),
// and substituting ∂_tϖ = N^A[ϖ] + W₁[ω] turns the N^A part of each
// remainder slot into −N^(J+1) on the extended tree: 𝔗(J+1) is exactly
// {T extended at a leaf a*}, which yields the generation-(J+1) equation with
// alternating signs.

#ifndef NFR_TREES_HPP_
#define NFR_TREES_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nfr/nfr_finite.hpp"
#include "nfr/nfr_second.hpp"
#include "nfr/norms.hpp"

namespace nfr {

// ---------------------------------------------------------------------------
// Tree combinatorics.
// ---------------------------------------------------------------------------
struct Tree {
  int J = 0;
  std::vector<int> parent;                  // per node; -1 at the root
  std::vector<std::array<int, 3>> child;    // per parent j-1: ordered children
  std::vector<int> pnode;                   // per parent j-1: node id of a^j
  std::vector<char> t2;                     // per node: 1 if in T2
  std::vector<int> leaves;                  // ascending node ids

  bool is_leaf(int node) const {
    for (int p : pnode)
      if (p == node) return false;
    return true;
  }
  void rebuild_leaves() {
    leaves.clear();
    for (int v = 0; v < (int)parent.size(); ++v)
      if (is_leaf(v)) leaves.push_back(v);
  }
  // Canonical rendering: leaves "o" (T1) / "*" (T2); parents "j(...)" with
  // the parent number, so distinct numberings render distinctly.
  std::string render_node(int node) const {
    for (int j = 0; j < J; ++j)
      if (pnode[j] == node) {
        std::ostringstream os;
        os << (j + 1) << "(" << render_node(child[j][0])
           << render_node(child[j][1]) << render_node(child[j][2]) << ")";
        return os.str();
      }
    return t2[node] ? "*" : "o";
  }
  std::string render() const { return render_node(0); }
};

inline void check_tree_range(int J) {
  if (J < 1 || J > 7)
    throw std::invalid_argument("tree generation J must be in 1..7");
}

inline long long count_trees(int J) {
  check_tree_range(J);
  long long c = 1;
  for (int j = 1; j <= J; ++j) c *= 2 * j - 1;
  return c;
}

// Extend a tree by making leaf `a` the next parent with three fresh children.
inline Tree extend_tree(const Tree& t, int a) {
  Tree out = t;
  int base = (int)out.parent.size();
  out.J = t.J + 1;
  out.pnode.push_back(a);
  out.child.push_back({base, base + 1, base + 2});
  for (int l = 0; l < 3; ++l) {
    out.parent.push_back(a);
    bool flip = (l == 2);
    out.t2.push_back((char)(flip ? !t.t2[a] : t.t2[a]));
  }
  out.rebuild_leaves();
  return out;
}

inline std::vector<Tree> enumerate_trees(int J) {
  check_tree_range(J);
  Tree base;
  base.J = 1;
  base.parent = {-1, 0, 0, 0};
  base.child = {{1, 2, 3}};
  base.pnode = {0};
  base.t2 = {0, 0, 0, 1};
  base.rebuild_leaves();
  std::vector<Tree> cur = {base};
  for (int j = 2; j <= J; ++j) {
    std::vector<Tree> next;
    next.reserve(cur.size() * (2 * j - 1));
    for (const Tree& t : cur)
      for (int a : t.leaves) next.push_back(extend_tree(t, a));
    cur = std::move(next);
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Phases.
// ---------------------------------------------------------------------------
struct TreePhases {
  std::vector<long long> phi;       // φ_j, j = 1..J
  std::vector<long long> phitilde;  // φ̃_j cumulative
};

// Internal frequencies induced by leaf values (indexed by position in
// tree.leaves); returns per-node frequencies.
inline std::vector<long long> node_freqs_from_leaves(
    const Tree& t, const std::vector<long long>& leaf_vals) {
  if (leaf_vals.size() != t.leaves.size())
    throw std::invalid_argument("node_freqs_from_leaves: size mismatch");
  std::vector<long long> fr(t.parent.size(), 0);
  for (size_t i = 0; i < t.leaves.size(); ++i) fr[t.leaves[i]] = leaf_vals[i];
  for (int j = t.J - 1; j >= 0; --j)
    fr[t.pnode[j]] =
        fr[t.child[j][0]] + fr[t.child[j][1]] + fr[t.child[j][2]];
  return fr;
}

// Exact integer phases from a full per-node assignment; the consistency
// equation is enforced at every parent.
inline TreePhases phases(const Tree& t, const std::vector<long long>& fr) {
  if (fr.size() != t.parent.size())
    throw std::invalid_argument("phases: assignment size mismatch");
  TreePhases out;
  long long cum = 0;
  for (int j = 0; j < t.J; ++j) {
    long long p = fr[t.pnode[j]], c1 = fr[t.child[j][0]],
              c2 = fr[t.child[j][1]], c3 = fr[t.child[j][2]];
    if (p != c1 + c2 + c3)
      throw std::invalid_argument("phases: inconsistent internal frequency");
    long long ph = p * p - c1 * c1 - c2 * c2 + c3 * c3;
    if (t.t2[t.pnode[j]]) ph = -ph;
    out.phi.push_back(ph);
    cum += ph;
    out.phitilde.push_back(cum);
  }
  return out;
}

// Closed form for φ̃_J given a per-node assignment.
inline long long phitilde_closed_form(const Tree& t,
                                      const std::vector<long long>& fr) {
  long long v = fr[0] * fr[0];
  for (int a : t.leaves) v += (t.t2[a] ? 1 : -1) * fr[a] * fr[a];
  return v;
}

// ---------------------------------------------------------------------------
// Case-A pointwise weight table: Ψ collapsed over the dyadic sum,
//   W_A(ξ1,ξ2,ξ3) = 1_{|ξ13|∧|ξ23| ≥ 1} Σ_{label = A} ψψψψ.
// ---------------------------------------------------------------------------
inline const std::vector<double>& case_a_weight_table(int X, int g) {
  static std::map<std::pair<int, int>, std::vector<double>> cache;
  auto key = std::make_pair(X, g);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const NfrContext& ctx = NfrContext::get(X, g);
  const CutoffTable& ct = ctx.cutoffs();
  const LabelTable& lt = ctx.labels();
  int L = 2 * X + 1;
  std::vector<double> tbl((size_t)L * L * L, 0.0);
  for (int x1 = -X; x1 <= X; ++x1)
    for (int x2 = -X; x2 <= X; ++x2)
      for (int x3 = -X; x3 <= X; ++x3) {
        int xi = x1 + x2 + x3;
        if (xi < -X || xi > X) continue;
        if (x1 + x3 == 0 || x2 + x3 == 0) continue;
        double w = 0.0;
        for (const auto& a : ct.hits(xi))
          for (const auto& b : ct.hits(x1))
            for (const auto& c : ct.hits(x2))
              for (const auto& d : ct.hits(x3)) {
                int idx = lt.index(ctx.scale_index(a.N), ctx.scale_index(b.N),
                                   ctx.scale_index(c.N), ctx.scale_index(d.N));
                if (lt.label(idx) == CaseLabel::A) w += a.w * b.w * c.w * d.w;
              }
        tbl[(size_t)((x1 + X) * L + (x2 + X)) * L + (x3 + X)] = w;
      }
  it = cache.emplace(key, std::move(tbl)).first;
  return it->second;
}

// ---------------------------------------------------------------------------
// Tree operator.
// ---------------------------------------------------------------------------
enum class TreeMode { Full, R, Boundary, Remainder };

inline double tree_budget(int J, int X) {
  return std::pow((double)(2 * X + 1), 2 * J) * (double)count_trees(J);
}

namespace tree_detail {

// Shared evaluator.  `leibniz` sums the remainder over all substitution
// slots in one lattice pass; otherwise `a_star` (position in tree.leaves)
// selects the slot.  Remainder carries the built-in −1.
inline SpectralField eval(const Tree& t, const SpectralField& vp, double M,
                          TreeMode mode, int a_star, const SpectralField* zeta,
                          bool leibniz, const NfrParams& par) {
  const int X = vp.X();
  const int J = t.J;
  double pred = tree_budget(J, X);
  if (pred > 1e10) {
    std::ostringstream os;
    os << "tree_operator budget exceeded: predicted " << pred
       << " ops (limit 1e10) at J=" << J << ", xi_max=" << X;
    throw std::runtime_error(os.str());
  }
  if (mode == TreeMode::Remainder && !leibniz) {
    if (zeta == nullptr) throw std::invalid_argument("remainder needs zeta");
    if (a_star < 0 || a_star >= (int)t.leaves.size())
      throw std::invalid_argument("remainder: bad substitution slot");
  }
  if (leibniz && zeta == nullptr)
    throw std::invalid_argument("remainder needs zeta");

  const auto& WA = case_a_weight_table(X, par.g);
  const int L = 2 * X + 1;
  const double t_time = vp.t;
  const int nL = (int)t.leaves.size();
  SpectralField out(vp.lat, t_time);

  // thresholds M_j = 10^{j-1} M
  std::vector<double> Mj(J);
  for (int j = 0; j < J; ++j) Mj[j] = M * std::pow(10.0, j);

  // per-generation constant (iC)^J, C = −λ/2π; prefix 1/i per inner divisor
  const cplx iC(0.0, -par.lambda / TWO_PI);
  cplx constJ(1.0, 0.0);
  for (int j = 0; j < J; ++j) constJ *= iC;
  cplx inv_i_pref(1.0, 0.0);  // (1/i)^{J-1}
  for (int j = 0; j < J - 1; ++j) inv_i_pref *= cplx(0.0, -1.0);
  cplx pref_const = constJ * inv_i_pref;
  if (mode == TreeMode::Boundary || mode == TreeMode::Remainder)
    pref_const *= cplx(0.0, -1.0);  // the extra 1/(iφ̃_J)
  if (mode == TreeMode::Remainder) pref_const = -pref_const;

  // leaf field values, prefetched per leaf slot: T1 -> f(ξ), T2 -> conj(f(−ξ))
  auto leaf_val = [&](const SpectralField& f, int slot, int v) {
    return t.t2[t.leaves[slot]] ? std::conj(f.at(-v)) : f.at(v);
  };

  std::vector<int> lf(nL, 0);
  std::vector<long long> fr(t.parent.size(), 0);
  std::vector<cplx> wv(nL), zv(nL), sufv(nL + 1);

  // recursion over the first nL-1 leaves; the innermost leaf is looped flat
  auto process = [&]() {
    for (int v = -X; v <= X; ++v) {
      lf[nL - 1] = v;
      // induced internal frequencies (parents in reverse numbering order)
      for (int i = 0; i < nL; ++i) fr[t.leaves[i]] = lf[i];
      for (int j = J - 1; j >= 0; --j)
        fr[t.pnode[j]] =
            fr[t.child[j][0]] + fr[t.child[j][1]] + fr[t.child[j][2]];
      long long xi = fr[0];
      if (xi < -X || xi > X) continue;
      // dyadic weights and φ's per parent
      double w = 1.0;
      long long cum = 0;
      double divprod = 1.0;
      bool dead = false;
      for (int j = 0; j < J && !dead; ++j) {
        long long c1 = fr[t.child[j][0]], c2 = fr[t.child[j][1]],
                  c3 = fr[t.child[j][2]];
        double wa = WA[(size_t)((c1 + X) * L + (c2 + X)) * L + (c3 + X)];
        if (wa == 0.0) {
          dead = true;
          break;
        }
        w *= wa * (double)c3;
        long long p = c1 + c2 + c3;
        long long ph = p * p - c1 * c1 - c2 * c2 + c3 * c3;
        if (t.t2[t.pnode[j]]) ph = -ph;
        cum += ph;
        if (j < J - 1) {
          if (std::llabs(cum) <= (long long)Mj[j]) {
            dead = true;
            break;
          }
          divprod *= (double)cum;
        }
      }
      if (dead || w == 0.0) continue;
      // mode gate on φ̃_J
      if (mode == TreeMode::R) {
        if (std::llabs(cum) > (long long)Mj[J - 1]) continue;
      } else if (mode != TreeMode::Full) {
        if (std::llabs(cum) <= (long long)Mj[J - 1]) continue;
        divprod *= (double)cum;
      }
      // leaf product
      wv[nL - 1] = leaf_val(vp, nL - 1, v);
      cplx base;
      if (mode == TreeMode::Remainder) {
        if (leibniz) {
          zv[nL - 1] = leaf_val(*zeta, nL - 1, v);
          // Σ_k  (∏_{i<k} w) z_k (∏_{i>k} w) via suffix products
          sufv[nL] = cplx(1.0, 0.0);
          for (int i = nL - 1; i >= 0; --i) sufv[i] = sufv[i + 1] * wv[i];
          cplx pre(1.0, 0.0), acc(0.0, 0.0);
          for (int k = 0; k < nL; ++k) {
            acc += pre * zv[k] * sufv[k + 1];
            pre *= wv[k];
          }
          base = acc;
        } else {
          base = cplx(1.0, 0.0);
          for (int k = 0; k < nL; ++k)
            base *= (k == a_star) ? leaf_val(*zeta, k, lf[k]) : wv[k];
        }
      } else {
        base = cplx(1.0, 0.0);
        for (int k = 0; k < nL; ++k) base *= wv[k];
      }
      if (base == cplx(0.0)) continue;
      cplx term = pref_const * std::polar(1.0, t_time * (double)cum) * base *
                  (w / divprod);
      out.at((int)xi) += term;
    }
  };

  auto rec = [&](auto&& self, int i) -> void {
    if (i == nL - 1) {
      process();
      return;
    }
    for (int v = -X; v <= X; ++v) {
      lf[i] = v;
      wv[i] = leaf_val(vp, i, v);
      if (mode == TreeMode::Remainder) {
        if (leibniz)
          zv[i] = leaf_val(*zeta, i, v);
        else if (i != a_star && wv[i] == cplx(0.0))
          continue;
      } else if (wv[i] == cplx(0.0)) {
        continue;
      }
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace tree_detail

inline SpectralField tree_operator(const Tree& t, const SpectralField& vp,
                                   double M, TreeMode mode,
                                   const NfrParams& par = {}, int a_star = -1,
                                   const SpectralField* zeta = nullptr) {
  return tree_detail::eval(t, vp, M, mode, a_star, zeta, false, par);
}

// Σ_{a*} remainder(a*, ζ) in a single lattice pass.
inline SpectralField tree_remainder_sum(const Tree& t, const SpectralField& vp,
                                        double M, const SpectralField& zeta,
                                        const NfrParams& par = {}) {
  return tree_detail::eval(t, vp, M, TreeMode::Remainder, -1, &zeta, true, par);
}

// ---------------------------------------------------------------------------
// Remainder norm: Ĥ^{−1/2} of Σ_{T ∈ 𝔗(J)} N^(J;T)_full[ϖ].
// J = 1,2 use exact collapsed forms (J=2 full-mode factorizes: the inner
// generation is the whole case-A cubic, so the tree sum over 𝔗(2) equals the
// case-A three-slot Leibniz substitution of N^A[ϖ] with boundary weight);
// J = 3 is the direct nested sum under the budget guard.
// ---------------------------------------------------------------------------
inline SpectralField generation_sum(int J, const SpectralField& vp, double M,
                                    const NfrParams& par = {}) {
  if (J < 1 || J > 3)
    throw std::invalid_argument("generation_sum: J must be in 1..3");
  if (J == 1) return n_case(vp, CaseLabel::A, par);
  if (J == 2) {
    SpectralField zeta = n_case(vp, CaseLabel::A, par);
    return gen1_sum(vp, &zeta, Gen1Mode::Remainder, mask_only(CaseLabel::A), M,
                    par);
  }
  SpectralField out(vp.lat, vp.t);
  for (const Tree& t : enumerate_trees(J))
    out += tree_operator(t, vp, M, TreeMode::Full, par);
  return out;
}

inline double remainder_norm(int J, const SpectralField& vp, double M,
                             const NfrParams& par = {}) {
  return sobolev(generation_sum(J, vp, M, par), -0.5);
}

// ---------------------------------------------------------------------------
// Generation-J equation residual along a solved ω-trajectory (interaction
// convention, ϖ = ω − W₀[ω]):
//   ϖ(t) = ϖ(0) + ∫ W₁[ω]
//          + Σ_{j≤J} (−1)^{j−1} Σ_{T∈𝔗(j)} { ∫ N_R + N₀|₀^t + Σ_{a*} ∫ N₁[ϖ, W₁[ω]] }
//          + (−1)^J Σ_{𝔗(J+1)} ∫ N^(J+1)[ϖ],
// the alternating signs coming from the −N^(J+1) orientation of the
// remainder slots.  Reports the max-over-time Ĥ^{−1/2} residual, plus the
// Ĥ^{1/2} size of each generation's accumulated contribution at the final
// time (the J-truncated partial sums) and the smallness flags.
// ---------------------------------------------------------------------------
struct GenerationResidual {
  double residual = 0.0;
  std::vector<double> generation_h12;  // per j = 1..J, at the final time
  double tail_h12 = 0.0;               // the (−1)^J ∫ Σ N^(J+1) correction
  bool smallness_tm = false;           // T·M ≤ 1
  bool smallness_varpi = false;        // M^{−1/2+} ‖ϖ‖² < 1
};

inline GenerationResidual generation_equation_residual(
    const Trajectory& vp_traj, const Trajectory& om_traj, int J, double M,
    const NfrParams& par = {}) {
  int n = om_traj.size();
  if (n < 2 || vp_traj.size() != n)
    throw std::invalid_argument("generation_equation_residual: trajectories");
  if (J < 1 || J > 2)
    throw std::invalid_argument(
        "generation_equation_residual: J must be 1 or 2 (J+1 evaluation)");
  const double dt = om_traj.dt;

  std::vector<std::vector<Tree>> gens(J + 2);
  for (int j = 1; j <= J; ++j) gens[j] = enumerate_trees(j);

  std::vector<SpectralField> w1(n, SpectralField(om_traj.lat, 0.0));
  // per generation j: integrand G_j = Σ_T (N_R + Σ_{a*} N₁[ϖ, W₁]) and
  // boundary B_j = Σ_T N₀; tail C = Σ_{𝔗(J+1)} N^(J+1)
  std::vector<std::vector<SpectralField>> G(J + 1), B(J + 1);
  std::vector<SpectralField> C(n, SpectralField(om_traj.lat, 0.0));
  for (int j = 1; j <= J; ++j) {
    G[j].assign(n, SpectralField(om_traj.lat, 0.0));
    B[j].assign(n, SpectralField(om_traj.lat, 0.0));
  }
  for (int k = 0; k < n; ++k) {
    const SpectralField& om = om_traj.fields[k];
    const SpectralField& vp = vp_traj.fields[k];
    w1[k] = w1_term(om, M, par);
    for (int j = 1; j <= J; ++j)
      for (const Tree& t : gens[j]) {
        G[j][k] += tree_operator(t, vp, M, TreeMode::R, par);
        G[j][k] += tree_remainder_sum(t, vp, M, w1[k], par);
        B[j][k] += tree_operator(t, vp, M, TreeMode::Boundary, par);
      }
    C[k] = generation_sum(J + 1, vp, M, par);
  }

  GenerationResidual res;
  res.generation_h12.assign(J, 0.0);
  double worst = 0.0;
  for (int k = 1; k < n; ++k) {
    auto wts = simpson_weights(k + 1, dt);
    auto integral = [&](const std::vector<SpectralField>& f) {
      SpectralField acc(om_traj.lat, 0.0);
      for (int m = 0; m <= k; ++m) {
        SpectralField g = f[m];
        g *= cplx(wts[m]);
        acc += g;
      }
      return acc;
    };
    SpectralField acc = vp_traj.fields[k];
    acc -= vp_traj.fields[0];
    acc -= integral(w1);
    double sgn = 1.0;
    for (int j = 1; j <= J; ++j, sgn = -sgn) {
      SpectralField gj = integral(G[j]);
      gj += B[j][k];
      gj -= B[j][0];
      gj *= cplx(sgn);
      acc -= gj;
      if (k == n - 1) res.generation_h12[j - 1] = sobolev(gj, 0.5);
    }
    SpectralField tail = integral(C);
    tail *= cplx(sgn);
    acc -= tail;
    if (k == n - 1) res.tail_h12 = sobolev(tail, 0.5);
    worst = std::max(worst, sobolev(acc, -0.5));
  }
  res.residual = worst;
  double T = dt * (n - 1);
  res.smallness_tm = T * M <= 1.0;
  res.smallness_varpi = varpi_smallness_ok(vp_traj.fields[0], M);
  return res;
}

inline GenerationResidual generation_equation_residual(
    const Trajectory& om_traj, int J, double M, const NfrParams& par = {}) {
  return generation_equation_residual(varpi(om_traj, M, par), om_traj, J, M,
                                      par);
}

}  // namespace nfr

#endif  // NFR_TREES_HPP_
