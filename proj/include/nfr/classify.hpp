// classify.hpp
// Exhaustive realization of the Table-1 classification of dyadic frequency
// interactions (ξ = ξ₁+ξ₂−ξ₃, φ = 2ξ₁₃ξ₂₃, ξ₁₃ = ξ−ξ₂ = ξ₁−ξ₃,
// ξ₂₃ = ξ−ξ₁ = ξ₂−ξ₃).
//
// Gap semantics (g octaves, default 3):  a ∼ b ⇔ |lg a − lg b| ≤ g and
// a ≫ b ⇔ lg a − lg b > g.  The crisp rows below do not cover every feasible
// quadruple; the residue is assigned to the row with least octave-slack
// violation (ties by priority) and counted separately by the audit.

#ifndef NFR_CLASSIFY_HPP_
#define NFR_CLASSIFY_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "nfr/cutoffs.hpp"

namespace nfr {

enum class CaseLabel { A, B1, B2, C1, C2, D1, D2, E1, E2, E3, E4, Empty };

inline const char* label_name(CaseLabel l) {
  switch (l) {
    case CaseLabel::A: return "A";
    case CaseLabel::B1: return "B1";
    case CaseLabel::B2: return "B2";
    case CaseLabel::C1: return "C1";
    case CaseLabel::C2: return "C2";
    case CaseLabel::D1: return "D1";
    case CaseLabel::D2: return "D2";
    case CaseLabel::E1: return "E1";
    case CaseLabel::E2: return "E2";
    case CaseLabel::E3: return "E3";
    case CaseLabel::E4: return "E4";
    default: return "Empty";
  }
}

struct DyadicQuadruple {
  int N, N1, N2, N3;
  int g = 3;
};

// ---------------------------------------------------------------------------
// Feasibility: the constraint set {ξ = ξ₁+ξ₂−ξ₃, ξ∈I_N, ξ_l∈I_{N_l}} on the
// integer lattice is nonempty.  Each I_M is the symmetric pair of contiguous
// integer ranges ±[lo(M), 2M] (lo(1)=0), so an exact check needs only the
// 8 interval combinations of signs against the two target ranges.
// ---------------------------------------------------------------------------
struct AnnulusPiece {
  int lo, hi;  // contiguous integers [lo, hi]
};

inline std::array<AnnulusPiece, 2> annulus_pieces(int M) {
  int lo = (M == 1) ? 0 : (M + 1) / 2;
  int hi = 2 * M;
  if (M == 1) return {{{-2, 2}, {-2, 2}}};  // single piece, duplicated
  return {{{lo, hi}, {-hi, -lo}}};
}

inline bool feasible(const DyadicQuadruple& q) {
  auto p1 = annulus_pieces(q.N1), p2 = annulus_pieces(q.N2),
       p3 = annulus_pieces(q.N3), p0 = annulus_pieces(q.N);
  for (const auto& a : p1)
    for (const auto& b : p2)
      for (const auto& c : p3) {
        // ξ₁+ξ₂−ξ₃ spans [a.lo+b.lo−c.hi, a.hi+b.hi−c.lo]
        int lo = a.lo + b.lo - c.hi, hi = a.hi + b.hi - c.lo;
        for (const auto& t : p0)
          if (std::max(lo, t.lo) <= std::min(hi, t.hi)) return true;
      }
  return false;
}

// ---------------------------------------------------------------------------
// Classification.
// ---------------------------------------------------------------------------
namespace detail {

// One conjunct: sim (∼) or gg (≫) between two dyadic sizes (by integer log).
struct Rel {
  int a, b;    // octaves lg N_a vs lg N_b
  bool is_gg;  // true: a ≫ b; false: a ∼ b
};

// Octave-slack violation of a conjunct (0 ⇔ satisfied).
inline int violation(const Rel& r, int g) {
  int d = r.a - r.b;
  if (r.is_gg) return std::max(0, (g + 1) - d);
  return std::max(0, std::abs(d) - g);
}

struct Row {
  CaseLabel label;
  std::vector<Rel> rels;
};

// Table-1 rows on the ordered quadruple (N1 ≥ N2), by integer octaves.
inline std::vector<Row> rows(int l, int l1, int l2, int l3) {
  auto S = [](int a, int b) { return Rel{a, b, false}; };
  auto G = [](int a, int b) { return Rel{a, b, true}; };
  return {
      {CaseLabel::A, {S(l1, l), S(l2, l), S(l3, l)}},
      {CaseLabel::B1, {S(l1, l3), G(l1, l), S(l2, l)}},
      {CaseLabel::B2, {S(l1, l), G(l1, l2), S(l2, l3)}},
      {CaseLabel::C1, {S(l1, l3), G(l1, l), G(l, l2)}},
      {CaseLabel::C2, {S(l3, l), G(l, l1)}},
      {CaseLabel::D1, {S(l1, l), G(l, l2), G(l2, l3)}},
      {CaseLabel::D2, {S(l1, l), G(l, l3), G(l3, l2)}},
      {CaseLabel::E1, {S(l1, l2), S(l1, l3), S(l2, l3), G(l2, l), G(l3, l)}},
      {CaseLabel::E2, {S(l1, l2), G(l2, l3)}},
      // E3 carries the implied N3 ≫ N2 (from N3 ∼ N ≫ N2): without it, crisp
      // slack lets the I_{N2}, I_{N3} annuli touch and ξ₂₃ cancel, breaking
      // the NN₃ resonance size.
      {CaseLabel::E3, {S(l1, l3), S(l3, l), S(l1, l), G(l, l2), G(l3, l2)}},
      {CaseLabel::E4, {S(l1, l3), G(l1, l2), G(l2, l)}},
  };
}

}  // namespace detail

struct ClassifyResult {
  CaseLabel label = CaseLabel::Empty;
  bool swapped = false;    // N1 < N2 on input, classified after swap
  bool fallback = false;   // no crisp row matched; nearest row assigned
  int violation = 0;       // octave slack of the assigned row (0 unless fallback)
};

inline ClassifyResult classify_full(const DyadicQuadruple& q_in) {
  ClassifyResult res;
  if (!feasible(q_in)) return res;
  DyadicQuadruple q = q_in;
  if (q.N1 < q.N2) {
    std::swap(q.N1, q.N2);
    res.swapped = true;
  }
  int l = ilog2(q.N), l1 = ilog2(q.N1), l2 = ilog2(q.N2), l3 = ilog2(q.N3);
  auto table = detail::rows(l, l1, l2, l3);
  int best = std::numeric_limits<int>::max();
  CaseLabel best_label = CaseLabel::Empty;
  for (const auto& row : table) {
    int v = 0;
    for (const auto& r : row.rels) v += detail::violation(r, q.g);
    if (v < best) {
      best = v;
      best_label = row.label;
    }
    if (best == 0) break;  // priority order: first exact match wins
  }
  res.label = best_label;
  res.fallback = best > 0;
  res.violation = best;
  return res;
}

inline CaseLabel classify(const DyadicQuadruple& q) {
  return classify_full(q).label;
}

// ---------------------------------------------------------------------------
// Resonance size Φ (Table 1, Resonance column).  A/B rows carry non-dyadic
// |ξ₁₃|/|ξ₂₃| factors; they return 0 and set `symbolic`.
// ---------------------------------------------------------------------------
inline long long resonance_size(CaseLabel label, const DyadicQuadruple& q_in,
                                bool* symbolic = nullptr) {
  DyadicQuadruple q = q_in;
  if (q.N1 < q.N2) std::swap(q.N1, q.N2);
  if (symbolic) *symbolic = false;
  switch (label) {
    case CaseLabel::C1:
    case CaseLabel::C2:
    case CaseLabel::D2:
    case CaseLabel::E3:
      return 1LL * q.N * q.N3;
    case CaseLabel::D1:
      return 1LL * q.N * q.N2;
    case CaseLabel::E1:
      return 1LL * q.N1 * q.N3;
    case CaseLabel::E2:
      return 1LL * q.N1 * q.N1;
    case CaseLabel::E4:
      return 1LL * q.N2 * q.N3;
    default:
      if (symbolic) *symbolic = true;
      return 0;
  }
}

// ---------------------------------------------------------------------------
// min |φ| over the constraint set with |ξ₁₃| ∧ |ξ₂₃| ≥ 1 (the nonresonant
// lattice set).  Iterates s = ξ₁₃ by |s| ascending; for fixed s,
// ξ₂ ∈ C = I_{N2} ∩ (I_N − s) and ξ₃ ∈ B = I_{N3} ∩ (I_{N1} − s), and
// ξ₂₃ = ξ₂ − ξ₃ ranges over the interval difference C − B.  Early exit once
// 2|s| alone exceeds the best product.  Returns 0 if the set is empty.
// ---------------------------------------------------------------------------
namespace detail {

// Intersection pieces of I_M with a shifted annulus I_K − s.
inline std::vector<AnnulusPiece> intersect_shift(int M, int K, int s) {
  std::vector<AnnulusPiece> out;
  for (const auto& a : annulus_pieces(M)) {
    for (const auto& b : annulus_pieces(K)) {
      int lo = std::max(a.lo, b.lo - s), hi = std::min(a.hi, b.hi - s);
      if (lo <= hi) out.push_back({lo, hi});
    }
    if (M == 1) break;  // the duplicated piece
  }
  return out;
}

// min nonzero |d| over the union of interval differences {c − b}.
inline long long min_nonzero_diff(const std::vector<AnnulusPiece>& C,
                                  const std::vector<AnnulusPiece>& B) {
  long long best = std::numeric_limits<long long>::max();
  for (const auto& c : C)
    for (const auto& b : B) {
      int lo = c.lo - b.hi, hi = c.hi - b.lo;  // d ∈ [lo, hi]
      if (lo > hi) continue;
      if (lo > 0)
        best = std::min(best, (long long)lo);
      else if (hi < 0)
        best = std::min(best, (long long)-hi);
      else if (hi > 0 || lo < 0)
        best = std::min(best, 1LL);  // interval contains 0 and a neighbor
    }
  return best;
}

}  // namespace detail

inline long long min_abs_phi(const DyadicQuadruple& q) {
  long long best = std::numeric_limits<long long>::max();
  int smax = 2 * q.N + 2 * q.N2;  // |ξ₁₃| = |ξ−ξ₂| ≤ 2N + 2N₂
  for (int a = 1; a <= smax; ++a) {
    if (2LL * a >= best) break;
    for (int s : {a, -a}) {
      auto C = detail::intersect_shift(q.N2, q.N, s);
      auto B = detail::intersect_shift(q.N3, q.N1, s);
      if (C.empty() || B.empty()) continue;
      long long d = detail::min_nonzero_diff(C, B);
      if (d == std::numeric_limits<long long>::max()) continue;
      best = std::min(best, 2LL * a * d);
    }
  }
  return best == std::numeric_limits<long long>::max() ? 0 : best;
}

// Brute-force oracle for min_abs_phi (small N only).
inline long long min_abs_phi_oracle(const DyadicQuadruple& q) {
  long long best = 0;
  auto in = [&](int M, int x) { return in_I(M, x); };
  for (int x1 = -2 * q.N1; x1 <= 2 * q.N1; ++x1) {
    if (!in(q.N1, x1)) continue;
    for (int x2 = -2 * q.N2; x2 <= 2 * q.N2; ++x2) {
      if (!in(q.N2, x2)) continue;
      for (int x3 = -2 * q.N3; x3 <= 2 * q.N3; ++x3) {
        if (!in(q.N3, x3)) continue;
        int xi = x1 + x2 - x3;
        if (!in(q.N, xi)) continue;
        long long f13 = x1 - x3, f23 = x2 - x3;
        if (f13 == 0 || f23 == 0) continue;
        long long phi = 2 * std::llabs(f13) * std::llabs(f23);
        if (best == 0 || phi < best) best = phi;
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Coverage audit.
// ---------------------------------------------------------------------------
struct AuditWitness {
  DyadicQuadruple q;
  CaseLabel label;
  long long phi_table, phi_actual;
};

struct AuditReport {
  int max_N = 0, g = 0;
  long long n_total = 0, n_feasible = 0, n_fallback = 0;
  long long n_phi_checked = 0, n_phi_violations = 0;
  std::array<long long, 12> per_label{};  // indexed by CaseLabel
  std::vector<AuditWitness> violations;   // Φ-faithfulness failures
  bool pass() const { return n_phi_violations == 0; }
};

inline AuditReport coverage_audit(int max_N, int g) {
  AuditReport rep;
  rep.max_N = max_N;
  rep.g = g;
  std::vector<int> scales;
  for (int N = 1; N <= max_N; N *= 2) scales.push_back(N);
  for (int N : scales)
    for (int N1 : scales)
      for (int N2 : scales)
        for (int N3 : scales) {
          ++rep.n_total;
          DyadicQuadruple q{N, N1, N2, N3, g};
          auto res = classify_full(q);
          if (res.label == CaseLabel::Empty) continue;
          ++rep.n_feasible;
          ++rep.per_label[static_cast<int>(res.label)];
          // symmetry invariant: N1 ↔ N2 swap must not change the label
          DyadicQuadruple qs{N, N2, N1, N3, g};
          if (classify(qs) != res.label) {
            ++rep.n_phi_violations;
            rep.violations.push_back({q, res.label, -1, -1});
            continue;
          }
          if (res.fallback) {
            ++rep.n_fallback;
            continue;  // Φ faithfulness is only asserted for crisp rows
          }
          bool symbolic = false;
          long long phi = resonance_size(res.label, q, &symbolic);
          if (symbolic) continue;
          long long actual = min_abs_phi(q);
          ++rep.n_phi_checked;
          if (actual == 0) continue;  // nonresonant set empty
          // compare dyadic-to-dyadic: round the measured min to a power of two
          long long dy = 1LL << std::llround(std::log2(double(actual)));
          double ratio = double(phi) / double(dy);
          double hi = std::pow(2.0, g + 2), lo = 1.0 / hi;
          if (ratio < lo || ratio > hi) {
            ++rep.n_phi_violations;
            if (rep.violations.size() < 32)
              rep.violations.push_back({q, res.label, phi, actual});
          }
        }
  return rep;
}

}  // namespace nfr

#endif  // NFR_CLASSIFY_HPP_
