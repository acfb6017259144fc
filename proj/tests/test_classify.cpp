#include <doctest.h>

#include <random>

#include "nfr/classify.hpp"

using namespace nfr;

TEST_CASE("feasible: spec examples and brute-force agreement") {
  CHECK(feasible({1, 1, 1, 1, 3}));
  CHECK_FALSE(feasible({64, 1, 1, 1, 3}));
  // brute force over the integer lattice for all dyadic quadruples <= 64
  auto brute = [](const DyadicQuadruple& q) {
    for (int x1 = -2 * q.N1; x1 <= 2 * q.N1; ++x1) {
      if (!in_I(q.N1, x1)) continue;
      for (int x2 = -2 * q.N2; x2 <= 2 * q.N2; ++x2) {
        if (!in_I(q.N2, x2)) continue;
        for (int x3 = -2 * q.N3; x3 <= 2 * q.N3; ++x3)
          if (in_I(q.N3, x3) && in_I(q.N, x1 + x2 - x3)) return true;
      }
    }
    return false;
  };
  for (int N = 1; N <= 64; N *= 2)
    for (int N1 = 1; N1 <= 64; N1 *= 2)
      for (int N2 = 1; N2 <= 64; N2 *= 2)
        for (int N3 = 1; N3 <= 64; N3 *= 2) {
          DyadicQuadruple q{N, N1, N2, N3, 3};
          CHECK(feasible(q) == brute(q));
        }
}

TEST_CASE("classify: pinned Table-1 examples") {
  CHECK(classify({8, 8, 8, 8, 3}) == CaseLabel::A);
  CHECK(classify({2, 128, 1, 128, 3}) == CaseLabel::B1);
  CHECK(classify({128, 8, 4, 128, 3}) == CaseLabel::C2);
  CHECK(classify({64, 1, 1, 1, 3}) == CaseLabel::Empty);
  // N1 <-> N2 symmetry with swap recorded
  auto r = classify_full({2, 1, 128, 128, 3});
  CHECK(r.label == CaseLabel::B1);
  CHECK(r.swapped);
  // further rows
  CHECK(classify({256, 256, 16, 1, 3}) == CaseLabel::D1);
  CHECK(classify({256, 256, 1, 16, 3}) == CaseLabel::D2);
  CHECK(classify({1, 64, 64, 128, 3}) == CaseLabel::E1);
  CHECK(classify({128, 128, 128, 1, 3}) == CaseLabel::E2);
  CHECK(classify({128, 128, 1, 128, 3}) == CaseLabel::E3);
  CHECK(classify({1, 256, 16, 256, 3}) == CaseLabel::E4);
  CHECK(classify({16, 256, 1, 256, 3}) == CaseLabel::C1);
}

TEST_CASE("resonance_size: table column") {
  bool sym = false;
  CHECK(resonance_size(CaseLabel::E2, {1, 64, 64, 1, 3}, &sym) == 4096);
  CHECK_FALSE(sym);
  CHECK(resonance_size(CaseLabel::D1, {32, 32, 4, 1, 3}) == 128);
  CHECK(resonance_size(CaseLabel::C1, {16, 256, 1, 256, 3}) == 16 * 256);
  resonance_size(CaseLabel::A, {8, 8, 8, 8, 3}, &sym);
  CHECK(sym);
  resonance_size(CaseLabel::B1, {2, 128, 1, 128, 3}, &sym);
  CHECK(sym);
}

TEST_CASE("min_abs_phi: fast search agrees with brute oracle") {
  std::mt19937_64 rng(404);
  std::vector<int> scales{1, 2, 4, 8, 16, 32};
  int checked = 0;
  for (int it = 0; it < 400 && checked < 120; ++it) {
    DyadicQuadruple q{scales[rng() % 6], scales[rng() % 6], scales[rng() % 6],
                      scales[rng() % 6], 3};
    if (!feasible(q)) continue;
    ++checked;
    CHECK(min_abs_phi(q) == min_abs_phi_oracle(q));
  }
  CHECK(checked >= 100);
}

TEST_CASE("coverage audit: totality, symmetry and resonance faithfulness") {
  for (int g : {2, 3, 4}) {
    auto rep = coverage_audit(256, g);
    CHECK(rep.pass());
    CHECK(rep.n_feasible > 0);
    // every feasible quadruple got exactly one non-Empty label
    long long labeled = 0;
    for (int i = 0; i < 11; ++i) labeled += rep.per_label[i];
    CHECK(labeled == rep.n_feasible);
  }
  // g=0 collapses the thresholds: fallback assignments appear
  auto degen = coverage_audit(64, 0);
  CHECK(degen.n_fallback > 0);
}
