#include <doctest.h>

#include "nfr/core.hpp"
#include "nfr/cutoffs.hpp"
#include "nfr/norms.hpp"
#include "test_util.hpp"

using namespace nfr;

TEST_CASE("fft: constant field lives at xi=0 only") {
  FrequencyLattice lat(8);
  PhysicalField u(lat);
  for (auto& v : u.s) v = 1.0;
  auto f = fft_forward(u);
  for (int xi = -8; xi <= 8; ++xi) {
    if (xi == 0)
      CHECK(std::abs(f.at(0) - cplx(SQRT_2PI)) < 1e-12);
    else
      CHECK(std::abs(f.at(xi)) < 1e-12);
  }
}

TEST_CASE("fft: e^{i3x} is a single mode at xi=3") {
  FrequencyLattice lat(8);
  PhysicalField u(lat);
  for (int m = 0; m < lat.grid_points; ++m)
    u.s[m] = std::polar(1.0, 3.0 * u.x(m));
  auto f = fft_forward(u);
  for (int xi = -8; xi <= 8; ++xi) {
    double expect = (xi == 3) ? SQRT_2PI : 0.0;
    CHECK(std::abs(f.at(xi) - cplx(expect)) < 1e-12);
  }
}

TEST_CASE("fft: round trip and Plancherel vs direct DFT oracle") {
  for (int X : {8, 16, 64}) {
    FrequencyLattice lat(X);
    auto f = test_util::random_field(lat, 42 + X);
    auto u = fft_inverse(f);
    auto f2 = fft_forward(u);
    double rel = (f2 - f).l2() / f.l2();
    CHECK(rel < 1e-12);
    // Plancherel: grid L2 of u equals coefficient l2
    double gl2 = lp_norm(u, 2.0);
    CHECK(std::abs(gl2 - f.l2()) / f.l2() < 1e-12);
    // direct DFT oracle
    auto fo = dft_forward_oracle(u);
    CHECK((fo - f).l2() / f.l2() < 1e-10);
  }
}

TEST_CASE("eta: sandwich and monotonicity") {
  CHECK(eta(1.0) == 1.0);
  CHECK(eta(1.25) == 1.0);
  CHECK(eta(1.7) == 0.0);
  CHECK(eta(1.6) == 0.0);
  double v = eta(1.45);
  CHECK(v > 0.0);
  CHECK(v < 1.0);
  CHECK(v < eta(1.4));
  CHECK(v > eta(1.5));
  CHECK(eta(-1.45) == v);  // even
}

TEST_CASE("psi: partition of unity and supports") {
  for (int X : {8, 16, 33}) {
    for (int xi = -X; xi <= X; ++xi) {
      double s = 0;
      for (int N : dyadic_scales(X)) s += psi(N, xi);
      CHECK(std::abs(s - 1.0) < 1e-12);
    }
  }
  // support in I_N
  for (int N : {2, 4, 8, 16}) {
    for (int xi = -3 * N; xi <= 3 * N; ++xi) {
      if (psi(N, xi) != 0.0) CHECK(in_I(N, xi));
    }
  }
  // single mode xi=3 vanishes under P_1
  FrequencyLattice lat(8);
  SpectralField f(lat);
  f.at(3) = 1.0;
  CHECK(lp_project(f, 1).l2() == 0.0);
  // psi_4(6) + psi_8(6) = 1
  CHECK(std::abs(psi(4, 6) + psi(8, 6) - 1.0) < 1e-12);
  // psi_tilde covers psi
  for (int N : {1, 2, 4, 8, 16})
    for (int xi = -40; xi <= 40; ++xi)
      if (psi(N, xi) > 1e-14) CHECK(psi_tilde(N, xi) == 1.0);
}

TEST_CASE("lp projections reassemble the field") {
  FrequencyLattice lat(16);
  auto f = test_util::random_field(lat, 7);
  SpectralField acc(lat);
  for (int N : dyadic_scales(16)) acc += lp_project(f, N);
  CHECK((acc - f).l2() < 1e-12 * f.l2());
  auto leq = lp_project_leq(f, dyadic_scales(16).back());
  CHECK((leq - f).l2() < 1e-12 * f.l2());
}

TEST_CASE("norms: single mode, monotonicity, Besov equivalence") {
  FrequencyLattice lat(16);
  SpectralField f(lat);
  f.at(3) = 1.0;
  CHECK(std::abs(sobolev(f, 1.0) - std::sqrt(10.0)) < 1e-12);
  CHECK(sobolev(SpectralField(lat), 0.5) == 0.0);

  auto g = test_util::random_rough_field(lat, 11);
  CHECK(sobolev(g, 0.25) <= sobolev(g, 0.5) + 1e-14);
  CHECK(sobolev(g, 0.5) <= sobolev(g, 1.0) + 1e-14);
  for (double s : {0.0, 0.5}) {
    double hs = sobolev(g, s), b22 = besov(g, s, 2.0, 2.0);
    double ratio = hs / b22;
    CHECK(ratio > 0.25);
    CHECK(ratio < 4.0);
  }
}

TEST_CASE("exact_product matches direct convolution") {
  FrequencyLattice lat(8);
  auto a = test_util::random_field(lat, 1);
  auto b = test_util::random_field(lat, 2);
  // F[a·conj(b)](xi) = (1/sqrt(2pi)) sum_{x1} a(x1) conj(b(x1-xi))
  auto p = exact_product({{&a, false, 0}, {&b, true, 0}}, lat, 0.0);
  for (int xi = -8; xi <= 8; ++xi) {
    cplx acc(0.0);
    for (int x1 = -8; x1 <= 8; ++x1) acc += a.get(x1) * std::conj(b.get(x1 - xi));
    acc /= SQRT_2PI;
    CHECK(std::abs(p.at(xi) - acc) < 1e-12);
  }
}

TEST_CASE("simpson: exact on cubics") {
  int n = 9;
  double h = 0.1;
  auto w = simpson_weights(n, h);
  double acc = 0, t3 = 0;
  for (int k = 0; k < n; ++k) {
    double t = k * h;
    acc += w[k];
    t3 += w[k] * t * t * t;
  }
  double T = (n - 1) * h;
  CHECK(std::abs(acc - T) < 1e-14);
  CHECK(std::abs(t3 - std::pow(T, 4) / 4.0) < 1e-14);
}
