#include <doctest.h>

#include "nfr/dynamics.hpp"
#include "test_util.hpp"

using namespace nfr;

TEST_CASE("solver: zero data stays zero") {
  FrequencyLattice lat(8);
  SolveConfig cfg;
  cfg.T = 0.05;
  auto traj = solve(SpectralField(lat), cfg);
  for (const auto& f : traj.fields) CHECK(f.l2() == 0.0);
}

TEST_CASE("solver: lambda=0 reproduces the free Schroedinger phase") {
  FrequencyLattice lat(8);
  auto u0 = data_plane_wave(lat, 3);
  SolveConfig cfg;
  cfg.lambda = 0.0;
  cfg.T = 0.05;
  auto traj = solve(u0, cfg);
  const auto& uf = traj.fields.back();
  double T = uf.t;
  // e^{i3x} -> e^{i3x - i9t}
  cplx expect = SQRT_2PI * std::polar(1.0, -9.0 * T);
  CHECK(std::abs(uf.at(3) - expect) < 1e-12);
  for (int xi = -8; xi <= 8; ++xi)
    if (xi != 3) CHECK(std::abs(uf.at(xi)) < 1e-13);
  CHECK(l2_drift(traj) < 1e-13);
}

TEST_CASE("solver: plane wave keeps single-mode modulus") {
  FrequencyLattice lat(8);
  auto u0 = data_plane_wave(lat, 2, 0.7);
  SolveConfig cfg;
  cfg.T = 0.05;
  auto traj = solve(u0, cfg);
  for (const auto& f : traj.fields) {
    CHECK(std::abs(std::abs(f.at(2)) - 0.7 * SQRT_2PI) < 1e-10);
  }
}

TEST_CASE("solver: 4th-order self convergence") {
  FrequencyLattice lat(8);
  auto u0 = test_util::random_field(lat, 5);
  SolveConfig cfg;
  cfg.T = 0.04;
  cfg.dt = 0.004;
  auto c1 = solve(u0, cfg);
  cfg.dt = 0.002;
  auto c2 = solve(u0, cfg);
  cfg.dt = 0.001;
  auto c3 = solve(u0, cfg);
  double e1 = (c1.fields.back() - c3.fields.back()).l2();
  double e2 = (c2.fields.back() - c3.fields.back()).l2();
  // Richardson: errors vs the fine run shrink ~16x per halving (ratio of
  // (16-1)... use loose 10x)
  CHECK(e1 / e2 > 10.0);
}

TEST_CASE("solver: L2 drift small and improves with dt") {
  FrequencyLattice lat(8);
  auto u0 = test_util::random_field(lat, 9);
  SolveConfig cfg;
  cfg.T = 0.04;
  cfg.dt = 0.004;
  double d1 = l2_drift(solve(u0, cfg));
  cfg.dt = 0.002;
  double d2 = l2_drift(solve(u0, cfg));
  CHECK(d1 < 1e-6);
  CHECK(d1 / std::max(d2, 1e-300) > 8.0);
}

TEST_CASE("interaction representation: identity at t=0 and round trip") {
  FrequencyLattice lat(8);
  auto u0 = test_util::random_field(lat, 3);
  auto w0 = interaction_rep(u0);
  CHECK((w0 - u0).l2() < 1e-15);
  SolveConfig cfg;
  cfg.T = 0.02;
  auto traj = solve(u0, cfg);
  auto om = interaction_rep(traj);
  auto back = physical_rep(om);
  for (int k = 0; k < traj.size(); ++k)
    CHECK((back.fields[k] - traj.fields[k]).l2() < 1e-13);
  // lambda=0: omega constant in time
  cfg.lambda = 0.0;
  auto lin = interaction_rep(solve(u0, cfg));
  for (const auto& f : lin.fields) CHECK((f - lin.fields.front()).l2() < 1e-12);
}

TEST_CASE("duhamel residual: trivial cases and refinement decay") {
  FrequencyLattice lat(8);
  auto u0 = test_util::random_field(lat, 17);
  SolveConfig cfg;
  cfg.T = 0.04;
  cfg.dt = 0.004;
  cfg.lambda = 0.0;
  auto lin = solve(u0, cfg);
  CHECK(duhamel_residual(lin, 0, lin.size() - 1) < 1e-12);
  cfg.lambda = -1.0;
  auto t1 = solve(u0, cfg);
  CHECK(duhamel_residual(t1, 0, 0) == 0.0);
  double r1 = duhamel_residual(t1, 0, t1.size() - 1);
  cfg.dt = 0.002;
  auto t2 = solve(u0, cfg);
  double r2 = duhamel_residual(t2, 0, t2.size() - 1);
  CHECK(r1 / std::max(r2, 1e-300) > 8.0);
}

TEST_CASE("strichartz profile: single mode and linear-flow fit") {
  FrequencyLattice lat(16);
  SolveConfig cfg;
  cfg.T = 0.1;
  cfg.dt = 1.0 / 640.0;
  cfg.lambda = 0.0;
  {
    auto traj = solve(data_plane_wave(lat, 5), cfg);
    auto prof = strichartz_profile(traj);
    int nz = 0;
    for (double v : prof.norm)
      if (v > 1e-12) ++nz;
    CHECK(nz == 1);
  }
  {
    auto traj = solve(data_random_h12(lat, 23), cfg);
    auto prof = strichartz_profile(traj);
    CHECK(prof.fit_valid);
  }
}

TEST_CASE("w-equation solver runs and conserves L2") {
  FrequencyLattice lat(8);
  auto w0 = test_util::random_field(lat, 31, 0.05, 0.8);
  SolveConfig cfg;
  cfg.model = Model::w_equation;
  cfg.T = 0.02;
  cfg.dt = 0.002;
  auto traj = solve(w0, cfg);
  CHECK(l2_drift(traj) < 1e-7);
}

TEST_CASE("rk2 twin agrees with rk4 at 2nd order") {
  FrequencyLattice lat(8);
  auto u0 = test_util::random_field(lat, 41);
  SolveConfig cfg;
  cfg.T = 0.04;
  cfg.dt = 0.004;
  auto a4 = solve(u0, cfg);
  cfg.rk_order = 2;
  auto a2 = solve(u0, cfg);
  double e1 = (a2.fields.back() - a4.fields.back()).l2();
  cfg.dt = 0.002;
  auto b2 = solve(u0, cfg);
  cfg.rk_order = 4;
  auto b4 = solve(u0, cfg);
  double e2 = (b2.fields.back() - b4.fields.back()).l2();
  CHECK(e1 / std::max(e2, 1e-300) > 3.0);  // ~4x for 2nd order
  CHECK(e1 < 1e-4);
}

TEST_CASE("solver guards: dt cap and blow-up") {
  FrequencyLattice lat(8);
  SolveConfig cfg;
  cfg.dt = 0.5;  // violates 0.5/64
  CHECK_THROWS(solve(SpectralField(lat), cfg));
  SolveConfig big;
  big.T = 0.05;
  big.blowup_guard = 1e-3;
  auto u0 = test_util::random_field(lat, 1);
  CHECK_THROWS(solve(u0, big));
}
