// core.hpp
// Frequency lattice, spectral/physical fields, FFTW-backed transforms and
// exact (zero-padded) products on the torus [0,2π).
//
// Conventions (documented contract):
//   û(ξ)   = (√(2π)/Ng) Σ_m u(x_m) e^{−iξ x_m}
//   u(x_m) = (1/√(2π))  Σ_ξ  û(ξ) e^{iξ x_m}
// so the discrete Plancherel identity reads ∫|u|²dx = Σ_ξ |û(ξ)|², and
// F[uv] = (1/√(2π)) û*v̂ — products computed in physical space on a grid with
// enough points are exact (no aliasing) and carry all constants.

#ifndef NFR_CORE_HPP_
#define NFR_CORE_HPP_

#include <cassert>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <fftw3.h>

namespace nfr {

using cplx = std::complex<double>;
constexpr double PI = 3.14159265358979323846;
constexpr double TWO_PI = 2.0 * PI;
inline const double SQRT_2PI = std::sqrt(TWO_PI);

inline int next_pow2(int n) {
  int p = 1;
  while (p < n) p *= 2;
  return p;
}

// ---------------------------------------------------------------------------
// FrequencyLattice: modes ξ ∈ [−xi_max, xi_max], period 2π, power-of-two grid.
// ---------------------------------------------------------------------------
struct FrequencyLattice {
  int xi_max = 0;
  int grid_points = 0;

  FrequencyLattice() = default;
  explicit FrequencyLattice(int xi_max_, int grid = 0) : xi_max(xi_max_) {
    if (xi_max < 4) throw std::invalid_argument("FrequencyLattice: xi_max >= 4 required");
    // Default grid is cubic-exact: products of three lattice fields have
    // modes up to 3·xi_max, needing ≥ 6·xi_max+1 points.
    grid_points = grid > 0 ? grid : next_pow2(6 * xi_max + 1);
    if (grid_points != next_pow2(grid_points))
      throw std::invalid_argument("FrequencyLattice: grid_points must be a power of two");
    if (grid_points < 2 * (2 * xi_max + 1))
      throw std::invalid_argument("FrequencyLattice: grid too small for dealiased products");
  }
  int n_modes() const { return 2 * xi_max + 1; }
  bool operator==(const FrequencyLattice& o) const {
    return xi_max == o.xi_max && grid_points == o.grid_points;
  }
};

// ---------------------------------------------------------------------------
// SpectralField: complex coefficients c(ξ), ξ ∈ [−X, X], at a fixed time t.
// ---------------------------------------------------------------------------
struct SpectralField {
  FrequencyLattice lat;
  double t = 0.0;
  std::vector<cplx> c;  // index ξ + xi_max

  SpectralField() = default;
  explicit SpectralField(const FrequencyLattice& l, double time = 0.0)
      : lat(l), t(time), c(l.n_modes(), cplx(0.0)) {}

  int X() const { return lat.xi_max; }
  cplx& at(int xi) { return c[xi + lat.xi_max]; }
  const cplx& at(int xi) const { return c[xi + lat.xi_max]; }
  // Zero-extended access (handy inside convolution sums).
  cplx get(int xi) const {
    return (xi < -lat.xi_max || xi > lat.xi_max) ? cplx(0.0) : c[xi + lat.xi_max];
  }
  // Conjugate reflection f*(ξ) = conj(f(−ξ)).
  cplx star(int xi) const { return std::conj(get(-xi)); }

  SpectralField& operator+=(const SpectralField& o) {
    assert(c.size() == o.c.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    assert(c.size() == o.c.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] -= o.c[i];
    return *this;
  }
  SpectralField& operator*=(cplx a) {
    for (auto& v : c) v *= a;
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(cplx a, SpectralField f) { return f *= a; }

  double l2() const {
    double s = 0;
    for (const auto& v : c) s += std::norm(v);
    return std::sqrt(s);
  }
};

// ---------------------------------------------------------------------------
// PhysicalField: samples on the uniform grid x_m = 2π m / Ng.
// ---------------------------------------------------------------------------
struct PhysicalField {
  FrequencyLattice lat;
  double t = 0.0;
  std::vector<cplx> s;  // size lat.grid_points

  PhysicalField() = default;
  explicit PhysicalField(const FrequencyLattice& l, double time = 0.0)
      : lat(l), t(time), s(l.grid_points, cplx(0.0)) {}
  double x(int m) const { return TWO_PI * m / lat.grid_points; }
};

// ---------------------------------------------------------------------------
// FFT engine: cached FFTW plans per grid size. Complex-to-complex, in place on
// internal buffers. Thread-safe plan creation; execution serialized per size.
// ---------------------------------------------------------------------------
class FftEngine {
 public:
  static FftEngine& instance() {
    static FftEngine e;
    return e;
  }

  // raw DFT: out[k] = Σ_m in[m] e^{−2πi k m / N} (sign −1) or +1.
  void dft(std::vector<cplx>& data, int sign) {
    const int N = static_cast<int>(data.size());
    Plans& p = plans(N);
    std::lock_guard<std::mutex> lk(p.mtx);
    auto* buf = reinterpret_cast<fftw_complex*>(p.buf);
    for (int i = 0; i < N; ++i) {
      buf[i][0] = data[i].real();
      buf[i][1] = data[i].imag();
    }
    fftw_execute(sign < 0 ? p.fwd : p.bwd);
    for (int i = 0; i < N; ++i) data[i] = cplx(buf[i][0], buf[i][1]);
  }

 private:
  struct Plans {
    fftw_plan fwd = nullptr, bwd = nullptr;
    cplx* buf = nullptr;
    std::mutex mtx;
    ~Plans() {
      if (fwd) fftw_destroy_plan(fwd);
      if (bwd) fftw_destroy_plan(bwd);
      if (buf) fftw_free(buf);
    }
  };
  std::mutex map_mtx_;
  std::map<int, std::unique_ptr<Plans>> plans_;

  Plans& plans(int N) {
    std::lock_guard<std::mutex> lk(map_mtx_);
    auto& up = plans_[N];
    if (!up) {
      up = std::make_unique<Plans>();
      up->buf = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * N));
      auto* b = reinterpret_cast<fftw_complex*>(up->buf);
      up->fwd = fftw_plan_dft_1d(N, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
      up->bwd = fftw_plan_dft_1d(N, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    return *up;
  }
};

// ---------------------------------------------------------------------------
// Transforms.
// ---------------------------------------------------------------------------
inline SpectralField fft_forward(const PhysicalField& u) {
  const int Ng = u.lat.grid_points;
  std::vector<cplx> buf = u.s;
  FftEngine::instance().dft(buf, -1);  // Σ_m u_m e^{−2πi k m/Ng}
  SpectralField out(u.lat, u.t);
  const double scale = SQRT_2PI / Ng;
  for (int xi = -u.lat.xi_max; xi <= u.lat.xi_max; ++xi) {
    int k = (xi % Ng + Ng) % Ng;
    out.at(xi) = scale * buf[k];
  }
  return out;
}

inline PhysicalField fft_inverse(const SpectralField& f) {
  const int Ng = f.lat.grid_points;
  std::vector<cplx> buf(Ng, cplx(0.0));
  for (int xi = -f.lat.xi_max; xi <= f.lat.xi_max; ++xi) {
    int k = (xi % Ng + Ng) % Ng;
    buf[k] = f.at(xi);
  }
  FftEngine::instance().dft(buf, +1);  // Σ_k buf_k e^{+2πi k m/Ng}
  PhysicalField out(f.lat, f.t);
  const double scale = 1.0 / SQRT_2PI;
  for (int m = 0; m < Ng; ++m) out.s[m] = scale * buf[m];
  return out;
}

// Direct O(n·Ng) DFT oracle for the forward transform.
inline SpectralField dft_forward_oracle(const PhysicalField& u) {
  const int Ng = u.lat.grid_points;
  SpectralField out(u.lat, u.t);
  for (int xi = -u.lat.xi_max; xi <= u.lat.xi_max; ++xi) {
    cplx acc(0.0);
    for (int m = 0; m < Ng; ++m) {
      double ph = -xi * (TWO_PI * m / Ng);
      acc += u.s[m] * cplx(std::cos(ph), std::sin(ph));
    }
    out.at(xi) = SQRT_2PI / Ng * acc;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact multilinear products. Each factor may be conjugated and/or
// differentiated (∂_x ↔ iξ) before multiplying. The result is the exact
// band-limited product truncated back to `out_lat` (which may be wider than
// the inputs' lattice). No aliasing: the work grid resolves the full support.
// ---------------------------------------------------------------------------
struct Factor {
  const SpectralField* f;
  bool conj = false;
  int deriv = 0;  // apply (iξ)^deriv before transforming
};

inline SpectralField exact_product(const std::vector<Factor>& fs,
                                   const FrequencyLattice& out_lat, double t) {
  int total_half = 0;
  for (const auto& fc : fs) total_half += fc.f->lat.xi_max;
  const int Ng = next_pow2(2 * total_half + 2);
  // physical samples of each (possibly conj/derived) factor on the work grid
  std::vector<cplx> prod(Ng, cplx(1.0));
  for (const auto& fc : fs) {
    std::vector<cplx> buf(Ng, cplx(0.0));
    const SpectralField& f = *fc.f;
    for (int xi = -f.lat.xi_max; xi <= f.lat.xi_max; ++xi) {
      cplx v = f.at(xi);
      for (int d = 0; d < fc.deriv; ++d) v *= cplx(0.0, xi);
      int k = (xi % Ng + Ng) % Ng;
      buf[k] = v;
    }
    FftEngine::instance().dft(buf, +1);
    if (fc.conj)
      for (int m = 0; m < Ng; ++m) prod[m] *= std::conj(buf[m]) / SQRT_2PI;
    else
      for (int m = 0; m < Ng; ++m) prod[m] *= buf[m] / SQRT_2PI;
  }
  FftEngine::instance().dft(prod, -1);
  SpectralField out(out_lat, t);
  const double scale = SQRT_2PI / Ng;
  for (int xi = -out_lat.xi_max; xi <= out_lat.xi_max; ++xi) {
    int k = (xi % Ng + Ng) % Ng;
    out.at(xi) = scale * prod[k];
  }
  return out;
}

// Mean (zero-mode) projector P_c on the physical side equals the ξ=0
// coefficient over √(2π): P_c f = f̂(0)/√(2π).
inline cplx mean_value(const SpectralField& f) { return f.at(0) / SQRT_2PI; }

inline SpectralField project_nonconstant(SpectralField f) {
  f.at(0) = 0.0;
  return f;
}

// Spectral derivative and antiderivative (zero mode → 0).
inline SpectralField derivative(SpectralField f) {
  for (int xi = -f.X(); xi <= f.X(); ++xi) f.at(xi) *= cplx(0.0, xi);
  return f;
}
inline SpectralField antiderivative_spectral(SpectralField f) {
  f.at(0) = 0.0;
  for (int xi = -f.X(); xi <= f.X(); ++xi)
    if (xi != 0) f.at(xi) /= cplx(0.0, xi);
  return f;
}

// Free propagator S(t) on coefficients: û ↦ e^{−itξ²}û.
inline SpectralField free_flow(SpectralField f, double dt) {
  for (int xi = -f.X(); xi <= f.X(); ++xi) {
    double ph = -dt * double(xi) * xi;
    f.at(xi) *= cplx(std::cos(ph), std::sin(ph));
  }
  return f;
}

}  // namespace nfr

#endif  // NFR_CORE_HPP_
