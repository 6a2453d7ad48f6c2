#pragma once

// Exact quantum references: the momentum-integral form of the folding kernel
// on a contour whose tails are rotated into the decay wedges of
// exp{i g tau p^3 / 3 hbar}, and a split-operator grid propagator for
// H = p^2/2 + V(q). Link against fftw3 when using grid_propagate.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hkfold/errors.hpp"
#include "hkfold/folding_model.hpp"
#include "hkfold/quadrature.hpp"

namespace hkfold {

struct ContourOptions {
  std::optional<double> rotation_point;  // P; default from q and the scales
  double angle_plus = std::numbers::pi / 6.0;
  double angle_minus = 5.0 * std::numbers::pi / 6.0;
};

/// P = max(4 sqrt(|q|/(tau g)), 8 (hbar/(g tau))^{1/3}), beyond every saddle.
inline double default_rotation_point(double q, const ModelParams& m) {
  const double tg = m.tau * m.g;
  return std::max(4.0 * std::sqrt(std::fabs(q) / tg), 8.0 * std::cbrt(m.hbar / tg));
}

/// (1/2 pi hbar) int dp exp{i(p q + g tau p^3/3)/hbar}: real segment [-P, P]
/// plus rays from +-P in the directions angle_plus and angle_minus.
inline QuadratureResult exact_kernel_quadrature_result(double q, const ModelParams& m,
                                                       const QuadratureSpec& spec,
                                                       const ContourOptions& opt = {}) {
  m.validate();
  spec.validate();
  const double tg = m.tau * m.g;
  const double P = opt.rotation_point.value_or(default_rotation_point(q, m));
  if (!(P > 0)) throw std::invalid_argument("exact_kernel_quadrature: rotation point must be > 0");
  for (double a : {opt.angle_plus, std::numbers::pi - opt.angle_minus}) {
    if (!(a > 0 && a < std::numbers::pi / 3.0)) {
      throw std::invalid_argument("exact_kernel_quadrature: ray outside the decay wedge");
    }
  }
  const double norm = 1.0 / (2.0 * std::numbers::pi * m.hbar);
  const ComplexValue i(0.0, 1.0);
  auto f = [&](ComplexValue p) { return norm * std::exp(i * (p * q + tg * p * p * p / 3.0) / m.hbar); };

  QuadratureSpec seg = spec;
  const double phase_span = 2.0 * (std::fabs(q) * P + tg * P * P * P / 3.0) / m.hbar;
  seg.min_panels = std::max(spec.min_panels,
                            static_cast<int>(std::ceil(phase_span / (quad_detail::kOrder * std::numbers::pi / 4.0))));
  QuadratureResult real_part = integrate_1d([&](double p) { return f(p); }, -P, P, seg);

  // Along either ray Im p^3 grows at least like sin(3 theta) s^3 while the
  // q-term is dominated by the P^2 s cross term, so s^3 g tau sin(3 theta) /
  // (3 hbar) reaching the cutoff bounds the ray.
  const double cutoff = std::log(1.0 / spec.truncation_threshold) + 10.0;
  auto ray = [&](double start, double theta, double sign) {
    const ComplexValue dir = std::polar(1.0, theta);
    const double decay = std::sin(3.0 * theta);
    const double length = std::cbrt(3.0 * m.hbar * cutoff / (tg * decay));
    QuadratureSpec rs = spec;
    rs.abs_tol = 0.25 * spec.abs_tol;
    return integrate_1d([&](double s) { return sign * f(start + s * dir) * dir; }, 0.0, length, rs);
  };
  const QuadratureResult plus = ray(P, opt.angle_plus, 1.0);
  const QuadratureResult minus = ray(-P, opt.angle_minus, -1.0);
  return {real_part.value + plus.value + minus.value, real_part.error + plus.error + minus.error,
          real_part.evaluations + plus.evaluations + minus.evaluations};
}

inline ComplexValue exact_kernel_quadrature(double q, const ModelParams& m, const QuadratureSpec& spec,
                                            const ContourOptions& opt = {}) {
  return exact_kernel_quadrature_result(q, m, spec, opt).value;
}

/// Periodic grid x_j = x_min + j dx, j = 0..n-1, dx = (x_max - x_min)/n.
struct Grid1D {
  double x_min = -10.0;
  double x_max = 10.0;
  int n = 512;

  void validate() const {
    if (!(x_max > x_min) || n < 4) throw std::invalid_argument("Grid1D: need x_max > x_min and n >= 4");
  }
  double dx() const { return (x_max - x_min) / n; }
  double x(int j) const { return x_min + j * dx(); }
  /// Angular wavenumber of FFT bin j (standard unshifted ordering).
  double k(int j) const {
    const int jj = j < (n + 1) / 2 ? j : j - n;
    return 2.0 * std::numbers::pi * jj / (x_max - x_min);
  }
};

struct GridOptions {
  double hbar = 1.0;
  double mass = 1.0;
  double margin_fraction = 0.05;  // outer share of the grid watched for leaks
  double leak_tol = 1e-12;        // largest |psi| tolerated inside the margin
};

using Wavefunction = std::vector<ComplexValue>;

namespace grid_detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// fftw_plan creation and destruction are not thread safe; execution is.
class FftPair {
 public:
  explicit FftPair(int n) : n_(n) {
    buf_ = reinterpret_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (!buf_) throw std::bad_alloc();
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~FftPair() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  FftPair(const FftPair&) = delete;
  FftPair& operator=(const FftPair&) = delete;

  ComplexValue* data() { return reinterpret_cast<ComplexValue*>(buf_); }
  void forward() { fftw_execute(fwd_); }
  void backward() {
    fftw_execute(bwd_);
    const double s = 1.0 / n_;
    for (int j = 0; j < n_; ++j) data()[j] *= s;
  }

 private:
  int n_;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

inline void check_margin(const ComplexValue* psi, const Grid1D& grid, const GridOptions& opt, double t) {
  const int margin = std::max(1, static_cast<int>(opt.margin_fraction * grid.n));
  double worst = 0.0;
  for (int j = 0; j < margin; ++j) {
    worst = std::max({worst, std::abs(psi[j]), std::abs(psi[grid.n - 1 - j])});
  }
  if (!(worst <= opt.leak_tol)) {
    throw DomainTooSmall("grid_propagate: |psi| = " + std::to_string(worst) +
                         " inside the boundary margin at t = " + std::to_string(t));
  }
}

}  // namespace grid_detail

inline double grid_norm(const Wavefunction& psi, const Grid1D& grid) {
  double s = 0.0;
  for (const auto& v : psi) s += std::norm(v);
  return std::sqrt(s * grid.dx());
}

inline Wavefunction sample(const std::function<ComplexValue(double)>& f, const Grid1D& grid) {
  grid.validate();
  Wavefunction psi(grid.n);
  for (int j = 0; j < grid.n; ++j) psi[j] = f(grid.x(j));
  return psi;
}

/// Strang splitting exp(-iV dt/2hbar) exp(-iT dt/hbar) exp(-iV dt/2hbar)
/// repeated `steps` times with dt = t/steps; t < 0 runs backwards.
inline Wavefunction grid_propagate(const std::function<double(double)>& V, const Wavefunction& psi0,
                                   double t, int steps, const Grid1D& grid, const GridOptions& opt = {}) {
  grid.validate();
  if (static_cast<int>(psi0.size()) != grid.n) {
    throw std::invalid_argument("grid_propagate: psi0 size does not match the grid");
  }
  if (steps < 100) throw std::invalid_argument("grid_propagate: need steps >= 100");
  if (!std::isfinite(t)) throw std::invalid_argument("grid_propagate: t must be finite");
  const double dt = t / steps;
  const ComplexValue i(0.0, 1.0);

  std::vector<ComplexValue> half_v(grid.n), kin(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    half_v[j] = std::exp(-i * V(grid.x(j)) * dt / (2.0 * opt.hbar));
    const double kk = grid.k(j);
    kin[j] = std::exp(-i * opt.hbar * kk * kk * dt / (2.0 * opt.mass));
  }

  grid_detail::FftPair fft(grid.n);
  ComplexValue* psi = fft.data();
  std::copy(psi0.begin(), psi0.end(), psi);
  grid_detail::check_margin(psi, grid, opt, 0.0);
  for (int s = 0; s < steps; ++s) {
    for (int j = 0; j < grid.n; ++j) psi[j] *= half_v[j];
    fft.forward();
    for (int j = 0; j < grid.n; ++j) psi[j] *= kin[j];
    fft.backward();
    for (int j = 0; j < grid.n; ++j) psi[j] *= half_v[j];
    grid_detail::check_margin(psi, grid, opt, (s + 1) * dt);
  }
  return Wavefunction(psi, psi + grid.n);
}

/// <psi|H|psi> / <psi|psi> with the kinetic term evaluated spectrally.
inline double energy_expectation(const std::function<double(double)>& V, const Wavefunction& psi,
                                 const Grid1D& grid, const GridOptions& opt = {}) {
  grid.validate();
  grid_detail::FftPair fft(grid.n);
  std::copy(psi.begin(), psi.end(), fft.data());
  fft.forward();
  double kinetic = 0.0, weight_k = 0.0;
  for (int j = 0; j < grid.n; ++j) {
    const double w = std::norm(fft.data()[j]);
    const double kk = grid.k(j);
    kinetic += w * opt.hbar * opt.hbar * kk * kk / (2.0 * opt.mass);
    weight_k += w;
  }
  double potential = 0.0, weight_x = 0.0;
  for (int j = 0; j < grid.n; ++j) {
    const double w = std::norm(psi[j]);
    potential += w * V(grid.x(j));
    weight_x += w;
  }
  return kinetic / weight_k + potential / weight_x;
}

}  // namespace hkfold
