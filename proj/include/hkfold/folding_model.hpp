#pragma once

// The folding Hamiltonian H = -g p^3 / 3: scales, exact and semiclassical
// kernels K(q) = <q| exp(-i H tau / hbar) |q = 0>, the analytic classical
// flow, and the Herman-Kluk kernel reduced to a single momentum integral.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hkfold/airy.hpp"
#include "hkfold/errors.hpp"
#include "hkfold/quadrature.hpp"

namespace hkfold {

struct ModelParams {
  double g = 1.0;      // folding strength
  double tau = 1.0;    // evolution interval
  double hbar = 1.0;
  double gamma = 0.5;  // coherent-state width parameter, 1/length^2

  void validate() const {
    if (!(g > 0) || !(tau > 0) || !(hbar > 0) || !(gamma > 0) || !std::isfinite(g) ||
        !std::isfinite(tau) || !std::isfinite(hbar) || !std::isfinite(gamma)) {
      throw std::invalid_argument("ModelParams: g, tau, hbar and gamma must be finite and > 0");
    }
  }
};

struct DerivedScales {
  double l = 0.0;        // penetration length (hbar^2 g tau)^{1/3}
  double l_gamma = 0.0;  // shallow/deep border 1 / (4 gamma^2 l^3)
  ComplexValue p_I;      // HK branch point i / (2 hbar gamma tau g)
};

struct PhasePoint {
  double q = 0.0;
  double p = 0.0;
};

enum class RegionClass { Allowed, Shallow, Deep, ConventionalCaustic, HKCaustic };

inline const char* to_string(RegionClass r) {
  switch (r) {
    case RegionClass::Allowed: return "allowed";
    case RegionClass::Shallow: return "shallow";
    case RegionClass::Deep: return "deep";
    case RegionClass::ConventionalCaustic: return "conventional_caustic";
    case RegionClass::HKCaustic: return "hk_caustic";
  }
  return "?";
}

inline DerivedScales derived_scales(const ModelParams& m) {
  m.validate();
  DerivedScales s;
  s.l = std::cbrt(m.hbar * m.hbar * m.g * m.tau);
  s.l_gamma = 1.0 / (4.0 * m.gamma * m.gamma * s.l * s.l * s.l);
  s.p_I = ComplexValue(0.0, 1.0 / (2.0 * m.hbar * m.gamma * m.tau * m.g));
  return s;
}

/// Half-width of the caustic bands around q = 0 and q = l_gamma.
inline double default_boundary_tol(const DerivedScales& s) { return 1e-6 * s.l; }

/// Exact kernel Ai(q/l)/l.
inline double exact_kernel(double q, const ModelParams& m) {
  const double l = derived_scales(m).l;
  return airy_ai(q / l) / l;
}

/// Leading stationary-phase kernel: two-trajectory cosine for q < 0,
/// tunneling tail for q > 0. Diverges like |q|^{-1/4} at the caustic q = 0.
inline double sc_kernel(double q, const ModelParams& m, double boundary_tol = -1.0) {
  const DerivedScales s = derived_scales(m);
  const double tol = boundary_tol < 0 ? default_boundary_tol(s) : boundary_tol;
  if (std::fabs(q) <= tol) {
    throw CausticError("sc_kernel: q = " + std::to_string(q) + " inside the caustic band at 0");
  }
  const double x = std::fabs(q) / s.l;
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  const double root_pi = std::sqrt(std::numbers::pi);
  if (q < 0) {
    return std::cos(zeta - std::numbers::pi / 4.0) / (root_pi * s.l * std::pow(x, 0.25));
  }
  return std::exp(-zeta) / (2.0 * root_pi * s.l * std::pow(x, 0.25));
}

/// Analytic flow of H = -g p^3/3: p is conserved, q drifts by -g p^2 t.
inline PhasePoint classical_map(PhasePoint x, double t, const ModelParams& m) {
  return {x.q - m.g * x.p * x.p * t, x.p};
}

/// S_t(p0) = integral of (p qdot - H) dt = -(2/3) g p0^3 t.
inline double action(double p0, double t, const ModelParams& m) {
  return -2.0 / 3.0 * m.g * p0 * p0 * p0 * t;
}

/// Exponent of the reduced HK integrand, K^HK = (1/2 pi hbar) int C e^{-phi}.
inline ComplexValue phi_tau(ComplexValue p, double q, const ModelParams& m) {
  const ComplexValue i(0.0, 1.0);
  const double tg = m.tau * m.g;
  const ComplexValue w = q + tg * p * p;
  return m.gamma * w * w / 2.0 - i * p * q / m.hbar - i * tg * p * p * p / (3.0 * m.hbar);
}

/// phi_tau'(p) = (q + tau g p^2)(2 gamma tau g p - i/hbar).
inline ComplexValue phi_tau_prime(ComplexValue p, double q, const ModelParams& m) {
  const ComplexValue i(0.0, 1.0);
  const double tg = m.tau * m.g;
  return (q + tg * p * p) * (2.0 * m.gamma * tg * p - i / m.hbar);
}

inline ComplexValue phi_tau_second(ComplexValue p, double q, const ModelParams& m) {
  const ComplexValue i(0.0, 1.0);
  const double tg = m.tau * m.g;
  return 2.0 * tg * p * (2.0 * m.gamma * tg * p - i / m.hbar) +
         2.0 * m.gamma * tg * (q + tg * p * p);
}

/// C(p) = (1 - p/p_I)^{1/2} = (1 + 2i hbar gamma tau g p)^{1/2}, principal
/// branch. The cut is the vertical ray above p_I; real p never touches it.
inline ComplexValue hk_prefactor_analytic(ComplexValue p, const ModelParams& m) {
  const ComplexValue i(0.0, 1.0);
  const ComplexValue w = 1.0 + 2.0 * i * m.hbar * m.gamma * m.tau * m.g * p;
  if (w.imag() == 0.0 && w.real() < 0.0) {
    throw BranchCutError("hk_prefactor_analytic: p on the branch cut above p_I");
  }
  return std::sqrt(w);
}

/// Momentum half-window for the reduced integral: beyond it Re phi exceeds
/// ln(1/eps_tail) + 5.
inline double reduced_window(double q, const ModelParams& m, double eps_tail) {
  const double tg = m.tau * m.g;
  const double quartic = 2.0 * (std::log(1.0 / eps_tail) + 5.0) / (m.gamma * tg * tg);
  return std::sqrt(std::max(0.0, -q) / tg) + std::sqrt(std::sqrt(quartic));
}

/// HK kernel for the folding model after the analytic q0 integration,
/// (1/2 pi hbar) int dp C(p) e^{-phi_tau(p)} over real p.
inline QuadratureResult hk_kernel_reduced_result(double q, const ModelParams& m,
                                                 const QuadratureSpec& spec) {
  m.validate();
  spec.validate();
  const double p_max = reduced_window(q, m, spec.truncation_threshold);
  const double norm = 1.0 / (2.0 * std::numbers::pi * m.hbar);
  auto integrand = [&](double p) {
    return norm * hk_prefactor_analytic(p, m) * std::exp(-phi_tau(p, q, m));
  };
  // Keep the phase (pq + tau g p^3/3)/hbar advance below pi/4 per node.
  const double phase_span =
      2.0 * (std::fabs(q) * p_max + m.tau * m.g * p_max * p_max * p_max / 3.0) / m.hbar;
  QuadratureSpec local = spec;
  const int needed = static_cast<int>(std::ceil(phase_span / (quad_detail::kOrder * std::numbers::pi / 4.0)));
  local.min_panels = std::max(spec.min_panels, needed);
  return integrate_1d(integrand, -p_max, p_max, local);
}

inline ComplexValue hk_kernel_reduced(double q, const ModelParams& m, const QuadratureSpec& spec) {
  return hk_kernel_reduced_result(q, m, spec).value;
}

inline RegionClass classify_region(double q, const DerivedScales& s, double boundary_tol) {
  if (boundary_tol < 0) throw std::invalid_argument("classify_region: boundary_tol must be >= 0");
  if (std::fabs(q) <= boundary_tol) return RegionClass::ConventionalCaustic;
  if (std::fabs(q - s.l_gamma) <= boundary_tol) return RegionClass::HKCaustic;
  if (q < 0) return RegionClass::Allowed;
  if (q < s.l_gamma) return RegionClass::Shallow;
  return RegionClass::Deep;
}

}  // namespace hkfold
