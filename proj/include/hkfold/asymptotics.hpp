#pragma once

// Saddle-point analysis of the reduced HK integral
//   K^HK(q) = (1/2 pi hbar) int dp C(p) e^{-phi_tau(p)}.
// phi_tau' = (q + tau g p^2)(2 gamma tau g p - i/hbar) has roots
// p = +-sqrt(-q/(tau g)) and the branch point p_I of C. Which of them
// contribute depends on the region: p+- for q < 0, the tunneling root
// p0 = i sqrt(q/(tau g)) for 0 < q < l_gamma, and p_I for q > l_gamma.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "hkfold/airy.hpp"
#include "hkfold/errors.hpp"
#include "hkfold/folding_model.hpp"
#include "hkfold/quadrature.hpp"
#include "hkfold/roots.hpp"

namespace hkfold {

enum class SaddleKind {
  OutgoingReal,      // p+ = +sqrt(|q|/(tau g)), q < 0
  IncomingReal,      // p- = -sqrt(|q|/(tau g)), q < 0
  Tunneling,         // p0 = +i sqrt(q/(tau g)), q > 0
  GrowingTunneling,  // -p0, exponentially large weight, never on the contour
  Artifact,          // p_I, branch point of C
};

inline const char* to_string(SaddleKind k) {
  switch (k) {
    case SaddleKind::OutgoingReal: return "outgoing_real";
    case SaddleKind::IncomingReal: return "incoming_real";
    case SaddleKind::Tunneling: return "tunneling";
    case SaddleKind::GrowingTunneling: return "growing_tunneling";
    case SaddleKind::Artifact: return "artifact";
  }
  return "?";
}

enum class Degeneracy { None, ConventionalCaustic, HKCaustic };

struct SaddlePoint {
  ComplexValue p;
  SaddleKind kind = SaddleKind::Artifact;
  bool contributing = false;
  ComplexValue phi;   // phi_tau(p)
  ComplexValue phi2;  // phi_tau''(p)
};

struct SaddleSet {
  std::vector<SaddlePoint> saddles;
  Degeneracy degeneracy = Degeneracy::None;
};

struct BorderResult {
  double q_border = 0.0;
  double collision_residual = 0.0;  // |p0(q_border) - p_I|
};

namespace asym_detail {

inline SaddlePoint make_saddle(ComplexValue p, SaddleKind kind, double q, const ModelParams& m) {
  return {p, kind, false, phi_tau(p, q, m), phi_tau_second(p, q, m)};
}

inline ComplexValue polish(ComplexValue guess, double q, const ModelParams& m) {
  return polish_root([&](ComplexValue p) { return phi_tau_prime(p, q, m); },
                     [&](ComplexValue p) { return phi_tau_second(p, q, m); }, guess);
}

inline double tolerance_or_default(double tol, const DerivedScales& s) {
  return tol < 0 ? default_boundary_tol(s) : tol;
}

}  // namespace asym_detail

/// The stationary points of phi_tau, polished by Newton iteration. Inside a
/// caustic band the merged double root is returned once and the set is
/// flagged as degenerate.
inline SaddleSet find_saddles(double q, const ModelParams& m, double boundary_tol = -1.0) {
  using asym_detail::make_saddle;
  const DerivedScales s = derived_scales(m);
  const double tol = asym_detail::tolerance_or_default(boundary_tol, s);
  const double tg = m.tau * m.g;
  SaddleSet out;

  if (std::fabs(q) <= tol) {
    out.degeneracy = Degeneracy::ConventionalCaustic;
    out.saddles.push_back(make_saddle(0.0, SaddleKind::OutgoingReal, q, m));
    out.saddles.push_back(make_saddle(asym_detail::polish(s.p_I, q, m), SaddleKind::Artifact, q, m));
    return out;
  }
  const ComplexValue root = std::sqrt(ComplexValue(-q / tg, 0.0));
  if (std::fabs(q - s.l_gamma) <= tol) {
    out.degeneracy = Degeneracy::HKCaustic;
    out.saddles.push_back(make_saddle(asym_detail::polish(-root, q, m), SaddleKind::GrowingTunneling, q, m));
    out.saddles.push_back(make_saddle(s.p_I, SaddleKind::Artifact, q, m));
    return out;
  }
  const bool allowed = q < 0;
  out.saddles.push_back(make_saddle(asym_detail::polish(root, q, m),
                                    allowed ? SaddleKind::OutgoingReal : SaddleKind::Tunneling, q, m));
  out.saddles.push_back(make_saddle(asym_detail::polish(-root, q, m),
                                    allowed ? SaddleKind::IncomingReal : SaddleKind::GrowingTunneling, q, m));
  out.saddles.push_back(make_saddle(asym_detail::polish(s.p_I, q, m), SaddleKind::Artifact, q, m));
  return out;
}

/// Saddles flagged by region: p+- for q < 0, p0 in the shallow tail, p_I in
/// the deep tail.
inline std::vector<SaddlePoint> contributing_set(double q, const ModelParams& m,
                                                 double boundary_tol = -1.0) {
  const DerivedScales s = derived_scales(m);
  const double tol = asym_detail::tolerance_or_default(boundary_tol, s);
  const RegionClass region = classify_region(q, s, tol);
  if (region == RegionClass::ConventionalCaustic || region == RegionClass::HKCaustic) {
    throw CausticError(std::string("contributing_set: q = ") + std::to_string(q) + " in " +
                       to_string(region) + " band");
  }
  SaddleSet set = find_saddles(q, m, tol);
  for (SaddlePoint& sp : set.saddles) {
    switch (region) {
      case RegionClass::Allowed:
        sp.contributing = sp.kind == SaddleKind::OutgoingReal || sp.kind == SaddleKind::IncomingReal;
        break;
      case RegionClass::Shallow:
        sp.contributing = sp.kind == SaddleKind::Tunneling;
        break;
      case RegionClass::Deep:
        sp.contributing = sp.kind == SaddleKind::Artifact;
        break;
      default:
        break;
    }
  }
  return set.saddles;
}

/// Gaussian stationary-phase weight of a simple saddle,
/// (1/2 pi hbar) C(p_s) e^{-phi(p_s)} e^{i theta} sqrt(2 pi / |phi''|),
/// with theta = -arg(phi'')/2 the steepest-descent direction taken left to
/// right.
inline ComplexValue saddle_contribution(const SaddlePoint& sp, double q, const ModelParams& m) {
  if (sp.kind == SaddleKind::Artifact) {
    throw DomainError("saddle_contribution: p_I is a branch point, use hksc_deep");
  }
  const DerivedScales s = derived_scales(m);
  const double momentum_scale = m.hbar / s.l;
  if (std::abs(sp.phi2) * momentum_scale * momentum_scale < 1e-10) {
    throw CausticError("saddle_contribution: degenerate saddle at q = " + std::to_string(q));
  }
  const double theta = -0.5 * std::arg(sp.phi2);
  const ComplexValue gauss = std::polar(std::sqrt(2.0 * std::numbers::pi / std::abs(sp.phi2)), theta);
  return hk_prefactor_analytic(sp.p, m) * std::exp(-sp.phi) * gauss /
         (2.0 * std::numbers::pi * m.hbar);
}

/// Deep-tail HK asymptotics from the branch point p_I:
///   Gamma(3/4) / (2 pi l (gamma l^2)^{1/4}) (l/(q - l_gamma))^{3/4}
///   x exp{-gamma (q + l_gamma)^2 / 2 + (2/3) gamma l_gamma^2}.
/// The constant (2/3) gamma l_gamma^2 is phi_tau(p_I) evaluated exactly.
inline double hksc_deep(double q, const ModelParams& m, double boundary_tol = -1.0) {
  const DerivedScales s = derived_scales(m);
  const double tol = asym_detail::tolerance_or_default(boundary_tol, s);
  if (q <= s.l_gamma + tol) {
    throw DomainError("hksc_deep: q = " + std::to_string(q) + " not beyond l_gamma = " +
                      std::to_string(s.l_gamma));
  }
  const double l = s.l, lg = s.l_gamma, g = m.gamma;
  const double pref = gamma_three_quarters() / (2.0 * std::numbers::pi * l * std::pow(g * l * l, 0.25)) *
                      std::pow(l / (q - lg), 0.75);
  return pref * std::exp(-0.5 * g * (q + lg) * (q + lg) + 2.0 / 3.0 * g * lg * lg);
}

/// Composite semiclassical HK kernel: p+- sum, shallow p0 term, or the deep
/// branch-point formula.
inline double hk_semiclassical(double q, const ModelParams& m, double boundary_tol = -1.0) {
  const DerivedScales s = derived_scales(m);
  const double tol = asym_detail::tolerance_or_default(boundary_tol, s);
  const RegionClass region = classify_region(q, s, tol);
  if (region == RegionClass::Deep) return hksc_deep(q, m, tol);
  ComplexValue sum{0.0, 0.0};
  for (const SaddlePoint& sp : contributing_set(q, m, tol)) {
    if (sp.contributing) sum += saddle_contribution(sp, q, m);
  }
  return sum.real();
}

/// Border between shallow and deep tail, located as the q > 0 where the
/// tunneling root i sqrt(q/(tau g)) reaches p_I.
inline BorderResult find_border(const ModelParams& m) {
  const DerivedScales s = derived_scales(m);
  const double tg = m.tau * m.g;
  const double target = s.p_I.imag();
  auto f = [&](double q) { return std::sqrt(q / tg) - target; };
  double lo = 0.0, hi = s.l;
  while (f(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  const double q = std::fabs(f(lo)) < std::fabs(f(hi)) ? lo : hi;
  const ComplexValue p0(0.0, std::sqrt(q / tg));
  return {q, std::abs(p0 - s.p_I)};
}

enum class ScalingProtocol {
  // g, tau fixed; gamma l^2 fixed; q/l (or q/l_gamma) fixed.
  FixedDimensionless,
  // g, tau, hbar*gamma and q fixed: the classical quantities l_gamma and p_I
  // stay put while l shrinks.
  ClassicalLimit,
};

struct ScalingRow {
  double hbar, gamma, l, l_gamma, q;
  double k_exact, k_hk;
  double rel_dev;        // |K^HK - K| / |K|
  double abs_log_ratio;  // |ln(K^HK / K)|
};

/// Relative deviation of the HK kernel from the exact kernel along an hbar
/// ladder. The target is q/l for the allowed region and q/l_gamma otherwise,
/// evaluated at the base parameters.
inline std::vector<ScalingRow> hbar_scaling_study(double target, RegionClass region,
                                                  const std::vector<double>& hbar_list,
                                                  const ModelParams& base, ScalingProtocol protocol,
                                                  const QuadratureSpec& spec) {
  const DerivedScales bs = derived_scales(base);
  auto anchor = [&](const DerivedScales& s) {
    return region == RegionClass::Allowed ? s.l : s.l_gamma;
  };
  const double q_base = target * anchor(bs);
  if (classify_region(q_base, bs, default_boundary_tol(bs)) != region) {
    throw std::invalid_argument("hbar_scaling_study: target does not lie in the requested region");
  }
  std::vector<ScalingRow> rows;
  rows.reserve(hbar_list.size());
  for (double hbar : hbar_list) {
    ModelParams m = base;
    m.hbar = hbar;
    double q = q_base;
    if (protocol == ScalingProtocol::FixedDimensionless) {
      const double l = std::cbrt(hbar * hbar * m.g * m.tau);
      m.gamma = base.gamma * bs.l * bs.l / (l * l);
      q = target * anchor(derived_scales(m));
    } else {
      m.gamma = base.gamma * base.hbar / hbar;
    }
    const DerivedScales s = derived_scales(m);
    const double exact = exact_kernel(q, m);
    const double hk = hk_kernel_reduced(q, m, spec).real();
    rows.push_back({hbar, m.gamma, s.l, s.l_gamma, q, exact, hk, std::fabs(hk - exact) / std::fabs(exact),
                    std::fabs(std::log(std::fabs(hk / exact)))});
  }
  return rows;
}

}  // namespace hkfold
