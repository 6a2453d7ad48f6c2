#pragma once

// General Herman-Kluk kernel for one degree of freedom: RK4 integration of
// trajectory, monodromy matrix and action as one augmented system, the
// continuously tracked square-root prefactor, and the phase-space double
// integral between position eigenstates.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "hkfold/errors.hpp"
#include "hkfold/folding_model.hpp"
#include "hkfold/hamiltonian.hpp"
#include "hkfold/quadrature.hpp"

namespace hkfold {

/// Monodromy matrix, rows (dq_t/dq0, dq_t/dp0) and (dp_t/dq0, dp_t/dp0).
struct Monodromy {
  double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;

  double det() const { return m11 * m22 - m12 * m21; }

  friend Monodromy operator*(const Monodromy& a, const Monodromy& b) {
    return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
            a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
  }
};

struct TrajectoryResult {
  double q_t = 0.0;
  double p_t = 0.0;
  double S_t = 0.0;
  Monodromy M;
};

struct HKPrefactorState {
  ComplexValue value{1.0, 0.0};
  double accumulated_phase = 0.0;  // continuous argument of the radicand
};

struct PrefactorSample {
  double t;
  ComplexValue radicand;
  ComplexValue value;
};

namespace hk_detail {

using State = std::array<double, 7>;  // q, p, m11, m12, m21, m22, S

inline State rhs(const Hamiltonian1D& h, const State& s) {
  const double q = s[0], p = s[1];
  const double hq = h.dH_dq(q, p);
  const double hp = h.dH_dp(q, p);
  const double hqq = h.d2H_dq2(q, p);
  const double hqp = h.d2H_dqdp(q, p);
  const double hpp = h.d2H_dp2(q, p);
  // dM/dt = A M with A = [[H_qp, H_pp], [-H_qq, -H_qp]].
  return {hp,
          -hq,
          hqp * s[2] + hpp * s[4],
          hqp * s[3] + hpp * s[5],
          -hqq * s[2] - hqp * s[4],
          -hqq * s[3] - hqp * s[5],
          p * hp - h.H(q, p)};
}

inline State axpy(const State& x, double a, const State& k) {
  State r;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = x[i] + a * k[i];
  return r;
}

inline TrajectoryResult to_result(const State& s) {
  return {s[0], s[1], s[6], {s[2], s[3], s[4], s[5]}};
}

/// Fixed-step RK4; obs(t, state) sees every node including t = 0.
template <class Observer>
TrajectoryResult integrate(const Hamiltonian1D& h, PhasePoint x0, double t, double dt, Observer&& obs) {
  if (t < 0 || !std::isfinite(t)) throw std::invalid_argument("evolve: need finite t >= 0");
  State s{x0.q, x0.p, 1.0, 0.0, 0.0, 1.0, 0.0};
  obs(0.0, s);
  if (t == 0.0) return to_result(s);
  if (!(dt > 0) || dt > t * (1.0 + 1e-12)) throw std::invalid_argument("evolve: need 0 < dt <= t");
  const long steps = std::max(1L, static_cast<long>(std::ceil(t / dt - 1e-9)));
  const double h_step = t / static_cast<double>(steps);
  for (long n = 0; n < steps; ++n) {
    const State k1 = rhs(h, s);
    const State k2 = rhs(h, axpy(s, 0.5 * h_step, k1));
    const State k3 = rhs(h, axpy(s, 0.5 * h_step, k2));
    const State k4 = rhs(h, axpy(s, h_step, k3));
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] += h_step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    const double now = (n + 1) * h_step;
    for (double v : s) {
      if (!std::isfinite(v)) {
        throw DivergenceError("evolve: trajectory from (" + std::to_string(x0.q) + ", " +
                                  std::to_string(x0.p) + ") escaped at t = " + std::to_string(now),
                              now);
      }
    }
    obs(now, s);
  }
  return to_result(s);
}

inline ComplexValue radicand(const Monodromy& M, double gamma, double hbar) {
  const ComplexValue i(0.0, 1.0);
  const double hg = hbar * gamma;
  return M.m11 + M.m22 - 2.0 * i * hg * M.m12 - M.m21 / (2.0 * i * hg);
}

// Follows arg(radicand) across time nodes, unwrapping jumps larger than pi.
struct PhaseTracker {
  double gamma, hbar;
  double phase = 0.0;
  ComplexValue value{1.0, 0.0};
  ComplexValue last_radicand{2.0, 0.0};
  std::vector<PrefactorSample>* history = nullptr;

  void operator()(double t, const State& s) {
    const Monodromy M{s[2], s[3], s[4], s[5]};
    const ComplexValue r = radicand(M, gamma, hbar);
    if (std::abs(r) < 1e-12) {
      throw BranchCutError("hk_prefactor_track: radicand vanishes at t = " + std::to_string(t));
    }
    double delta = std::arg(r) - std::remainder(phase, 2.0 * std::numbers::pi);
    delta = std::remainder(delta, 2.0 * std::numbers::pi);
    phase += delta;
    value = std::sqrt(std::abs(r) / 2.0) * std::polar(1.0, 0.5 * phase);
    last_radicand = r;
    if (history) history->push_back({t, r, value});
  }
};

}  // namespace hk_detail

/// Trajectory, action and monodromy at time t from x0, RK4 with step <= dt.
inline TrajectoryResult evolve(const Hamiltonian1D& ham, PhasePoint x0, double t, double dt) {
  return hk_detail::integrate(ham, x0, t, dt, [](double, const hk_detail::State&) {});
}

/// C(q0, p0, t) = sqrt(radicand / 2) with the argument followed continuously
/// from C(t = 0) = 1.
inline HKPrefactorState hk_prefactor_track(const Hamiltonian1D& ham, PhasePoint x0, double t,
                                           double dt, double gamma, double hbar) {
  hk_detail::PhaseTracker tracker{gamma, hbar};
  hk_detail::integrate(ham, x0, t, dt, tracker);
  return {tracker.value, tracker.phase};
}

inline std::vector<PrefactorSample> hk_prefactor_history(const Hamiltonian1D& ham, PhasePoint x0,
                                                         double t, double dt, double gamma,
                                                         double hbar) {
  std::vector<PrefactorSample> history;
  hk_detail::PhaseTracker tracker{gamma, hbar};
  tracker.history = &history;
  hk_detail::integrate(ham, x0, t, dt, tracker);
  return history;
}

/// <q | phi^gamma(qc, pc)> = (2 gamma/pi)^{1/4} exp{-gamma (q-qc)^2 + i pc (q-qc)/hbar}.
inline ComplexValue coherent_state(double q, double qc, double pc, double gamma, double hbar) {
  const double d = q - qc;
  return std::sqrt(std::sqrt(2.0 * gamma / std::numbers::pi)) *
         std::exp(ComplexValue(-gamma * d * d, pc * d / hbar));
}

struct PhaseSpaceWindow {
  double q0_min, q0_max, p0_min, p0_max;
};

/// Integration window: q0 within q_initial +- sqrt(ln(1/eps)/gamma); p0 range
/// from a coarse scan marking where both Gaussian overlap factors exceed eps.
inline PhaseSpaceWindow auto_window(const Hamiltonian1D& ham, double q_final, double q_initial,
                                    double t, double gamma, double hbar, double dt,
                                    double eps_tail = 1e-16) {
  const double half_q = std::sqrt(std::log(1.0 / eps_tail) / gamma);
  PhaseSpaceWindow w{q_initial - half_q, q_initial + half_q, 0.0, 0.0};
  constexpr int nq = 41, np = 81;
  double p_probe = 4.0 * hbar * std::sqrt(gamma);
  for (int attempt = 0; attempt < 40; ++attempt, p_probe *= 2.0) {
    double lo = INFINITY, hi = -INFINITY;
    bool edge_marked = false;
    for (int j = 0; j < np; ++j) {
      const double p0 = -p_probe + 2.0 * p_probe * j / (np - 1);
      for (int i = 0; i < nq; ++i) {
        const double q0 = w.q0_min + (w.q0_max - w.q0_min) * i / (nq - 1);
        double qt;
        try {
          qt = evolve(ham, {q0, p0}, t, dt).q_t;
        } catch (const DivergenceError&) {
          continue;
        }
        const double expo = gamma * ((q_final - qt) * (q_final - qt) + (q0 - q_initial) * (q0 - q_initial));
        if (expo <= std::log(1.0 / eps_tail)) {
          lo = std::min(lo, p0);
          hi = std::max(hi, p0);
          if (j == 0 || j == np - 1) edge_marked = true;
        }
      }
    }
    if (!edge_marked && lo <= hi) {
      const double step = 2.0 * p_probe / (np - 1);
      w.p0_min = lo - step;
      w.p0_max = hi + step;
      return w;
    }
  }
  throw NumericalFailure("auto_window: no bounded momentum window found", {NAN, NAN}, INFINITY);
}

/// Herman-Kluk kernel <q_final| e^{-iHt/hbar} |q_initial> as the phase-space
/// integral over (q0, p0) of <q_final|phi(q_t,p_t)> C e^{iS/hbar} <phi(q0,p0)|q_initial>.
inline QuadratureResult hk_kernel_full_result(const Hamiltonian1D& ham, double q_final,
                                              double q_initial, double t, double gamma,
                                              double hbar, const PhaseSpaceWindow& window,
                                              const QuadratureSpec& spec, double dt) {
  const double norm = 1.0 / (2.0 * std::numbers::pi * hbar);
  auto integrand = [&](double p0, double q0) -> ComplexValue {
    hk_detail::PhaseTracker tracker{gamma, hbar};
    const TrajectoryResult tr = hk_detail::integrate(ham, {q0, p0}, t, dt, tracker);
    const ComplexValue bra = coherent_state(q_final, tr.q_t, tr.p_t, gamma, hbar);
    const ComplexValue ket = std::conj(coherent_state(q_initial, q0, p0, gamma, hbar));
    return norm * bra * tracker.value * std::polar(1.0, tr.S_t / hbar) * ket;
  };
  const Rect rect{window.p0_min, window.p0_max, window.q0_min, window.q0_max};
  return integrate_2d(integrand, rect, spec);
}

inline ComplexValue hk_kernel_full(const Hamiltonian1D& ham, double q_final, double q_initial,
                                   double t, double gamma, double hbar,
                                   const PhaseSpaceWindow& window, const QuadratureSpec& spec,
                                   double dt) {
  return hk_kernel_full_result(ham, q_final, q_initial, t, gamma, hbar, window, spec, dt).value;
}

}  // namespace hkfold
