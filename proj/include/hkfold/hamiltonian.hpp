#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

namespace hkfold {

/// One-degree-of-freedom Hamiltonian with the partials the trajectory and
/// monodromy integration need.
struct Hamiltonian1D {
  using Fn = std::function<double(double, double)>;
  Fn H;
  Fn dH_dq;
  Fn dH_dp;
  Fn d2H_dq2;
  Fn d2H_dqdp;
  Fn d2H_dp2;
};

/// V(q) = D{(1 - e^{-lambda q})^2 - 1} + (1 - epsilon) q^2 / 2.
struct MorseParams {
  double epsilon = 0.975;
  double lambda = 0.28867513459481287;  // 1/sqrt(12)
  double D = 5.85;

  /// Depth tied to the other two as D = epsilon / (2 lambda^2).
  static MorseParams from_recipe(double epsilon, double lambda) {
    return {epsilon, lambda, epsilon / (2.0 * lambda * lambda)};
  }
};

inline Hamiltonian1D folding_hamiltonian(double g) {
  return {
      [g](double, double p) { return -g * p * p * p / 3.0; },
      [](double, double) { return 0.0; },
      [g](double, double p) { return -g * p * p; },
      [](double, double) { return 0.0; },
      [](double, double) { return 0.0; },
      [g](double, double p) { return -2.0 * g * p; },
  };
}

inline Hamiltonian1D harmonic_hamiltonian(double omega = 1.0) {
  const double w2 = omega * omega;
  return {
      [w2](double q, double p) { return 0.5 * (p * p + w2 * q * q); },
      [w2](double q, double) { return w2 * q; },
      [](double, double p) { return p; },
      [w2](double, double) { return w2; },
      [](double, double) { return 0.0; },
      [](double, double) { return 1.0; },
  };
}

inline double morse_potential(double q, const MorseParams& m) {
  const double e = std::exp(-m.lambda * q);
  return m.D * ((1.0 - e) * (1.0 - e) - 1.0) + 0.5 * (1.0 - m.epsilon) * q * q;
}

inline double morse_force_derivative(double q, const MorseParams& m) {
  const double e = std::exp(-m.lambda * q);
  return 2.0 * m.D * m.lambda * e * (1.0 - e) + (1.0 - m.epsilon) * q;
}

inline Hamiltonian1D morse_hamiltonian(const MorseParams& m) {
  return {
      [m](double q, double p) { return 0.5 * p * p + morse_potential(q, m); },
      [m](double q, double) { return morse_force_derivative(q, m); },
      [](double, double p) { return p; },
      [m](double q, double) {
        const double e = std::exp(-m.lambda * q);
        return 2.0 * m.D * m.lambda * m.lambda * (2.0 * e * e - e) + (1.0 - m.epsilon);
      },
      [](double, double) { return 0.0; },
      [](double, double) { return 1.0; },
  };
}

/// H = p^2/2 + V(q) from a potential and its first two derivatives.
inline Hamiltonian1D kinetic_plus_potential(std::function<double(double)> V,
                                            std::function<double(double)> dV,
                                            std::function<double(double)> d2V) {
  return {
      [V](double q, double p) { return 0.5 * p * p + V(q); },
      [dV](double q, double) { return dV(q); },
      [](double, double p) { return p; },
      [d2V](double q, double) { return d2V(q); },
      [](double, double) { return 0.0; },
      [](double, double) { return 1.0; },
  };
}

/// Largest relative mismatch between the supplied partials and central
/// differences of H (first partials) and of the supplied first partials
/// (second partials) at (q, p).
inline double partials_mismatch(const Hamiltonian1D& h, double q, double p, double step = 1e-5) {
  auto rel = [](double a, double b) {
    const double scale = std::max({std::fabs(a), std::fabs(b), 1e-8});
    return std::fabs(a - b) / scale;
  };
  const double fq = (h.H(q + step, p) - h.H(q - step, p)) / (2 * step);
  const double fp = (h.H(q, p + step) - h.H(q, p - step)) / (2 * step);
  const double fqq = (h.dH_dq(q + step, p) - h.dH_dq(q - step, p)) / (2 * step);
  const double fqp = (h.dH_dq(q, p + step) - h.dH_dq(q, p - step)) / (2 * step);
  const double fpp = (h.dH_dp(q, p + step) - h.dH_dp(q, p - step)) / (2 * step);
  return std::max({rel(fq, h.dH_dq(q, p)), rel(fp, h.dH_dp(q, p)), rel(fqq, h.d2H_dq2(q, p)),
                   rel(fqp, h.d2H_dqdp(q, p)), rel(fpp, h.d2H_dp2(q, p))});
}

}  // namespace hkfold
