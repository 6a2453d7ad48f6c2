#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "hkfold/errors.hpp"

namespace hkfold {

struct PolishOptions {
  int max_iterations = 50;
  // Converged once |step| <= step_tol * max(1, |p|).
  double step_tol = 4.0 * std::numeric_limits<double>::epsilon();
};

/// Newton polishing of a simple complex root. A step longer than the
/// previous one is halved (up to 30 times) before being taken.
template <class F, class DF>
std::complex<double> polish_root(F&& f, DF&& df, std::complex<double> guess,
                                 const PolishOptions& opt = {}) {
  std::complex<double> p = guess;
  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opt.max_iterations; ++it) {
    const std::complex<double> fv = f(p);
    if (fv == 0.0) return p;
    const std::complex<double> dv = df(p);
    if (dv == 0.0) throw NoConvergence("polish_root: vanishing derivative");
    std::complex<double> step = fv / dv;
    for (int damp = 0; damp < 30 && std::abs(step) > last_step; ++damp) step *= 0.5;
    p -= step;
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) {
      throw NoConvergence("polish_root: iterate left the finite range");
    }
    last_step = std::abs(step);
    if (last_step <= opt.step_tol * std::max(1.0, std::abs(p))) {
      // One more undamped step lands on the rounding floor.
      const std::complex<double> d2 = df(p);
      if (d2 != 0.0) p -= f(p) / d2;
      return p;
    }
  }
  throw NoConvergence("polish_root: no convergence after max iterations");
}

}  // namespace hkfold
