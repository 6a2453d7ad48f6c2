#pragma once

// Evolution of a vertical line in phase space and detection of position-
// space caustics (zeros of dq_t/dp0) along the evolved curve.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "hkfold/errors.hpp"
#include "hkfold/folding_model.hpp"
#include "hkfold/hamiltonian.hpp"
#include "hkfold/hk_propagator.hpp"
#include "hkfold/parallel.hpp"

namespace hkfold {

struct Manifold {
  std::vector<PhasePoint> points;
  std::vector<double> parameter;  // strictly increasing, one per point

  std::size_t size() const { return points.size(); }

  void validate() const {
    if (points.size() < 2 || parameter.size() != points.size()) {
      throw std::invalid_argument("Manifold: need >= 2 points with one parameter each");
    }
    for (std::size_t i = 1; i < parameter.size(); ++i) {
      if (!(parameter[i] > parameter[i - 1])) {
        throw std::invalid_argument("Manifold: parameter must be strictly increasing");
      }
    }
  }
};

struct EvolvedManifold {
  Manifold initial;
  Manifold final;
  std::vector<TrajectoryResult> trajectories;
  Hamiltonian1D ham;
  double t = 0.0;
  double dt = 0.0;
};

struct Caustic {
  double parameter;  // initial momentum on the line
  double q;          // position of the evolved point
  double p;
};

struct UnresolvedInterval {
  double parameter_lo;
  double parameter_hi;
};

struct CausticScan {
  std::vector<Caustic> caustics;
  std::vector<UnresolvedInterval> unresolved;
};

/// n points (q, p_i) with p_i uniform on [p_min, p_max]; parameter = p_i.
inline Manifold build_line_manifold(double q, double p_min, double p_max, int n) {
  if (!(p_min < p_max) || n < 2) {
    throw std::invalid_argument("build_line_manifold: need p_min < p_max and n >= 2");
  }
  Manifold m;
  m.points.reserve(n);
  m.parameter.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double p = (i + 1 == n) ? p_max : p_min + (p_max - p_min) * i / (n - 1);
    m.points.push_back({q, p});
    m.parameter.push_back(p);
  }
  return m;
}

/// Pointwise evolution on up to `threads` workers; output keeps point order.
inline EvolvedManifold evolve_manifold(const Hamiltonian1D& ham, const Manifold& m, double t, double dt,
                                       int threads = thread_count()) {
  m.validate();
  EvolvedManifold out{m, m, {}, ham, t, dt};
  out.trajectories = parallel_map(
      m.size(),
      [&](std::size_t i) {
        try {
          return evolve(ham, m.points[i], t, dt);
        } catch (const DivergenceError& e) {
          throw DivergenceError("evolve_manifold: point " + std::to_string(i) + ": " + e.what(),
                                e.escape_time());
        }
      },
      threads);
  for (std::size_t i = 0; i < m.size(); ++i) {
    out.final.points[i] = {out.trajectories[i].q_t, out.trajectories[i].p_t};
  }
  return out;
}

/// Sign changes of M12 = dq_t/dp0 along the parameter, refined by bisection
/// on the straight segment between neighbouring initial points. Stretches
/// where |M12| <= 1e-12 (including a whole line at t = 0) and zeros at an
/// end point are reported as unresolved.
inline CausticScan detect_caustics(const EvolvedManifold& em) {
  constexpr double kZero = 1e-12;
  const std::size_t n = em.trajectories.size();
  CausticScan scan;
  if (n < 2) return scan;

  auto m12 = [&](std::size_t i) { return em.trajectories[i].M.m12; };
  auto sign = [&](double v) { return std::fabs(v) <= kZero ? 0 : (v > 0 ? 1 : -1); };

  auto initial_at = [&](std::size_t i, double s) {
    const PhasePoint& a = em.initial.points[i];
    const PhasePoint& b = em.initial.points[i + 1];
    return PhasePoint{a.q + s * (b.q - a.q), a.p + s * (b.p - a.p)};
  };
  auto parameter_at = [&](std::size_t i, double s) {
    return em.initial.parameter[i] + s * (em.initial.parameter[i + 1] - em.initial.parameter[i]);
  };

  auto bisect = [&](std::size_t i) {
    double lo = 0.0, hi = 1.0;
    const int sign_lo = sign(m12(i));
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double v = evolve(em.ham, initial_at(i, mid), em.t, em.dt).M.m12;
      if (v == 0.0) {
        lo = hi = mid;
        break;
      }
      ((v > 0 ? 1 : -1) == sign_lo ? lo : hi) = mid;
    }
    const double s = 0.5 * (lo + hi);
    const TrajectoryResult tr = evolve(em.ham, initial_at(i, s), em.t, em.dt);
    return Caustic{parameter_at(i, s), tr.q_t, tr.p_t};
  };

  std::size_t first = 0;
  while (first < n && sign(m12(first)) == 0) ++first;
  if (first == n) {
    scan.unresolved.push_back({em.initial.parameter.front(), em.initial.parameter.back()});
    return scan;
  }
  if (first > 0) scan.unresolved.push_back({em.initial.parameter.front(), em.initial.parameter[first]});

  std::size_t last_nonzero = first;
  for (std::size_t j = first + 1; j < n; ++j) {
    if (sign(m12(j)) == 0) continue;
    const std::size_t i = last_nonzero;
    if (sign(m12(i)) != sign(m12(j))) {
      if (j == i + 1) {
        scan.caustics.push_back(bisect(i));
      } else if (j == i + 2) {
        const std::size_t k = i + 1;
        scan.caustics.push_back({em.initial.parameter[k], em.final.points[k].q, em.final.points[k].p});
      } else {
        scan.unresolved.push_back({em.initial.parameter[i], em.initial.parameter[j]});
      }
    } else if (j > i + 1) {
      scan.unresolved.push_back({em.initial.parameter[i], em.initial.parameter[j]});
    }
    last_nonzero = j;
  }
  if (last_nonzero + 1 < n) {
    scan.unresolved.push_back({em.initial.parameter[last_nonzero], em.initial.parameter.back()});
  }
  return scan;
}

/// Local extrema of q_t along the evolved manifold, counted from sign
/// changes of its forward differences.
inline int count_position_extrema(const EvolvedManifold& em) {
  int count = 0;
  int prev = 0;
  for (std::size_t i = 0; i + 1 < em.final.size(); ++i) {
    const double d = em.final.points[i + 1].q - em.final.points[i].q;
    const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++count;
    prev = s;
  }
  return count;
}

}  // namespace hkfold
