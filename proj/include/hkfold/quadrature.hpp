#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "hkfold/errors.hpp"

namespace hkfold {

using ComplexValue = std::complex<double>;

struct QuadratureSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  long max_evals = 2'000'000;
  // Integrand-magnitude cutoff relative to the peak; callers size their
  // windows so the edges sit below it.
  double truncation_threshold = 1e-16;
  // Equal panels the interval is cut into before adaptive bisection starts.
  int min_panels = 8;

  void validate() const {
    if (!(abs_tol > 0) || !(rel_tol > 0) || !(truncation_threshold > 0)) {
      throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
    }
    if (max_evals < 100) throw std::invalid_argument("QuadratureSpec: max_evals must be >= 100");
    if (min_panels < 1) throw std::invalid_argument("QuadratureSpec: min_panels must be >= 1");
  }
};

struct QuadratureResult {
  ComplexValue value;
  double error = 0.0;
  long evaluations = 0;
};

struct Rect {
  double x_min, x_max, y_min, y_max;
};

namespace quad_detail {

inline constexpr int kOrder = 16;

struct Rule {
  std::array<double, kOrder> nodes{};
  std::array<double, kOrder> weights{};
};

// Newton iteration on P_n from the Chebyshev-like initial guesses.
inline Rule make_gauss_legendre() {
  Rule rule;
  constexpr int n = kOrder;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

inline const Rule& gauss_legendre() {
  static const Rule rule = make_gauss_legendre();
  return rule;
}

template <class F>
ComplexValue panel(F& f, double a, double b) {
  const Rule& r = gauss_legendre();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  ComplexValue sum{0.0, 0.0};
  for (int i = 0; i < kOrder; ++i) {
    sum += r.weights[i] * ComplexValue(f(mid + half * r.nodes[i]));
  }
  return half * sum;
}

struct Segment {
  double a, b;
  ComplexValue value;        // left + right
  ComplexValue left_whole;   // single-panel estimate on [a, mid]
  ComplexValue right_whole;  // single-panel estimate on [mid, b]
  double error;
};

struct LargerError {
  bool operator()(const Segment& x, const Segment& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;
  }
};

}  // namespace quad_detail

/// Adaptive composite Gauss-Legendre quadrature of a complex (or real) valued
/// f over [a, b]. Each segment is scored by comparing its one-panel estimate
/// with the sum of its two half panels; the segment with the largest score is
/// bisected until the summed score is <= max(abs_tol, rel_tol |I|).
template <class F>
QuadratureResult integrate_1d(F&& f, double a, double b, const QuadratureSpec& spec) {
  using namespace quad_detail;
  spec.validate();
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("integrate_1d: need finite a < b");
  }

  long evals = 0;
  auto make_segment = [&](double lo, double hi, ComplexValue whole) {
    const double mid = 0.5 * (lo + hi);
    Segment s{lo, hi, {}, panel(f, lo, mid), panel(f, mid, hi), 0.0};
    evals += 2 * kOrder;
    s.value = s.left_whole + s.right_whole;
    s.error = std::abs(whole - s.value);
    if (!std::isfinite(s.value.real()) || !std::isfinite(s.value.imag())) {
      throw NumericalFailure("integrate_1d: non-finite integrand on [" + std::to_string(lo) +
                                 ", " + std::to_string(hi) + "]",
                             ComplexValue{NAN, NAN}, INFINITY);
    }
    return s;
  };

  std::priority_queue<Segment, std::vector<Segment>, LargerError> heap;
  const double width = (b - a) / spec.min_panels;
  ComplexValue total{0.0, 0.0};
  double err_total = 0.0;
  for (int i = 0; i < spec.min_panels; ++i) {
    const double lo = a + i * width;
    const double hi = (i + 1 == spec.min_panels) ? b : a + (i + 1) * width;
    const ComplexValue whole = panel(f, lo, hi);
    evals += kOrder;
    Segment s = make_segment(lo, hi, whole);
    total += s.value;
    err_total += s.error;
    heap.push(s);
  }

  auto finish = [&]() {
    // Ordered re-summation keeps the result independent of heap history.
    std::vector<Segment> segs;
    segs.reserve(heap.size());
    while (!heap.empty()) {
      segs.push_back(heap.top());
      heap.pop();
    }
    std::sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
    ComplexValue sum{0.0, 0.0};
    double err = 0.0;
    for (const auto& s : segs) {
      sum += s.value;
      err += s.error;
    }
    return QuadratureResult{sum, err, evals};
  };

  while (err_total > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
    if (evals + 4 * kOrder > spec.max_evals) {
      QuadratureResult best = finish();
      throw NumericalFailure("integrate_1d: no convergence within " +
                                 std::to_string(spec.max_evals) + " evaluations",
                             best.value, best.error);
    }
    Segment s = heap.top();
    heap.pop();
    const double mid = 0.5 * (s.a + s.b);
    if (!(s.a < mid && mid < s.b)) {
      heap.push(s);
      QuadratureResult best = finish();
      throw NumericalFailure("integrate_1d: segment width underflow", best.value, best.error);
    }
    Segment left = make_segment(s.a, mid, s.left_whole);
    Segment right = make_segment(mid, s.b, s.right_whole);
    total += left.value + right.value - s.value;
    err_total += left.error + right.error - s.error;
    heap.push(left);
    heap.push(right);
  }
  return finish();
}

/// Iterated integral over a rectangle: outer variable x, inner variable y.
/// The inner absolute tolerance is scaled by the outer width so inner errors
/// cannot exceed spec.abs_tol in the total.
template <class F>
QuadratureResult integrate_2d(F&& f, const Rect& window, const QuadratureSpec& spec) {
  spec.validate();
  QuadratureSpec inner = spec;
  const double width_x = window.x_max - window.x_min;
  inner.abs_tol = 0.1 * spec.abs_tol / std::max(width_x, 1e-300);
  inner.rel_tol = 0.1 * spec.rel_tol;
  long inner_evals = 0;
  auto slice = [&](double x) {
    auto fy = [&](double y) { return ComplexValue(f(x, y)); };
    QuadratureResult r = integrate_1d(fy, window.y_min, window.y_max, inner);
    inner_evals += r.evaluations;
    return r.value;
  };
  QuadratureResult outer = integrate_1d(slice, window.x_min, window.x_max, spec);
  outer.evaluations = inner_evals;
  return outer;
}

}  // namespace hkfold
