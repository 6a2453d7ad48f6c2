// Exact, Herman-Kluk and semiclassical kernels of the folding model at
// l = l_gamma = 1, across the allowed, shallow and deep regions.

#include <cstdio>

#include "hkfold/hkfold.hpp"

int main() {
  using namespace hkfold;
  const ModelParams m{1.0, 1.0, 1.0, 0.5};
  const DerivedScales s = derived_scales(m);
  std::printf("l = %g, l_gamma = %g, p_I = %gi\n\n", s.l, s.l_gamma, s.p_I.imag());
  std::printf("%6s %-8s %14s %14s %14s\n", "q", "region", "exact", "hk", "hk_sc");
  for (double q : {-4.0, -2.0, -1.0, 0.3, 0.6, 2.0, 3.0, 5.0, 8.0}) {
    const double exact = exact_kernel(q, m);
    const double hk = hk_kernel_reduced(q, m, QuadratureSpec{}).real();
    const double sc = hk_semiclassical(q, m);
    std::printf("%6.2f %-8s %14.6e %14.6e %14.6e\n", q, to_string(classify_region(q, s, default_boundary_tol(s))),
                exact, hk, sc);
  }
}
