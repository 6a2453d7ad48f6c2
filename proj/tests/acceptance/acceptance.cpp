// Acceptance run: one PASS/FAIL line per criterion. `--only N` runs a single
// criterion; the exit status is nonzero if any selected criterion fails.
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hkfold/hkfold.hpp"

#ifndef HKFOLD_CLI_PATH
#error "HKFOLD_CLI_PATH must be defined"
#endif

using namespace hkfold;

namespace {

const ModelParams kUnit{1.0, 1.0, 1.0, 0.5};  // l = l_gamma = 1

struct Check {
  std::string label;
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void info(const std::string& text) { std::printf("    info: %s\n", text.c_str()); }

bool report(int n, const std::vector<Check>& checks) {
  bool all = true;
  for (const Check& c : checks) {
    std::printf("criterion %d%s: %s  %s\n", n, c.label.empty() ? "" : (" " + c.label).c_str(),
                c.pass ? "PASS" : "FAIL", c.detail.c_str());
    all = all && c.pass;
  }
  std::fflush(stdout);
  return all;
}

ModelParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  return {std::exp(u(rng)), std::exp(u(rng)), std::exp(u(rng)), std::exp(u(rng))};
}

bool criterion1() {
  const BorderResult unit = find_border(kUnit);
  const double unit_err = std::fabs(unit.q_border - 1.0);
  std::mt19937_64 rng(101);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const ModelParams m = random_params(rng);
    const double l = derived_scales(m).l;
    worst = std::max(worst, std::fabs(find_border(m).q_border * 4 * m.gamma * m.gamma * l * l * l - 1.0));
  }
  return report(1, {{"border at l=l_gamma=1", unit_err < 1e-10, "rel err " + fmt("%.3g", unit_err) + " (tol 1e-10)"},
                    {"border on 20 random sets", worst < 1e-10,
                     "max |q_border 4 gamma^2 l^3 - 1| " + fmt("%.3g", worst) + " (tol 1e-10)"}});
}

bool criterion2() {
  const QuadratureSpec spec;
  double worst = 0;
  for (int i = 0; i <= 120; ++i) {
    const double q = -6.0 + 0.1 * i;
    worst = std::max(worst, std::abs(exact_kernel_quadrature(q, kUnit, spec) - exact_kernel(q, kUnit)));
  }
  return report(2, {{"", worst < 1e-8, "max abs diff on 121 points " + fmt("%.3g", worst) + " (tol 1e-8)"}});
}

bool criterion3() {
  const QuadratureSpec spec;
  const Hamiltonian1D ham = folding_hamiltonian(kUnit.g);
  double worst = 0;
  for (double q : {-3.0, -1.0, 0.3, 1.5, 3.0}) {
    // RK4 integrates the folding flow exactly, so a single step spans tau.
    const double dt = kUnit.tau;
    const PhaseSpaceWindow w = auto_window(ham, q, 0.0, kUnit.tau, kUnit.gamma, kUnit.hbar, dt);
    const ComplexValue full = hk_kernel_full(ham, q, 0.0, kUnit.tau, kUnit.gamma, kUnit.hbar, w, spec, dt);
    const ComplexValue reduced = hk_kernel_reduced(q, kUnit, spec);
    const double rel = std::abs(full - reduced) / std::abs(reduced);
    info("q=" + fmt("%g", q) + " rel diff " + fmt("%.3g", rel));
    worst = std::max(worst, rel);
  }
  return report(3, {{"", worst < 1e-6, "max rel diff " + fmt("%.3g", worst) + " (tol 1e-6)"}});
}

double log_hk(double q, const QuadratureSpec& spec) { return std::log(std::fabs(hk_kernel_reduced(q, kUnit, spec).real())); }

bool criterion4() {
  const QuadratureSpec spec;
  std::vector<Check> checks;

  // (i) allowed region, nodes of the cosine excluded relative to the Airy peak
  const double peak = std::fabs(airy_ai(-1.0187929716474710));
  double worst_i = 0, at_i = 0;
  int used = 0;
  for (int i = 0; i <= 90; ++i) {
    const double q = -5.0 + 0.05 * i;
    const double k = exact_kernel(q, kUnit);
    if (std::fabs(k) < 0.02 * peak) continue;
    ++used;
    const double rel = std::fabs(hk_kernel_reduced(q, kUnit, spec).real() - k) / std::fabs(k);
    if (rel > worst_i) worst_i = rel, at_i = q;
  }
  checks.push_back({"(i) allowed", worst_i < 0.05,
                    "max rel dev " + fmt("%.4f", worst_i) + " at q=" + fmt("%.2f", at_i) + " over " +
                        std::to_string(used) + " points (tol 0.05)"});

  // (ii) shallow region
  double worst_ii = 0, at_ii = 0;
  for (int i = 0; i <= 60; ++i) {
    const double q = 0.1 + 0.01 * i;
    const double k = exact_kernel(q, kUnit);
    const double rel = std::fabs(hk_kernel_reduced(q, kUnit, spec).real() - k) / std::fabs(k);
    if (rel > worst_ii) worst_ii = rel, at_ii = q;
  }
  checks.push_back({"(ii) shallow", worst_ii < 0.10,
                    "max rel dev " + fmt("%.4f", worst_ii) + " at q=" + fmt("%.2f", at_ii) + " (tol 0.10)"});

  // (iii) deep region: least-squares fit of the single coefficient in each
  // slope law, on 41 points with central differences.
  const DerivedScales s = derived_scales(kUnit);
  const double h = 1e-3;
  double hk_num = 0, hk_den = 0, ex_num = 0, ex_den = 0;
  for (int i = 0; i <= 40; ++i) {
    const double q = 2.0 + 0.05 * i;
    const double slope_hk = (log_hk(q + h, spec) - log_hk(q - h, spec)) / (2 * h);
    const double slope_ex =
        (std::log(exact_kernel(q + h, kUnit)) - std::log(exact_kernel(q - h, kUnit))) / (2 * h);
    const double x = q + s.l_gamma;                                 // model: -gamma x
    const double y = std::pow(s.l, -1.5) * std::sqrt(q);            // model: -(2/3) l^{-3/2} (3/2) q^{1/2}
    hk_num += -slope_hk * x, hk_den += x * x;
    ex_num += -slope_ex * y, ex_den += y * y;
  }
  const double gamma_fit = hk_num / hk_den;
  const double coef_fit = ex_num / ex_den;
  const double hk_err = std::fabs(gamma_fit / kUnit.gamma - 1.0);
  const double ex_err = std::fabs(coef_fit - 1.0);
  checks.push_back({"(iii) deep HK slope", hk_err < 0.10,
                    "fitted gamma " + fmt("%.4f", gamma_fit) + " vs " + fmt("%g", kUnit.gamma) + ", rel err " +
                        fmt("%.4f", hk_err) + " (tol 0.10)"});
  checks.push_back({"(iii) deep exact slope", ex_err < 0.05,
                    "fitted q^{1/2} coefficient " + fmt("%.4f", coef_fit) + ", rel err " + fmt("%.4f", ex_err) +
                        " (tol 0.05)"});
  return report(4, checks);
}

double ratio_variation(double a, double b, double anchor, const QuadratureSpec& spec) {
  auto ratio = [&](double q) { return hksc_deep(q, kUnit) / hk_kernel_reduced(q, kUnit, spec).real(); };
  const double r0 = ratio(anchor);
  double worst = 0;
  for (int i = 0; i <= 40; ++i) {
    const double q = a + (b - a) * i / 40.0;
    worst = std::max(worst, std::fabs(ratio(q) / r0 - 1.0));
  }
  return worst;
}

bool criterion5() {
  const QuadratureSpec spec;
  const double v = ratio_variation(2.0, 4.0, 3.0, spec);
  info("same measure on [4, 8] matched at q=6: " + fmt("%.4f", ratio_variation(4.0, 8.0, 6.0, spec)));
  return report(5, {{"", v < 0.10, "max |r(q)/r(3) - 1| on [2, 4] " + fmt("%.4f", v) + " (tol 0.10)"}});
}

// Strict monotonicity: each step must move by more than rounding noise.
bool strictly(const std::vector<double>& v, bool decreasing) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double margin = 1e-9 * std::max(std::fabs(v[i]), std::fabs(v[i - 1]));
    if (decreasing ? !(v[i] < v[i - 1] - margin) : !(v[i] > v[i - 1] + margin)) return false;
  }
  return true;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : ", ") + fmt("%.6g", x);
  return out;
}

bool criterion6() {
  const QuadratureSpec spec;
  const std::vector<double> ladder{1.0, 0.5, 0.25, 0.125};
  std::vector<Check> checks;
  auto series = [&](double target, RegionClass region, ScalingProtocol protocol, bool log_ratio) {
    std::vector<double> v;
    for (const ScalingRow& r : hbar_scaling_study(target, region, ladder, kUnit, protocol, spec))
      v.push_back(log_ratio ? r.abs_log_ratio : r.rel_dev);
    return v;
  };
  const auto allowed = series(-4.0, RegionClass::Allowed, ScalingProtocol::FixedDimensionless, false);
  const auto shallow = series(0.5, RegionClass::Shallow, ScalingProtocol::FixedDimensionless, false);
  const auto deep = series(2.0, RegionClass::Deep, ScalingProtocol::FixedDimensionless, true);
  checks.push_back({"allowed q/l=-4", strictly(allowed, true), "rel dev [" + join(allowed) + "] must strictly decrease"});
  checks.push_back({"shallow q/l_gamma=0.5", strictly(shallow, true),
                    "rel dev [" + join(shallow) + "] must strictly decrease"});
  checks.push_back({"deep q/l_gamma=2", strictly(deep, false),
                    "|ln(K_HK/K)| [" + join(deep) + "] must strictly increase"});
  info("classical-limit ladder (hbar*gamma and q fixed), shallow q=0.5 rel dev: [" +
       join(series(0.5, RegionClass::Shallow, ScalingProtocol::ClassicalLimit, false)) + "]");
  info("classical-limit ladder (hbar*gamma and q fixed), deep q=2 |ln ratio|: [" +
       join(series(2.0, RegionClass::Deep, ScalingProtocol::ClassicalLimit, true)) + "]");
  return report(6, checks);
}

bool criterion7() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_det = 0;
  for (int i = 0; i < 500; ++i) {
    const double g = std::exp(3 * u(rng) - 1.5), t = std::exp(3 * u(rng) - 1.5);
    const TrajectoryResult r = evolve(folding_hamiltonian(g), {8 * u(rng) - 4, 6 * u(rng) - 3}, t, t);
    worst_det = std::max(worst_det, std::fabs(r.M.det() - 1.0));
  }
  const Hamiltonian1D morse = morse_hamiltonian({});
  for (int i = 0; i < 500; ++i) {
    const PhasePoint x0{2 + 10 * u(rng), 6 * u(rng) - 3};
    const TrajectoryResult r = evolve(morse, x0, 18 * u(rng), 1e-3);
    worst_det = std::max(worst_det, std::fabs(r.M.det() - 1.0));
  }

  const MorseParams mp;
  auto V = [mp](double q) { return morse_potential(q, mp); };
  const Grid1D grid{-15, 75, 2048};
  const Wavefunction psi0 = sample([](double x) { return coherent_state(x, 9.0, 0.5, 0.5, 1.0); }, grid);
  const Wavefunction psi = grid_propagate(V, psi0, 10.0, 10000, grid);
  const double drift = std::fabs(grid_norm(psi, grid) - grid_norm(psi0, grid));

  double worst_e = 0;
  for (int i = 0; i <= 60; ++i) {
    const PhasePoint x0{9.0, -3.0 + 0.1 * i};
    const double e0 = morse.H(x0.q, x0.p);
    const TrajectoryResult r = evolve(morse, x0, 18.0, 1e-3);
    worst_e = std::max(worst_e, std::fabs(morse.H(r.q_t, r.p_t) - e0) / std::fabs(e0));
  }
  return report(7, {{"det M", worst_det < 1e-9, "max |det M - 1| on 1000 trajectories " + fmt("%.3g", worst_det) + " (tol 1e-9)"},
                    {"grid norm", drift < 1e-12, "norm drift over 1e4 steps " + fmt("%.3g", drift) + " (tol 1e-12)"},
                    {"Morse energy", worst_e < 1e-8, "max rel energy drift over t=18 " + fmt("%.3g", worst_e) + " (tol 1e-8)"}});
}

bool criterion8() {
  const EvolvedManifold fold =
      evolve_manifold(folding_hamiltonian(kUnit.g), build_line_manifold(0, -2, 2, 201), kUnit.tau, kUnit.tau);
  double parabola = 0;
  for (std::size_t i = 0; i < fold.final.size(); ++i) {
    const double p = fold.initial.points[i].p;
    parabola = std::max(parabola, std::fabs(fold.final.points[i].q + kUnit.g * kUnit.tau * p * p));
  }
  const CausticScan fs = detect_caustics(fold);
  const bool fold_ok = parabola < 1e-12 && fs.caustics.size() == 1 && fs.unresolved.empty() &&
                       std::fabs(fs.caustics[0].q) < 1e-10;

  const MorseParams mp = MorseParams::from_recipe(0.975, 1.0 / std::sqrt(12.0));
  const CausticScan ms = detect_caustics(evolve_manifold(morse_hamiltonian(mp), build_line_manifold(9, -3, 3, 601), 18, 1e-3));
  std::string where;
  for (const Caustic& c : ms.caustics) where += " q=" + fmt("%.4f", c.q);
  return report(8, {{"folding", fold_ok,
                     "parabola err " + fmt("%.3g", parabola) + ", caustics " + std::to_string(fs.caustics.size()) +
                         (fs.caustics.empty() ? "" : " at q=" + fmt("%.3g", fs.caustics[0].q)) + " (want 1 at |q|<1e-10)"},
                    {"Morse", ms.caustics.size() == 2 && ms.unresolved.empty(),
                     "caustics " + std::to_string(ms.caustics.size()) + where + ", unresolved " +
                         std::to_string(ms.unresolved.size()) + " (want 2)"}});
}

bool criterion9() {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> uq(-5, 5);
  double worst = 0;
  bool kinds_ok = true;
  for (int i = 0; i < 50; ++i) {
    const ModelParams m = random_params(rng);
    const DerivedScales s = derived_scales(m);
    const double q = uq(rng) * std::max(s.l, s.l_gamma);
    const double tg = m.tau * m.g;
    // phi' carries a factor of the momentum scale; residuals are measured relative to it.
    const double scale = std::sqrt(std::max(1.0, std::fabs(q) / tg));
    const SaddleSet set = find_saddles(q, m);
    kinds_ok = kinds_ok && set.degeneracy == Degeneracy::None && set.saddles.size() == 3;
    const ComplexValue root = std::sqrt(ComplexValue(-q / tg, 0.0));
    const ComplexValue expected[3] = {root, -root, s.p_I};
    for (std::size_t k = 0; k < set.saddles.size() && k < 3; ++k) {
      worst = std::max(worst, std::abs(phi_tau_prime(set.saddles[k].p, q, m)) / scale);
      kinds_ok = kinds_ok && std::abs(set.saddles[k].p - expected[k]) < 1e-12 * std::max(1.0, std::abs(expected[k]));
    }
  }
  const DerivedScales us = derived_scales(kUnit);
  const bool flags = find_saddles(0.0, kUnit).degeneracy == Degeneracy::ConventionalCaustic &&
                     find_saddles(us.l_gamma, kUnit).degeneracy == Degeneracy::HKCaustic &&
                     find_saddles(0.01, kUnit).degeneracy == Degeneracy::None &&
                     find_saddles(us.l_gamma + 0.01, kUnit).degeneracy == Degeneracy::None &&
                     find_saddles(-0.01, kUnit).degeneracy == Degeneracy::None;
  return report(9, {{"residuals", worst < 1e-12 && kinds_ok,
                     "max |phi'(p)| " + fmt("%.3g", worst) + " on 50 random sets, roots {+-sqrt(-q/tau g), p_I} " +
                         (kinds_ok ? "found" : "MISSING") + " (tol 1e-12)"},
                    {"degeneracy flags", flags, flags ? "flagged at q=0 and q=l_gamma only" : "wrong flags"}});
}

std::string capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int st = pclose(pipe);
  status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return out;
}

bool criterion10() {
  const std::vector<std::string> commands{
      "kernel --q -5:5:41 --methods exact,hk,hk2d,hksc,sc",
      "sweep-gamma --q -3:3:13",
      "border",
      "saddles --q -3:3:13",
      "manifold --model morse",
      "scaling --region deep --target 2",
  };
  const std::vector<std::string> envs{"", "", "HK_THREADS=1", "HK_THREADS=2", "HK_THREADS=4"};
  int identical = 0;
  std::string failed;
  for (const std::string& c : commands) {
    std::string first;
    bool same = true;
    for (std::size_t i = 0; i < envs.size(); ++i) {
      int status = 0;
      const std::string out =
          capture((envs[i].empty() ? "env -u HK_THREADS" : envs[i]) + " '" HKFOLD_CLI_PATH "' " + c + " 2>/dev/null", status);
      if (status != 0 || out.empty()) same = false;
      if (i == 0) first = out;
      else if (out != first) same = false;
    }
    if (same) ++identical;
    else failed += " [" + c + "]";
  }
  return report(10, {{"", identical == static_cast<int>(commands.size()),
                      std::to_string(identical) + "/" + std::to_string(commands.size()) +
                          " commands byte-identical over 5 runs (repeat, HK_THREADS=1,2,4)" + failed}});
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<bool()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                    criterion6, criterion7, criterion8, criterion9, criterion10};
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "criterion must be in 1..%zu\n", criteria.size());
    return 2;
  }
  bool all = true;
  for (int n = 1; n <= static_cast<int>(criteria.size()); ++n) {
    if (only != 0 && n != only) continue;
    try {
      all = criteria[n - 1]() && all;
    } catch (const std::exception& e) {
      std::printf("criterion %d: FAIL  exception: %s\n", n, e.what());
      all = false;
    }
  }
  return all ? 0 : 1;
}
