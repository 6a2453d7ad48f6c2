// hkfold: CSV front end for the folding-model kernels, saddle inventory,
// manifold evolution and hbar scaling tables.
//
// Exit codes: 0 success, 2 argument error, 3 numerical failure.
// HK_THREADS caps the number of worker threads; output is identical for
// every value.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hkfold/hkfold.hpp"

namespace {

using namespace hkfold;

struct ArgError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure tagged with the grid point and method that produced it.
struct PointFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ArgError("bad grid value '" + s + "' in '" + text + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw ArgError("bad grid value '" + s + "' in '" + text + "'");
    return v;
  };
  if (parts.size() == 1) return {number(parts[0])};
  if (parts.size() != 3) throw ArgError("grid must be a number or min:max:count, got '" + text + "'");
  const double lo = number(parts[0]), hi = number(parts[1]);
  const double count = number(parts[2]);
  if (count < 1 || count != std::floor(count)) throw ArgError("grid count must be a positive integer");
  const int n = static_cast<int>(count);
  if (n == 1) {
    if (lo != hi) throw ArgError("a one-node grid needs min == max");
    return {lo};
  }
  if (!(hi > lo)) throw ArgError("grid needs max > min");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = (i + 1 == n) ? hi : lo + (hi - lo) * i / (n - 1);
  return out;
}

std::string fmt(double v) { return format_double(v); }

struct Common {
  ModelParams model;
  QuadratureSpec quad;

  void validate() const {
    try {
      model.validate();
      quad.validate();
    } catch (const std::invalid_argument& e) {
      throw ArgError(e.what());
    }
  }

  std::string describe() const {
    const DerivedScales s = derived_scales(model);
    return "g=" + fmt(model.g) + " tau=" + fmt(model.tau) + " hbar=" + fmt(model.hbar) +
           " gamma=" + fmt(model.gamma) + " l=" + fmt(s.l) + " l_gamma=" + fmt(s.l_gamma) +
           " abs_tol=" + fmt(quad.abs_tol) + " rel_tol=" + fmt(quad.rel_tol) +
           " max_evals=" + std::to_string(quad.max_evals) + " truncation=" + fmt(quad.truncation_threshold);
  }
};

const std::vector<std::string> kAllMethods{"exact", "hk", "hk2d", "hksc", "sc"};

std::vector<std::string> normalize_methods(const std::vector<std::string>& requested) {
  for (const auto& m : requested) {
    if (std::find(kAllMethods.begin(), kAllMethods.end(), m) == kAllMethods.end()) {
      throw ArgError("unknown method '" + m + "' (expected exact, sc, hk, hk2d, hksc)");
    }
  }
  // Canonical (alphabetical) order, duplicates dropped.
  std::vector<std::string> out;
  for (const auto& m : kAllMethods) {
    if (std::find(requested.begin(), requested.end(), m) != requested.end()) out.push_back(m);
  }
  if (out.empty()) throw ArgError("no methods requested");
  return out;
}

std::string join(const std::vector<std::string>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? std::string(1, sep) : "") + v[i];
  return out;
}

ComplexValue evaluate_method(const std::string& method, double q, const ModelParams& m,
                             const QuadratureSpec& spec, double dt) {
  try {
    if (method == "exact") return exact_kernel(q, m);
    if (method == "sc") return sc_kernel(q, m);
    if (method == "hksc") return hk_semiclassical(q, m);
    if (method == "hk") return hk_kernel_reduced(q, m, spec);
    const Hamiltonian1D ham = folding_hamiltonian(m.g);
    const PhaseSpaceWindow w = auto_window(ham, q, 0.0, m.tau, m.gamma, m.hbar, dt, spec.truncation_threshold);
    return hk_kernel_full(ham, q, 0.0, m.tau, m.gamma, m.hbar, w, spec, dt);
  } catch (const DomainError& e) {
    // Inside a caustic band the semiclassical formulas have no value.
    if (method == "sc" || method == "hksc") return {NAN, NAN};
    throw PointFailure("numerical failure at q=" + fmt(q) + " method=" + method + ": " + e.what());
  } catch (const hkfold::Error& e) {
    throw PointFailure("numerical failure at q=" + fmt(q) + " method=" + method + ": " + e.what());
  }
}

std::vector<std::vector<std::string>> kernel_rows(const std::vector<double>& grid,
                                                  const std::vector<std::string>& methods,
                                                  const ModelParams& m, const QuadratureSpec& spec,
                                                  double dt, const std::vector<std::string>& lead) {
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  auto per_q = parallel_map(sorted.size(), [&](std::size_t i) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& method : methods) {
      const ComplexValue v = evaluate_method(method, sorted[i], m, spec, dt);
      std::vector<std::string> row = lead;
      row.insert(row.end(), {fmt(sorted[i]), method, fmt(v.real()), fmt(v.imag()), fmt(std::abs(v))});
      rows.push_back(std::move(row));
    }
    return rows;
  });
  std::vector<std::vector<std::string>> out;
  for (auto& block : per_q) {
    for (auto& row : block) out.push_back(std::move(row));
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Folding-model Herman-Kluk kernels and diagnostics (CSV output)"};
  app.set_config("--config", "", "key=value file; explicit flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  Common c;
  app.add_option("--g", c.model.g, "folding strength")->capture_default_str();
  app.add_option("--tau", c.model.tau, "evolution time")->capture_default_str();
  app.add_option("--hbar", c.model.hbar, "Planck constant")->capture_default_str();
  app.add_option("--gamma", c.model.gamma, "coherent-state width parameter")->capture_default_str();
  app.add_option("--abs-tol", c.quad.abs_tol, "quadrature absolute tolerance")->capture_default_str();
  app.add_option("--rel-tol", c.quad.rel_tol, "quadrature relative tolerance")->capture_default_str();
  app.add_option("--max-evals", c.quad.max_evals, "quadrature evaluation budget")->capture_default_str();
  app.add_option("--truncation", c.quad.truncation_threshold, "integrand tail cutoff")->capture_default_str();

  std::ostringstream out;
  CsvWriter csv(out);

  // kernel
  auto* kernel = app.add_subcommand("kernel", "kernel values per method on a q grid");
  std::string q_grid = "-5:5:101";
  std::vector<std::string> methods{"exact", "hk", "hksc"};
  double dt = -1.0;
  kernel->add_option("--q", q_grid, "q value or min:max:count")->capture_default_str();
  kernel->add_option("--methods", methods, "exact, sc, hk, hk2d, hksc")->delimiter(',')->capture_default_str();
  kernel->add_option("--dt", dt, "RK4 step for hk2d (default tau)");

  // sweep-gamma
  auto* sweep = app.add_subcommand("sweep-gamma", "exact and HK kernels for several gamma values");
  std::string sweep_grid = "-5:5:101";
  std::vector<double> lgammas{0.5, 1.0, 2.0, 4.0};
  std::vector<double> gammas;
  std::vector<std::string> sweep_methods{"exact", "hk"};
  sweep->add_option("--q", sweep_grid, "q value or min:max:count")->capture_default_str();
  auto* lg_opt = sweep->add_option("--lgammas", lgammas, "l_gamma targets")->delimiter(',')->capture_default_str();
  sweep->add_option("--gammas", gammas, "gamma values")->delimiter(',')->excludes(lg_opt);
  sweep->add_option("--methods", sweep_methods, "methods per gamma")->delimiter(',')->capture_default_str();

  // border
  auto* border = app.add_subcommand("border", "analytic and numerically located shallow/deep border");

  // saddles
  auto* saddles = app.add_subcommand("saddles", "stationary points of the reduced HK exponent");
  std::string saddle_grid = "-1";
  saddles->add_option("--q", saddle_grid, "q value or min:max:count")->capture_default_str();

  // manifold
  auto* manifold = app.add_subcommand("manifold", "evolved line manifold and its caustics");
  std::string model_name = "folding";
  double m_t = NAN, m_dt = 1e-3, m_q0 = NAN, m_pmin = NAN, m_pmax = NAN;
  int m_n = 0;
  MorseParams morse;
  double morse_D = NAN;
  manifold->add_option("--model", model_name, "folding or morse")
      ->check(CLI::IsMember({"folding", "morse"}))
      ->capture_default_str();
  manifold->add_option("--t", m_t, "evolution time (folding: tau, morse: 18)");
  manifold->add_option("--dt", m_dt, "RK4 step")->capture_default_str();
  manifold->add_option("--q0", m_q0, "position of the initial line (folding: 0, morse: 9)");
  manifold->add_option("--p-min", m_pmin, "lower momentum (folding: -2, morse: -3)");
  manifold->add_option("--p-max", m_pmax, "upper momentum (folding: 2, morse: 3)");
  manifold->add_option("--n", m_n, "points on the line (folding: 201, morse: 601)");
  manifold->add_option("--epsilon", morse.epsilon, "Morse epsilon")->capture_default_str();
  manifold->add_option("--lambda", morse.lambda, "Morse lambda")->capture_default_str();
  manifold->add_option("--D", morse_D, "Morse depth (default epsilon/(2 lambda^2))");

  // scaling
  auto* scaling = app.add_subcommand("scaling", "HK versus exact kernel along an hbar ladder");
  std::string region_name = "allowed";
  double target = NAN;
  std::vector<double> hbars{1.0, 0.5, 0.25, 0.125};
  std::string protocol_name = "dimensionless";
  scaling->add_option("--region", region_name, "allowed, shallow or deep")
      ->check(CLI::IsMember({"allowed", "shallow", "deep"}))
      ->capture_default_str();
  scaling->add_option("--target", target, "q/l (allowed) or q/l_gamma (default -4, 0.5, 2)");
  scaling->add_option("--hbars", hbars, "hbar ladder")->delimiter(',')->capture_default_str();
  scaling->add_option("--protocol", protocol_name,
                      "dimensionless: fixed gamma l^2 and q/l; classical: fixed hbar gamma and q")
      ->check(CLI::IsMember({"dimensionless", "classical"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  c.validate();
  const DerivedScales scales = derived_scales(c.model);

  if (kernel->parsed()) {
    const auto grid = parse_grid(q_grid);
    const auto ms = normalize_methods(methods);
    const double step = dt > 0 ? dt : c.model.tau;
    if (dt != -1.0 && !(dt > 0 && dt <= c.model.tau)) throw ArgError("--dt must satisfy 0 < dt <= tau");
    csv.comment("command=kernel " + c.describe() + " q=" + q_grid + " methods=" + join(ms, ',') +
                " dt=" + fmt(step));
    csv.header({"q", "method", "re", "im", "abs"});
    for (const auto& row : kernel_rows(grid, ms, c.model, c.quad, step, {})) csv.row(row);
  } else if (sweep->parsed()) {
    const auto grid = parse_grid(sweep_grid);
    const auto ms = normalize_methods(sweep_methods);
    std::vector<double> gs;
    if (!gammas.empty()) {
      gs = gammas;
    } else {
      // gamma = (4 l_gamma l^3)^{-1/2}
      for (double lg : lgammas) {
        if (!(lg > 0)) throw ArgError("l_gamma targets must be > 0");
        gs.push_back(1.0 / std::sqrt(4.0 * lg * scales.l * scales.l * scales.l));
      }
    }
    for (double g : gs) {
      if (!(g > 0) || !std::isfinite(g)) throw ArgError("gamma values must be finite and > 0");
    }
    csv.comment("command=sweep-gamma " + c.describe() + " q=" + sweep_grid + " methods=" + join(ms, ','));
    csv.header({"l_gamma", "gamma", "q", "method", "re", "im", "abs"});
    for (double g : gs) {
      ModelParams m = c.model;
      m.gamma = g;
      const DerivedScales s = derived_scales(m);
      for (const auto& row : kernel_rows(grid, ms, m, c.quad, m.tau, {fmt(s.l_gamma), fmt(g)})) csv.row(row);
    }
  } else if (border->parsed()) {
    const BorderResult b = find_border(c.model);
    csv.comment("command=border " + c.describe());
    csv.header({"l_gamma_analytic", "q_border", "relative_difference", "collision_residual"});
    csv.row({fmt(scales.l_gamma), fmt(b.q_border), fmt(std::fabs(b.q_border - scales.l_gamma) / scales.l_gamma),
             fmt(b.collision_residual)});
  } else if (saddles->parsed()) {
    const auto grid = parse_grid(saddle_grid);
    csv.comment("command=saddles " + c.describe() + " q=" + saddle_grid +
                " boundary_tol=" + fmt(default_boundary_tol(scales)));
    csv.header({"q", "index", "kind", "re", "im", "contributing", "status"});
    auto blocks = parallel_map(grid.size(), [&](std::size_t i) {
      const double q = grid[i];
      const RegionClass region = classify_region(q, scales, default_boundary_tol(scales));
      std::vector<SaddlePoint> set;
      std::string status = "ok";
      try {
        if (region == RegionClass::ConventionalCaustic || region == RegionClass::HKCaustic) {
          set = find_saddles(q, c.model).saddles;
          status = to_string(region);
        } else {
          set = contributing_set(q, c.model);
        }
      } catch (const hkfold::Error& e) {
        throw PointFailure("numerical failure at q=" + fmt(q) + " method=saddles: " + e.what());
      }
      std::vector<std::vector<std::string>> rows;
      for (std::size_t k = 0; k < set.size(); ++k) {
        rows.push_back({fmt(q), std::to_string(k), to_string(set[k].kind), fmt(set[k].p.real()),
                        fmt(set[k].p.imag()), set[k].contributing ? "1" : "0", status});
      }
      return rows;
    });
    for (auto& block : blocks) {
      for (auto& row : block) csv.row(row);
    }
  } else if (manifold->parsed()) {
    const bool is_morse = model_name == "morse";
    const double t = std::isnan(m_t) ? (is_morse ? 18.0 : c.model.tau) : m_t;
    const double q0 = std::isnan(m_q0) ? (is_morse ? 9.0 : 0.0) : m_q0;
    const double pmin = std::isnan(m_pmin) ? (is_morse ? -3.0 : -2.0) : m_pmin;
    const double pmax = std::isnan(m_pmax) ? (is_morse ? 3.0 : 2.0) : m_pmax;
    const int n = m_n > 0 ? m_n : (is_morse ? 601 : 201);
    if (m_n < 0 || (m_n > 0 && m_n < 2)) throw ArgError("--n must be >= 2");
    if (!(pmin < pmax)) throw ArgError("--p-min must be < --p-max");
    if (!(t >= 0) || !std::isfinite(t)) throw ArgError("--t must be finite and >= 0");
    if (t > 0 && !(m_dt > 0 && m_dt <= t)) throw ArgError("--dt must satisfy 0 < dt <= t");
    if (is_morse) {
      morse = std::isnan(morse_D) ? MorseParams::from_recipe(morse.epsilon, morse.lambda)
                                  : MorseParams{morse.epsilon, morse.lambda, morse_D};
    }
    const Hamiltonian1D ham = is_morse ? morse_hamiltonian(morse) : folding_hamiltonian(c.model.g);
    EvolvedManifold em;
    CausticScan scan;
    try {
      em = evolve_manifold(ham, build_line_manifold(q0, pmin, pmax, n), t, t > 0 ? m_dt : 1.0);
      scan = detect_caustics(em);
    } catch (const DivergenceError& e) {
      throw PointFailure(std::string("trajectory divergence: ") + e.what());
    }
    std::string extra = " model=" + model_name + " t=" + fmt(t) + " dt=" + fmt(m_dt) + " q0=" + fmt(q0) +
                        " p_min=" + fmt(pmin) + " p_max=" + fmt(pmax) + " n=" + std::to_string(n);
    if (is_morse) {
      extra += " epsilon=" + fmt(morse.epsilon) + " lambda=" + fmt(morse.lambda) + " D=" + fmt(morse.D);
    }
    csv.comment("command=manifold " + c.describe() + extra);
    csv.comment("caustics=" + std::to_string(scan.caustics.size()) +
                " unresolved=" + std::to_string(scan.unresolved.size()));
    csv.header({"record", "parameter", "parameter_hi", "q", "p", "m11", "m12", "m21", "m22"});
    const std::string nan = fmt(NAN);
    for (std::size_t i = 0; i < em.trajectories.size(); ++i) {
      const TrajectoryResult& tr = em.trajectories[i];
      csv.row({"point", fmt(em.initial.parameter[i]), nan, fmt(tr.q_t), fmt(tr.p_t), fmt(tr.M.m11),
               fmt(tr.M.m12), fmt(tr.M.m21), fmt(tr.M.m22)});
    }
    for (const Caustic& k : scan.caustics) {
      csv.row({"caustic", fmt(k.parameter), nan, fmt(k.q), fmt(k.p), nan, nan, nan, nan});
    }
    for (const UnresolvedInterval& u : scan.unresolved) {
      csv.row({"unresolved", fmt(u.parameter_lo), fmt(u.parameter_hi), nan, nan, nan, nan, nan, nan});
    }
  } else if (scaling->parsed()) {
    const RegionClass region = region_name == "allowed"   ? RegionClass::Allowed
                               : region_name == "shallow" ? RegionClass::Shallow
                                                          : RegionClass::Deep;
    const double tgt = !std::isnan(target) ? target
                       : region == RegionClass::Allowed ? -4.0
                       : region == RegionClass::Shallow ? 0.5
                                                        : 2.0;
    const ScalingProtocol protocol =
        protocol_name == "classical" ? ScalingProtocol::ClassicalLimit : ScalingProtocol::FixedDimensionless;
    if (hbars.empty()) throw ArgError("--hbars must not be empty");
    for (double h : hbars) {
      if (!(h > 0) || !std::isfinite(h)) throw ArgError("hbar values must be finite and > 0");
    }
    csv.comment("command=scaling " + c.describe() + " region=" + region_name + " target=" + fmt(tgt) +
                " protocol=" + protocol_name);
    csv.header({"hbar", "gamma", "l", "l_gamma", "q", "k_exact", "k_hk", "rel_dev", "abs_log_ratio"});
    auto rows = parallel_map(hbars.size(), [&](std::size_t i) {
      try {
        return hbar_scaling_study(tgt, region, {hbars[i]}, c.model, protocol, c.quad).front();
      } catch (const std::invalid_argument& e) {
        throw ArgError(e.what());
      } catch (const hkfold::Error& e) {
        throw PointFailure("numerical failure at hbar=" + fmt(hbars[i]) + " method=hk: " + e.what());
      }
    });
    for (const ScalingRow& r : rows) {
      csv.row({fmt(r.hbar), fmt(r.gamma), fmt(r.l), fmt(r.l_gamma), fmt(r.q), fmt(r.k_exact), fmt(r.k_hk),
               fmt(r.rel_dev), fmt(r.abs_log_ratio)});
    }
  }

  std::cout << out.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ArgError& e) {
    std::cerr << "hkfold: " << e.what() << '\n';
    return 2;
  } catch (const PointFailure& e) {
    std::cerr << "hkfold: " << e.what() << '\n';
    return 3;
  } catch (const hkfold::Error& e) {
    std::cerr << "hkfold: numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "hkfold: " << e.what() << '\n';
    return 2;
  }
}
