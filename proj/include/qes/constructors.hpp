#pragma once

// Two routes from one generator function to a potential with two known
// eigenstates, both built on W'₊ = W₋W₊ + 2ε with W± = W₁ ± W:
//   method_a_build: given W₊, solve for W₋ = (W'₊ - 2ε)/W₊.
//   method_b_build: given φ with W₋ = -φ''/φ', the solution is W₊ = 2εφ/φ',
//   so W = (φ''/2 + εφ)/φ' and W₁ = (εφ - φ''/2)/φ'.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "qes/error.hpp"
#include "qes/funcspace.hpp"
#include "qes/susy_core.hpp"

namespace qes {

inline constexpr int kProbePoints = 401;
inline constexpr double kProbeHalfWidth = 8.0;  // in units of scale_hint
inline constexpr double kRiccatiTolerance = 1e-9;
inline constexpr double kCrossCheckTolerance = 1e-8;

/// Switch-over radius (in units of scale_hint) below which the removable
/// singularity of (W'₊(x) - W'₊(x₀))/W₊(x) is evaluated from its Taylor
/// expansion about x₀.
inline constexpr double kTaylorRadius = 1e-5;

struct Provenance {
  std::string method;                    // "method_a", "method_b"
  std::string family;                    // family name, or "custom"
  std::map<std::string, double> params;
};

/// Closed forms printed for the built-in families, kept beside the generic
/// construction so the two can be compared.
struct ClosedForm {
  RealFn v_minus;
  RealFn v_plus;
  RealFn psi0;
  RealFn psi1;
};

struct QesModel {
  Superpotential W;
  Superpotential W1;
  double epsilon = 0.0;
  double x0 = 0.0;
  double scale_hint = 1.0;
  PotentialPair potentials;
  Eigenstate psi0;
  Eigenstate psi1;
  RealFn w_plus;        // W₁ + W
  RealFn w_plus_prime;
  Provenance provenance;
  std::optional<ClosedForm> closed_form;
  /// Additional exactly known levels of H₋ beyond E₀, E₁ (exactly solvable case).
  std::vector<double> exact_levels;
  bool numeric_derivatives = false;
  std::vector<std::string> diagnostics;
};

inline std::vector<double> probe_grid(double center, double scale_hint,
                                      int points = kProbePoints,
                                      double half_width = kProbeHalfWidth) {
  // symmetric about `center`, which is itself a sample when points is odd
  std::vector<double> xs(static_cast<std::size_t>(points));
  const double step = 2.0 * half_width * scale_hint / (points - 1);
  const double mid = 0.5 * (points - 1);
  for (int i = 0; i < points; ++i) xs[static_cast<std::size_t>(i)] = center + (i - mid) * step;
  xs.front() = center - half_width * scale_hint;
  xs.back() = center + half_width * scale_hint;
  return xs;
}

inline std::vector<double> probe_grid(const QesModel& m) { return probe_grid(m.x0, m.scale_hint); }

namespace detail {

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

/// Sign changes of the nonzero samples, in order, as (last nonzero index, next
/// nonzero index) pairs.
inline std::vector<std::pair<std::size_t, std::size_t>> sign_changes(
    const std::vector<double>& values) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0.0) continue;
    if (prev && sign_of(values[*prev]) != sign_of(values[i])) out.emplace_back(*prev, i);
    prev = i;
  }
  return out;
}

}  // namespace detail

/// Locates the unique sign change of f on a 401-point scan of
/// [-search_radius, search_radius] and refines it by bracketing (TOMS 748).
inline double find_single_zero(const GeneratorFunction& f, double search_radius) {
  if (!(search_radius > 0.0)) throw ParameterError("search_radius must be > 0");
  const auto xs = probe_grid(0.0, search_radius, kProbePoints, 1.0);
  std::vector<double> vals(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    vals[i] = f.eval(xs[i]);
    if (!std::isfinite(vals[i])) throw NonFiniteError("non-finite generator value", xs[i]);
  }
  const auto changes = detail::sign_changes(vals);
  if (changes.size() >= 2) {
    throw ConstructionError("W+ has multiple zeros: not supported (" + f.label() + ")");
  }
  if (changes.empty() || !(vals.front() < 0.0) || !(vals.back() > 0.0)) {
    throw ConstructionError("sign condition violated");
  }
  auto [i, j] = changes.front();
  if (j > i + 1) return xs[i + 1];  // exact zero(s) sampled between the two signs
  double lo = xs[i], hi = xs[j];
  std::uintmax_t max_iter = 200;
  auto fn = [&f](double x) { return f.eval(x); };
  auto [a, b] = boost::math::tools::toms748_solve(fn, lo, hi, vals[i], vals[j],
                                                  boost::math::tools::eps_tolerance<double>(),
                                                  max_iter);
  return std::abs(f.eval(a)) <= std::abs(f.eval(b)) ? a : b;
}

inline double epsilon_from_wplus(const GeneratorFunction& w_plus, double x0) {
  const double slope = w_plus.deriv1(x0);
  if (!(slope > 0.0)) throw ConstructionError("non-transversal or wrongly oriented zero");
  return 0.5 * slope;
}

namespace detail {

/// R(x) = (W'₊(x) - W'₊(x₀))/W₊(x) and R'(x), with the Taylor form near x₀.
struct RemovableQuotient {
  GeneratorFunction w_plus;
  double x0, p1, p2, slope, delta;

  RemovableQuotient(GeneratorFunction f, double x0_)
      : w_plus(std::move(f)), x0(x0_) {
    p1 = w_plus.deriv1(x0);
    p2 = w_plus.deriv2(x0);
    const double p3 = w_plus.deriv3(x0);
    slope = p3 / (2.0 * p1) - p2 * p2 / (2.0 * p1 * p1);
    delta = kTaylorRadius * w_plus.scale_hint();
  }

  double value(double x) const {
    const double u = x - x0;
    if (std::abs(u) < delta) return p2 / p1 + u * slope;
    return (w_plus.deriv1(x) - p1) / w_plus.eval(x);
  }

  double derivative(double x) const {
    const double u = x - x0;
    if (std::abs(u) < delta) return slope;
    const double f = w_plus.eval(x);
    return (w_plus.deriv2(x) - value(x) * w_plus.deriv1(x)) / f;
  }
};

inline void require_sign_condition(const Superpotential& W, const char* name) {
  const auto check = check_sign_condition(W, default_probe_radius(W));
  if (!check) {
    std::string msg = std::string("inadmissible construction: ") + name +
                      " violates the asymptotic sign condition";
    for (const auto& d : check.diagnostics) msg += "; " + d;
    throw ConstructionError(msg);
  }
}

}  // namespace detail

inline QesModel method_a_build(const GeneratorFunction& w_plus) {
  const double s = w_plus.scale_hint();
  const double x0 = find_single_zero(w_plus, 2.0 * kProbeHalfWidth * s);
  const double eps = epsilon_from_wplus(w_plus, x0);
  auto quot = std::make_shared<detail::RemovableQuotient>(w_plus, x0);

  auto W = make_superpotential(
      [quot](double x) { return 0.5 * (quot->w_plus.eval(x) - quot->value(x)); },
      [quot](double x) { return 0.5 * (quot->w_plus.deriv1(x) - quot->derivative(x)); }, x0, s,
      "W[" + w_plus.label() + "]");
  auto W1 = make_superpotential(
      [quot](double x) { return 0.5 * (quot->w_plus.eval(x) + quot->value(x)); },
      [quot](double x) { return 0.5 * (quot->w_plus.deriv1(x) + quot->derivative(x)); }, x0, s,
      "W1[" + w_plus.label() + "]");
  detail::require_sign_condition(W, "W");
  detail::require_sign_condition(W1, "W1");

  auto i1 = W1.integral;
  auto w1 = W1.w;
  GeneratorFunction f = w_plus;
  Eigenstate psi1{
      eps,
      [f, i1](double x) { return f.eval(x) * std::exp(-i1.eval(x)); },
      [f, i1, w1](double x) { return (f.deriv1(x) - f.eval(x) * w1(x)) * std::exp(-i1.eval(x)); },
      std::nullopt, 1};
  QesModel m{.W = W,
             .W1 = W1,
             .epsilon = eps,
             .x0 = x0,
             .scale_hint = s,
             .potentials = pair_potentials(W),
             .psi0 = ground_state_minus(W),
             .psi1 = std::move(psi1),
             .w_plus = w_plus.fn(),
             .w_plus_prime = w_plus.fn1()};
  m.provenance = Provenance{"method_a", "custom", {}};
  m.numeric_derivatives = w_plus.numeric_derivatives();
  return m;
}

inline QesModel method_b_build(const GeneratorFunction& phi, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ParameterError("epsilon must be > 0");
  const double s = phi.scale_hint();
  const double x0 = find_single_zero(phi, 2.0 * kProbeHalfWidth * s);
  for (double x : probe_grid(x0, s)) {
    if (!(phi.deriv1(x) > 0.0)) {
      throw ConstructionError("φ not monotonically increasing (φ'(" + std::to_string(x) +
                              ") <= 0)");
    }
  }
  const double eps = epsilon;
  GeneratorFunction p = phi;

  auto w = [p, eps](double x) { return (0.5 * p.deriv2(x) + eps * p.eval(x)) / p.deriv1(x); };
  auto w1 = [p, eps](double x) { return (eps * p.eval(x) - 0.5 * p.deriv2(x)) / p.deriv1(x); };
  auto wp = [p, eps, w](double x) {
    const double d1 = p.deriv1(x);
    return (0.5 * p.deriv3(x) + eps * d1) / d1 - w(x) * p.deriv2(x) / d1;
  };
  auto w1p = [p, eps, w1](double x) {
    const double d1 = p.deriv1(x);
    return (eps * d1 - 0.5 * p.deriv3(x)) / d1 - w1(x) * p.deriv2(x) / d1;
  };
  auto W = make_superpotential(w, wp, x0, s, "W[" + phi.label() + "]");
  auto W1 = make_superpotential(w1, w1p, x0, s, "W1[" + phi.label() + "]");
  detail::require_sign_condition(W, "W");
  detail::require_sign_condition(W1, "W1");

  // ∫ φ/φ' from the node of φ
  CumulativeIntegral ratio([p](double x) { return p.eval(x) / p.deriv1(x); }, x0,
                           QuadratureSpec::for_scale(s));

  auto ground = [p, ratio, eps](double x) {
    return std::exp(-eps * ratio.eval(x)) / std::sqrt(p.deriv1(x));
  };
  QesModel m{
      .W = W,
      .W1 = W1,
      .epsilon = eps,
      .x0 = x0,
      .scale_hint = s,
      .potentials = pair_potentials(W),
      .psi0 = Eigenstate{0.0, ground, [ground, w](double x) { return -w(x) * ground(x); },
                         std::nullopt, 0},
      .psi1 = Eigenstate{
          eps, [p, ground](double x) { return p.eval(x) * ground(x); },
          [p, ground, w](double x) { return (p.deriv1(x) - p.eval(x) * w(x)) * ground(x); },
          std::nullopt, 1},
      .w_plus = [p, eps](double x) { return 2.0 * eps * p.eval(x) / p.deriv1(x); },
      .w_plus_prime =
          [p, eps](double x) {
            const double d1 = p.deriv1(x);
            return 2.0 * eps * (1.0 - p.eval(x) * p.deriv2(x) / (d1 * d1));
          }};
  m.provenance = Provenance{"method_b", "custom", {{"epsilon", eps}}};
  m.numeric_derivatives = phi.numeric_derivatives();
  return m;
}

/// W₊ = 2εφ/φ' as a generator for method_a_build. W₊''' would need φ'''',
/// so it is taken by central differences of the analytic W₊''.
inline GeneratorFunction wplus_from_phi(const GeneratorFunction& phi, double epsilon) {
  GeneratorFunction p = phi;
  const double eps = epsilon;
  RealFn f = [p, eps](double x) { return 2.0 * eps * p.eval(x) / p.deriv1(x); };
  RealFn d1 = [p, eps](double x) {
    const double q = p.deriv1(x);
    return 2.0 * eps * (1.0 - p.eval(x) * p.deriv2(x) / (q * q));
  };
  RealFn d2 = [p, eps](double x) {
    const double f0 = p.eval(x), q1 = p.deriv1(x), q2 = p.deriv2(x), q3 = p.deriv3(x);
    return -2.0 * eps * ((q1 * q2 + f0 * q3) / (q1 * q1) - 2.0 * f0 * q2 * q2 / (q1 * q1 * q1));
  };
  return make_with_numeric_d3(std::move(f), std::move(d1), std::move(d2), phi.scale_hint(),
                              "2*eps*phi/phi'[" + phi.label() + "]");
}

struct CrossCheck {
  double v_minus_sup = 0.0;  // sup |V₋ᴬ - V₋ᴮ| / max(1, |V₋ᴮ|)
  double psi0_sup = 0.0;     // sup difference of ψ₀ after normalizing both
  double psi1_sup = 0.0;
  double epsilon_diff = 0.0;
  double x0_diff = 0.0;

  double max() const { return std::max({v_minus_sup, psi0_sup, psi1_sup, epsilon_diff, x0_diff}); }
  bool ok() const { return max() < kCrossCheckTolerance; }
};

namespace detail {

/// sup |f/f(x*) - g/g(x*)| where x* maximizes |g| over the grid.
inline double normalized_sup_diff(const RealFn& f, const RealFn& g, const std::vector<double>& xs) {
  std::vector<double> fv(xs.size()), gv(xs.size());
  std::size_t imax = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fv[i] = f(xs[i]);
    gv[i] = g(xs[i]);
    if (std::abs(gv[i]) > std::abs(gv[imax])) imax = i;
  }
  double sup = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sup = std::max(sup, std::abs(fv[i] / fv[imax] - gv[i] / gv[imax]));
  }
  return sup;
}

}  // namespace detail

/// Builds the φ model directly and through method_a_build(2εφ/φ') and
/// reports the largest pointwise disagreement on the probe grid.
inline CrossCheck cross_check_methods(const GeneratorFunction& phi, double epsilon) {
  const QesModel b = method_b_build(phi, epsilon);
  const QesModel a = method_a_build(wplus_from_phi(phi, epsilon));
  CrossCheck out;
  const auto xs = probe_grid(b);
  for (double x : xs) {
    const double vb = b.potentials.v_minus(x);
    const double va = a.potentials.v_minus(x);
    out.v_minus_sup = std::max(out.v_minus_sup, std::abs(va - vb) / std::max(1.0, std::abs(vb)));
  }
  out.psi0_sup = detail::normalized_sup_diff(a.psi0.psi, b.psi0.psi, xs);
  out.psi1_sup = detail::normalized_sup_diff(a.psi1.psi, b.psi1.psi, xs);
  out.epsilon_diff = std::abs(a.epsilon - b.epsilon);
  out.x0_diff = std::abs(a.x0 - b.x0);
  return out;
}

// ---------------------------------------------------------------------------
// Structural invariants of a built model
// ---------------------------------------------------------------------------

struct ModelCheck {
  double riccati_sup = 0.0;       // scaled by riccati_term_scale
  double wplus_equation_sup = 0.0;  // W'₊ - (W₁ - W)W₊ - 2ε, scaled
  int wplus_zero_crossings = 0;
  int psi0_nodes = 0;
  int psi1_nodes = 0;
  bool psi1_vanishes_at_x0 = false;
  bool surface_term_decays = false;
  bool ok = false;
  std::vector<std::string> diagnostics;
};

inline ModelCheck check_model(const QesModel& m) {
  ModelCheck c;
  const auto xs = probe_grid(m);
  std::vector<double> wp(xs.size()), p0(xs.size()), p1(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const double scale = riccati_term_scale(m.W, m.W1, m.epsilon, x);
    c.riccati_sup = std::max(c.riccati_sup,
                             std::abs(riccati_residual(m.W, m.W1, m.epsilon, x)) / scale);
    const double wplus = m.W1.w(x) + m.W.w(x);
    const double wminus = m.W1.w(x) - m.W.w(x);
    const double lhs = m.w_plus_prime(x);
    const double rhs = wminus * wplus + 2.0 * m.epsilon;
    c.wplus_equation_sup =
        std::max(c.wplus_equation_sup,
                 std::abs(lhs - rhs) / (1.0 + std::abs(lhs) + std::abs(wminus * wplus) + 2.0 * m.epsilon));
    wp[i] = wplus;
    p0[i] = m.psi0.psi(x);
    p1[i] = m.psi1.psi(x);
  }
  auto crossings = [](const std::vector<double>& v) {
    double peak = 0.0;
    for (double e : v) peak = std::max(peak, std::abs(e));
    std::vector<double> clipped(v);
    for (double& e : clipped) {
      if (std::abs(e) <= 1e-9 * peak) e = 0.0;
    }
    return static_cast<int>(detail::sign_changes(clipped).size());
  };
  c.wplus_zero_crossings = crossings(wp);
  c.psi0_nodes = crossings(p0);
  c.psi1_nodes = crossings(p1);
  c.psi1_vanishes_at_x0 = std::abs(m.psi1.psi(m.x0)) <= 1e-12 * std::abs(m.psi0.psi(m.x0)) + 1e-300;

  // exp(-∫W₊) at the probe edges and one scale further out
  auto surface = [&m](double x) { return std::exp(-(m.W.integral.eval(x) + m.W1.integral.eval(x))); };
  const double r = kProbeHalfWidth * m.scale_hint;
  const double inner_r = surface(m.x0 + r), outer_r = surface(m.x0 + r + m.scale_hint);
  const double inner_l = surface(m.x0 - r), outer_l = surface(m.x0 - r - m.scale_hint);
  c.surface_term_decays = inner_r < 1.0 && inner_l < 1.0 && outer_r <= inner_r && outer_l <= inner_l;

  if (!(c.riccati_sup < kRiccatiTolerance)) c.diagnostics.push_back("Riccati residual too large");
  if (!(c.wplus_equation_sup < kRiccatiTolerance)) c.diagnostics.push_back("W+ equation residual too large");
  if (c.wplus_zero_crossings != 1) c.diagnostics.push_back("W+ does not have exactly one zero");
  if (c.psi0_nodes != 0) c.diagnostics.push_back("psi0 has nodes");
  if (c.psi1_nodes != 1) c.diagnostics.push_back("psi1 does not have exactly one node");
  if (!c.psi1_vanishes_at_x0) c.diagnostics.push_back("psi1 does not vanish at x0");
  if (!c.surface_term_decays) c.diagnostics.push_back("exp(-int W+) does not decay at the probe edges");
  if (!(m.epsilon > 0.0)) c.diagnostics.push_back("epsilon is not positive");
  c.ok = c.diagnostics.empty();
  return c;
}

}  // namespace qes
