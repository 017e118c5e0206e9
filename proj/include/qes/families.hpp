#pragma once

// Built-in example families with their closed forms:
//   poly-wplus    W₊ = ax + bx³
//   poly-phi      φ = ax + bx³/3 with free ε
//   poly-phi-ces  same φ at ε = 3b/2a, where H₊ is a shifted oscillator
//   sinh-wplus    W₊ = A(sinh αx - sinh αx₀)

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qes/constructors.hpp"
#include "qes/error.hpp"
#include "qes/funcspace.hpp"
#include "qes/susy_core.hpp"

namespace qes {

namespace detail {

inline void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(name) + " must be > 0");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// W₊ = ax + bx³
// ---------------------------------------------------------------------------

struct PolyWplusParams {
  double a = 2.0;
  double b = 1.0;

  void validate() const {
    detail::require_positive(a, "a");
    detail::require_positive(b, "b");
  }
};

inline GeneratorFunction poly_wplus_generator(const PolyWplusParams& p) {
  const double a = p.a, b = p.b;
  return make_analytic([a, b](double x) { return a * x + b * x * x * x; },
                       [a, b](double x) { return a + 3.0 * b * x * x; },
                       [b](double x) { return 6.0 * b * x; }, [b](double) { return 6.0 * b; },
                       std::sqrt(2.0 / a), "a*x+b*x^3");
}

/// V₋ = (a²-12b)x²/8 + abx⁴/4 + b²x⁶/8 + 3ab/(8(a+bx²)²) + 3b/(8(a+bx²)) - a/4
inline ClosedForm poly_wplus_closed_form(const PolyWplusParams& p) {
  const double a = p.a, b = p.b;
  auto vm = [a, b](double x) {
    const double x2 = x * x;
    const double q = a + b * x2;
    return (a * a - 12.0 * b) * x2 / 8.0 + a * b * x2 * x2 / 4.0 + b * b * x2 * x2 * x2 / 8.0 +
           3.0 * a * b / (8.0 * q * q) + 3.0 * b / (8.0 * q) - a / 4.0;
  };
  // V₊ = V₋ + W' with W = (W₊ - 3bx/(a+bx²))/2
  auto wprime = [a, b](double x) {
    const double q = a + b * x * x;
    return 0.5 * (a + 3.0 * b * x * x - 3.0 * b * (a - b * x * x) / (q * q));
  };
  auto vp = [vm, wprime](double x) { return vm(x) + wprime(x); };
  auto gauss = [a, b](double x) { return std::exp(-x * x * (2.0 * a + b * x * x) / 8.0); };
  auto psi0 = [a, b, gauss](double x) { return std::pow(a + b * x * x, 0.75) * gauss(x); };
  auto psi1 = [a, b, gauss](double x) { return x * std::pow(a + b * x * x, 0.25) * gauss(x); };
  return ClosedForm{vm, vp, psi0, psi1};
}

inline QesModel poly_wplus_model(const PolyWplusParams& p) {
  p.validate();
  QesModel m = method_a_build(poly_wplus_generator(p));
  m.provenance = Provenance{"method_a", "poly-wplus", {{"a", p.a}, {"b", p.b}}};
  m.closed_form = poly_wplus_closed_form(p);
  return m;
}

// ---------------------------------------------------------------------------
// φ = ax + bx³/3
// ---------------------------------------------------------------------------

/// Parameters and the derived coefficients of
///   V₋ = A₋x²/2 + B₋/(a+bx²) + D₋/(a+bx²)² + R₋
///   V₊ = A₊x²/2 + D₊/(a+bx²)² + R₊
struct PolyPhiParams {
  double a = 1.0;
  double b = 1.0;
  double epsilon = 1.0;

  double A_minus = 0.0, A_plus = 0.0;
  double B_minus = 0.0;
  double R_minus = 0.0, R_plus = 0.0;
  double D_minus = 0.0, D_plus = 0.0;

  PolyPhiParams() { derive(); }
  PolyPhiParams(double a_, double b_, double eps_) : a(a_), b(b_), epsilon(eps_) {
    validate();
    derive();
  }

  void validate() const {
    detail::require_positive(a, "a");
    detail::require_positive(b, "b");
    detail::require_positive(epsilon, "epsilon");
  }

 private:
  void derive() {
    const double e = epsilon;
    A_minus = A_plus = e * e / 9.0;
    B_minus = b + 2.0 * a * e / 3.0;
    R_minus = e / (18.0 * b) * (3.0 * b + 4.0 * a * e);
    // V₊ - V₋ = W' fixes the constant of V₊ at R₋ + ε/3.
    R_plus = R_minus + e / 3.0;
    D_minus = -(27.0 * a * b * b + 24.0 * a * a * b * e + 4.0 * a * a * a * e * e) / (18.0 * b);
    D_plus = (9.0 * a * b * b - 4.0 * a * a * a * e * e) / (18.0 * b);
  }
};

inline GeneratorFunction poly_phi_generator(double a, double b, double scale_hint) {
  return make_analytic([a, b](double x) { return a * x + b * x * x * x / 3.0; },
                       [a, b](double x) { return a + b * x * x; },
                       [b](double x) { return 2.0 * b * x; }, [b](double) { return 2.0 * b; },
                       scale_hint, "a*x+b*x^3/3");
}

inline double poly_phi_scale(double epsilon) { return 1.0 / std::sqrt(epsilon); }

inline ClosedForm poly_phi_closed_form(const PolyPhiParams& p) {
  const double a = p.a, b = p.b, e = p.epsilon;
  const double am = p.A_minus, ap = p.A_plus, bm = p.B_minus, rm = p.R_minus, rp = p.R_plus,
               dm = p.D_minus, dp = p.D_plus;
  auto vm = [a, b, am, bm, dm, rm](double x) {
    const double q = a + b * x * x;
    return 0.5 * am * x * x + bm / q + dm / (q * q) + rm;
  };
  auto vp = [a, b, ap, dp, rp](double x) {
    const double q = a + b * x * x;
    return 0.5 * ap * x * x + dp / (q * q) + rp;
  };
  const double power = -0.5 - a * e / (3.0 * b);
  auto psi0 = [a, b, e, power](double x) {
    return std::pow(a + b * x * x, power) * std::exp(-e * x * x / 6.0);
  };
  auto psi1 = [a, b, psi0](double x) { return (a * x + b * x * x * x / 3.0) * psi0(x); };
  return ClosedForm{vm, vp, psi0, psi1};
}

inline QesModel poly_phi_model(const PolyPhiParams& p) {
  p.validate();
  QesModel m = method_b_build(poly_phi_generator(p.a, p.b, poly_phi_scale(p.epsilon)), p.epsilon);
  m.provenance =
      Provenance{"method_b", "poly-phi", {{"a", p.a}, {"b", p.b}, {"epsilon", p.epsilon}}};
  m.closed_form = poly_phi_closed_form(p);
  return m;
}

// ---------------------------------------------------------------------------
// ε = 3b/2a: W₁ = εx/3 and V₊ = (b²/8a²)x² + 5b/4a
// ---------------------------------------------------------------------------

inline double ces_epsilon(double a, double b) { return 1.5 * b / a; }

/// E₀ = 0 and Eₙ = E⁺ₙ₋₁ = (b/a)(n/2 + 1) for n >= 1.
inline std::vector<double> ces_exact_spectrum(double a, double b, int n_max) {
  detail::require_positive(a, "a");
  detail::require_positive(b, "b");
  if (n_max < 0) throw ParameterError("n_max must be >= 0");
  std::vector<double> e{0.0};
  for (int n = 1; n <= n_max; ++n) e.push_back((b / a) * (0.5 * n + 1.0));
  return e;
}

inline QesModel poly_phi_ces_model(double a, double b) {
  detail::require_positive(a, "a");
  detail::require_positive(b, "b");
  QesModel m = poly_phi_model(PolyPhiParams(a, b, ces_epsilon(a, b)));
  m.provenance = Provenance{"method_b", "poly-phi-ces", {{"a", a}, {"b", b}}};
  const auto ladder = ces_exact_spectrum(a, b, 8);
  m.exact_levels.assign(ladder.begin() + 2, ladder.end());
  return m;
}

/// n-th oscillator eigenfunction H_n(√ω x)e^{-ωx²/2} and its derivative.
inline std::pair<RealFn, RealFn> hermite_function(int n, double omega) {
  if (n < 0) throw ParameterError("hermite index must be >= 0");
  const double root = std::sqrt(omega);
  auto hermite = [](int k, double xi) {
    double h0 = 1.0, h1 = 2.0 * xi;
    if (k == 0) return h0;
    for (int j = 1; j < k; ++j) {
      const double h2 = 2.0 * xi * h1 - 2.0 * j * h0;
      h0 = h1;
      h1 = h2;
    }
    return h1;
  };
  RealFn f = [n, root, hermite](double x) {
    const double xi = root * x;
    return hermite(n, xi) * std::exp(-0.5 * xi * xi);
  };
  RealFn df = [n, root, hermite](double x) {
    const double xi = root * x;
    const double lower = n > 0 ? 2.0 * n * hermite(n - 1, xi) : 0.0;
    return root * (lower - xi * hermite(n, xi)) * std::exp(-0.5 * xi * xi);
  };
  return {std::move(f), std::move(df)};
}

/// ψₙ⁻ = B⁺ψ⁺ₙ₋₁/√E⁺ₙ₋₁ with ψ⁺ the oscillator states of V₊.
inline Eigenstate ces_excited_states(double a, double b, int n) {
  if (n < 1) throw ParameterError("n must be >= 1 (use ground_state_minus for n = 0)");
  const QesModel m = poly_phi_ces_model(a, b);
  const double omega = 0.5 * b / a;
  const double energy_plus = omega * (n - 1) + m.epsilon;
  auto [f, df] = hermite_function(n - 1, omega);
  return apply_raising(m.W, f, df, energy_plus, n - 1);
}

// ---------------------------------------------------------------------------
// W₊ = A(sinh αx - sinh αx₀)
// ---------------------------------------------------------------------------

struct SinhWplusParams {
  double A = 1.0;
  double alpha = 1.0;
  double x0 = 0.0;

  void validate() const {
    detail::require_positive(A, "A");
    detail::require_positive(alpha, "alpha");
    if (!std::isfinite(x0)) throw ParameterError("x0 must be finite");
  }
};

inline GeneratorFunction sinh_wplus_generator(const SinhWplusParams& p) {
  const double A = p.A, al = p.alpha, shift = std::sinh(p.alpha * p.x0);
  return make_analytic([A, al, shift](double x) { return A * (std::sinh(al * x) - shift); },
                       [A, al](double x) { return A * al * std::cosh(al * x); },
                       [A, al](double x) { return A * al * al * std::sinh(al * x); },
                       [A, al](double x) { return A * al * al * al * std::cosh(al * x); },
                       1.0 / al, "A*(sinh(alpha*x)-sinh(alpha*x0))");
}

inline QesModel sinh_wplus_model(const SinhWplusParams& p) {
  p.validate();
  QesModel m = method_a_build(sinh_wplus_generator(p));
  m.provenance =
      Provenance{"method_a", "sinh-wplus", {{"A", p.A}, {"alpha", p.alpha}, {"x0", p.x0}}};
  return m;
}

}  // namespace qes
