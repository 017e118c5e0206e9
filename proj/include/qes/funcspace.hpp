#pragma once

// Scalar real functions on the full line: generator functions with analytic
// derivatives up to third order, and memoized cumulative integrals.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qes/error.hpp"

namespace qes {

using RealFn = std::function<double(double)>;

// ---------------------------------------------------------------------------
// GeneratorFunction
// ---------------------------------------------------------------------------

/// A smooth function of one variable together with its first three
/// derivatives. `scale_hint` is a characteristic length used for step sizes,
/// probe radii and domain truncation.
class GeneratorFunction {
 public:
  GeneratorFunction(RealFn f, RealFn d1, RealFn d2, RealFn d3, double scale_hint,
                    std::string label, bool numeric_derivatives = false)
      : f_(std::move(f)),
        d1_(std::move(d1)),
        d2_(std::move(d2)),
        d3_(std::move(d3)),
        scale_hint_(scale_hint),
        label_(std::move(label)),
        numeric_(numeric_derivatives) {
    if (!(scale_hint_ > 0.0) || !std::isfinite(scale_hint_)) {
      throw ParameterError("scale_hint must be > 0");
    }
  }

  double eval(double x) const { return f_(x); }
  double deriv1(double x) const { return d1_(x); }
  double deriv2(double x) const { return d2_(x); }
  double deriv3(double x) const { return d3_(x); }

  /// order 0..3
  double deriv(int order, double x) const {
    switch (order) {
      case 0: return f_(x);
      case 1: return d1_(x);
      case 2: return d2_(x);
      case 3: return d3_(x);
      default: throw ParameterError("derivative order must be in 0..3");
    }
  }

  double operator()(double x) const { return f_(x); }

  double scale_hint() const noexcept { return scale_hint_; }
  const std::string& label() const noexcept { return label_; }

  /// True when some derivatives come from finite differences instead of
  /// analytic formulas. Reports carry this flag.
  bool numeric_derivatives() const noexcept { return numeric_; }

  const RealFn& fn() const noexcept { return f_; }
  const RealFn& fn1() const noexcept { return d1_; }
  const RealFn& fn2() const noexcept { return d2_; }
  const RealFn& fn3() const noexcept { return d3_; }

 private:
  RealFn f_, d1_, d2_, d3_;
  double scale_hint_;
  std::string label_;
  bool numeric_;
};

inline GeneratorFunction make_analytic(RealFn eval, RealFn d1, RealFn d2, RealFn d3,
                                       double scale_hint, std::string label) {
  return GeneratorFunction(std::move(eval), std::move(d1), std::move(d2), std::move(d3),
                           scale_hint, std::move(label));
}

namespace detail {

inline double central_d1(const RealFn& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double central_d2(const RealFn& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

inline double central_d3(const RealFn& f, double x, double h) {
  return (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) /
         (2.0 * h * h * h);
}

}  // namespace detail

/// Finite-difference fallback: all derivatives from central differences with
/// step scale_hint*1e-4. The result is flagged as numeric.
inline GeneratorFunction make_numeric(RealFn eval, double scale_hint, std::string label) {
  const double h = scale_hint * 1e-4;
  RealFn d1 = [eval, h](double x) { return detail::central_d1(eval, x, h); };
  RealFn d2 = [eval, h](double x) { return detail::central_d2(eval, x, h); };
  RealFn d3 = [eval, h](double x) { return detail::central_d3(eval, x, h); };
  return GeneratorFunction(std::move(eval), std::move(d1), std::move(d2), std::move(d3),
                           scale_hint, std::move(label), true);
}

/// Analytic value and first two derivatives, third derivative from a
/// five-point stencil on the analytic second derivative (step
/// scale_hint*1e-3). Flagged as numeric.
inline GeneratorFunction make_with_numeric_d3(RealFn eval, RealFn d1, RealFn d2,
                                              double scale_hint, std::string label) {
  const double h = scale_hint * 1e-3;
  RealFn d3 = [d2, h](double x) {
    return (-d2(x + 2.0 * h) + 8.0 * d2(x + h) - 8.0 * d2(x - h) + d2(x - 2.0 * h)) / (12.0 * h);
  };
  return GeneratorFunction(std::move(eval), std::move(d1), std::move(d2), std::move(d3),
                           scale_hint, std::move(label), true);
}

struct DerivativeDiagnostic {
  double x = 0.0;
  int order = 0;  // derivative order being checked (1..3); 0 for non-finite value
  double supplied = 0.0;
  double finite_difference = 0.0;
  double relative_error = 0.0;
  std::string message;
};

inline constexpr double kDerivativeTolerance = 1e-5;

/// Compares each supplied derivative against a central difference of the
/// next-lower one (step scale_hint*1e-4). An empty result means every sample
/// agrees to kDerivativeTolerance.
inline std::vector<DerivativeDiagnostic> validate_derivatives(const GeneratorFunction& f,
                                                              std::span<const double> samples) {
  if (samples.empty()) throw ParameterError("validate_derivatives needs at least one sample");
  const double h = f.scale_hint() * 1e-4;
  std::vector<DerivativeDiagnostic> out;
  for (double x : samples) {
    bool finite = true;
    for (int k = 0; k <= 3; ++k) {
      const double v = f.deriv(k, x);
      if (!std::isfinite(v)) {
        out.push_back({x, k, v, v, INFINITY,
                       "non-finite value of derivative order " + std::to_string(k)});
        finite = false;
      }
    }
    if (!finite) continue;
    for (int k = 1; k <= 3; ++k) {
      const double supplied = f.deriv(k, x);
      const double fd = (f.deriv(k - 1, x + h) - f.deriv(k - 1, x - h)) / (2.0 * h);
      const double denom = std::max({1.0, std::abs(supplied), std::abs(fd)});
      const double rel = std::abs(supplied - fd) / denom;
      if (!(rel <= kDerivativeTolerance)) {
        out.push_back({x, k, supplied, fd, rel,
                       "derivative order " + std::to_string(k) + " disagrees with finite difference"});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

namespace detail {

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
template <std::size_t N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre() {
    for (std::size_t i = 0; i < (N + 1) / 2; ++i) {
      double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                          (static_cast<double>(N) + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = 0.0;
        for (std::size_t j = 1; j <= N; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / static_cast<double>(j);
        }
        dp = static_cast<double>(N) * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      const double w = 2.0 / ((1.0 - z * z) * dp * dp);
      nodes[i] = -z;
      nodes[N - 1 - i] = z;
      weights[i] = w;
      weights[N - 1 - i] = w;
    }
  }
};

inline const GaussLegendre<16>& gl16() {
  static const GaussLegendre<16> rule;
  return rule;
}

inline double checked(const RealFn& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) throw NonFiniteError("non-finite integrand value", x);
  return v;
}

inline double gl16_panel(const RealFn& f, double a, double b) {
  const auto& rule = gl16();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < 16; ++i) sum += rule.weights[i] * checked(f, mid + half * rule.nodes[i]);
  return half * sum;
}

inline double adaptive_panel(const RealFn& f, double a, double b, double whole, double tol,
                             int depth) {
  const double m = 0.5 * (a + b);
  const double left = gl16_panel(f, a, m);
  const double right = gl16_panel(f, m, b);
  const double refined = left + right;
  // the relative floor stops refinement once the difference is roundoff
  const double floor = 1e-13 * (std::abs(left) + std::abs(right));
  if (depth <= 0 || std::abs(refined - whole) <= std::max(tol, floor)) return refined;
  return adaptive_panel(f, a, m, left, tol, depth - 1) +
         adaptive_panel(f, m, b, right, tol, depth - 1);
}

}  // namespace detail

/// Panel-based quadrature configuration: 16-point Gauss-Legendre per panel,
/// panels halved until successive estimates agree to `abs_tol`.
struct QuadratureSpec {
  double panel_width = 0.125;
  double abs_tol = 1e-10;
  int max_depth = 16;

  static QuadratureSpec for_scale(double scale_hint) {
    QuadratureSpec q;
    q.panel_width = scale_hint / 8.0;
    return q;
  }
};

/// Adaptive integral over a single panel [a, b].
inline double integrate_panel(const RealFn& f, double a, double b, const QuadratureSpec& spec) {
  if (a == b) return 0.0;
  return detail::adaptive_panel(f, a, b, detail::gl16_panel(f, a, b), spec.abs_tol,
                                spec.max_depth);
}

/// Composite adaptive quadrature of f over [a, b] (oriented).
inline double integrate(const RealFn& f, double a, double b, const QuadratureSpec& spec) {
  if (a == b) return 0.0;
  if (b < a) return -integrate(f, b, a, spec);
  const auto panels = static_cast<std::size_t>(std::ceil((b - a) / spec.panel_width));
  const double w = (b - a) / static_cast<double>(std::max<std::size_t>(panels, 1));
  double sum = 0.0;
  for (std::size_t k = 0; k < std::max<std::size_t>(panels, 1); ++k) {
    const double lo = a + static_cast<double>(k) * w;
    const double hi = (k + 1 == panels) ? b : a + static_cast<double>(k + 1) * w;
    sum += integrate_panel(f, lo, hi, spec);
  }
  return sum;
}

// ---------------------------------------------------------------------------
// CumulativeIntegral
// ---------------------------------------------------------------------------

/// x -> integral of f from base_point to x. Full panels on either side of the
/// base point are summed once and cached; copies share the cache, which is
/// guarded by a mutex so concurrent reads see the same values as serial ones.
class CumulativeIntegral {
 public:
  CumulativeIntegral(RealFn integrand, double base_point, QuadratureSpec spec)
      : state_(std::make_shared<State>(std::move(integrand), base_point, spec)) {
    if (!(spec.panel_width > 0.0)) throw ParameterError("panel width must be > 0");
  }

  double base_point() const noexcept { return state_->base; }
  const QuadratureSpec& spec() const noexcept { return state_->spec; }
  const RealFn& integrand() const noexcept { return state_->f; }

  double eval(double x) const {
    const State& s = *state_;
    if (!std::isfinite(x)) throw NonFiniteError("cumulative integral queried", x);
    if (x == s.base) return 0.0;
    const double w = s.spec.panel_width;
    const bool right = x > s.base;
    const double dist = right ? x - s.base : s.base - x;
    const auto k = static_cast<std::size_t>(std::floor(dist / w));
    const double prefix = s.prefix(right, k);
    const double edge = right ? s.base + static_cast<double>(k) * w
                              : s.base - static_cast<double>(k) * w;
    return prefix + integrate_panel(s.f, edge, x, s.spec);
  }

  double operator()(double x) const { return eval(x); }

 private:
  struct State {
    State(RealFn f_, double base_, QuadratureSpec spec_)
        : f(std::move(f_)), base(base_), spec(spec_) {}

    RealFn f;
    double base;
    QuadratureSpec spec;
    mutable std::mutex mutex;
    mutable std::vector<double> right_sums{0.0};  // right_sums[k] = I(base + k w)
    mutable std::vector<double> left_sums{0.0};   // left_sums[k]  = I(base - k w)

    double prefix(bool right, std::size_t k) const {
      std::lock_guard<std::mutex> lock(mutex);
      auto& sums = right ? right_sums : left_sums;
      while (sums.size() <= k) {
        const auto j = static_cast<double>(sums.size() - 1);
        const double w = spec.panel_width;
        const double a = right ? base + j * w : base - j * w;
        const double b = right ? base + (j + 1.0) * w : base - (j + 1.0) * w;
        sums.push_back(sums.back() + integrate_panel(f, a, b, spec));
      }
      return sums[k];
    }
  };

  std::shared_ptr<State> state_;
};

inline CumulativeIntegral cumulative_integral(RealFn integrand, double base_point,
                                              const QuadratureSpec& spec) {
  return CumulativeIntegral(std::move(integrand), base_point, spec);
}

}  // namespace qes
