#pragma once

// Superpotentials, partner potentials V± = (W² ± W')/2, the zero mode, the
// raising map B⁺ and the Riccati residual linking two superpotentials.
// Units: ħ = m = 1, H = -½ d²/dx² + V.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qes/error.hpp"
#include "qes/funcspace.hpp"

namespace qes {

struct Superpotential {
  RealFn w;
  RealFn wprime;
  CumulativeIntegral integral;  // of w, anchored at integral.base_point()
  std::string label;
  double scale_hint = 1.0;

  double operator()(double x) const { return w(x); }
};

inline Superpotential make_superpotential(RealFn w, RealFn wprime, double base_point,
                                          double scale_hint, std::string label) {
  CumulativeIntegral integral(w, base_point, QuadratureSpec::for_scale(scale_hint));
  return Superpotential{std::move(w), std::move(wprime), std::move(integral), std::move(label),
                        scale_hint};
}

struct PotentialPair {
  RealFn v_minus;
  RealFn v_plus;
  Superpotential source;
};

struct Eigenstate {
  double energy = 0.0;
  RealFn psi;                          // unnormalized
  RealFn psi_prime;                    // may be empty
  std::optional<double> norm_constant; // filled in by verification quadrature
  int node_count = 0;
};

inline PotentialPair pair_potentials(const Superpotential& W) {
  auto w = W.w;
  auto wp = W.wprime;
  RealFn vm = [w, wp](double x) {
    const double v = w(x);
    return 0.5 * (v * v - wp(x));
  };
  RealFn vp = [w, wp](double x) {
    const double v = w(x);
    return 0.5 * (v * v + wp(x));
  };
  return PotentialPair{std::move(vm), std::move(vp), W};
}

struct SignSample {
  double x;
  double w;
};

struct SignCheck {
  bool ok = false;
  std::vector<SignSample> samples;
  std::vector<std::string> diagnostics;  // failures and warnings

  explicit operator bool() const noexcept { return ok; }
};

/// Finite-sample stand-in for sign(W(±∞)) = ±1: W is sampled at
/// ±probe_radius·{1, 2, 4}. Non-monotone |W| across those samples is only a
/// warning.
inline SignCheck check_sign_condition(const Superpotential& W, double probe_radius) {
  if (!(probe_radius >= 5.0 * W.scale_hint)) {
    throw ParameterError("probe_radius must be >= 5*scale_hint");
  }
  SignCheck out;
  out.ok = true;
  double prev_right = 0.0, prev_left = 0.0;
  for (double m : {1.0, 2.0, 4.0}) {
    const double xr = m * probe_radius;
    const double xl = -xr;
    const double wr = W.w(xr);
    const double wl = W.w(xl);
    out.samples.push_back({xl, wl});
    out.samples.push_back({xr, wr});
    if (!std::isfinite(wr) || !std::isfinite(wl)) {
      out.ok = false;
      out.diagnostics.push_back("non-finite W at x=±" + std::to_string(xr));
      continue;
    }
    if (!(wr > 0.0)) {
      out.ok = false;
      out.diagnostics.push_back("W(" + std::to_string(xr) + ") is not positive");
    }
    if (!(wl < 0.0)) {
      out.ok = false;
      out.diagnostics.push_back("W(" + std::to_string(xl) + ") is not negative");
    }
    if (m > 1.0) {
      if (std::abs(wr) < prev_right) {
        out.diagnostics.push_back("warning: |W| decreases outward at x=" + std::to_string(xr));
      }
      if (std::abs(wl) < prev_left) {
        out.diagnostics.push_back("warning: |W| decreases outward at x=" + std::to_string(xl));
      }
    }
    prev_right = std::abs(wr);
    prev_left = std::abs(wl);
  }
  return out;
}

inline double default_probe_radius(const Superpotential& W) { return 5.0 * W.scale_hint; }

/// Zero mode of H₋: ψ₀ = exp(-∫W), energy 0.
inline Eigenstate ground_state_minus(const Superpotential& W) {
  if (!check_sign_condition(W, default_probe_radius(W))) {
    throw ConstructionError("broken SUSY: zero mode not normalizable");
  }
  auto integral = W.integral;
  auto w = W.w;
  RealFn psi = [integral](double x) { return std::exp(-integral.eval(x)); };
  RealFn dpsi = [integral, w](double x) { return -w(x) * std::exp(-integral.eval(x)); };
  return Eigenstate{0.0, std::move(psi), std::move(dpsi), std::nullopt, 0};
}

/// ψ_out = B⁺ψ / √E = (-ψ' + Wψ) / √(2E). `psi` must be an eigenfunction of
/// H₊ at `energy_plus`; the derivative of the result uses ψ'' = 2(V₊ - E)ψ.
inline Eigenstate apply_raising(const Superpotential& W, RealFn psi, RealFn psi_prime,
                                double energy_plus, int input_nodes = 0) {
  if (!(energy_plus > 0.0)) throw ConstructionError("cannot raise zero mode");
  const double inv = 1.0 / std::sqrt(2.0 * energy_plus);
  auto w = W.w;
  auto wp = W.wprime;
  RealFn out = [w, psi, psi_prime, inv](double x) {
    return (-psi_prime(x) + w(x) * psi(x)) * inv;
  };
  RealFn dout = [w, wp, psi, psi_prime, inv, energy_plus](double x) {
    const double wv = w(x);
    const double wd = wp(x);
    const double p = psi(x);
    const double dp = psi_prime(x);
    const double v_plus = 0.5 * (wv * wv + wd);
    const double d2p = 2.0 * (v_plus - energy_plus) * p;
    return (-d2p + wd * p + wv * dp) * inv;
  };
  return Eigenstate{energy_plus, std::move(out), std::move(dout), std::nullopt, input_nodes + 1};
}

/// W² + W' - W₁² + W₁' - 2ε; zero when V₊[W] = V₋[W₁] + ε.
inline double riccati_residual(const Superpotential& W, const Superpotential& W1,
                               double epsilon, double x) {
  const double w = W.w(x);
  const double w1 = W1.w(x);
  return w * w + W.wprime(x) - w1 * w1 + W1.wprime(x) - 2.0 * epsilon;
}

/// Magnitude of the terms entering riccati_residual at x (at least 1), used to
/// judge the residual against roundoff when W grows quickly.
inline double riccati_term_scale(const Superpotential& W, const Superpotential& W1,
                                 double epsilon, double x) {
  const double w = W.w(x);
  const double w1 = W1.w(x);
  return 1.0 + w * w + std::abs(W.wprime(x)) + w1 * w1 + std::abs(W1.wprime(x)) +
         2.0 * std::abs(epsilon);
}

}  // namespace qes
