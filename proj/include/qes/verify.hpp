#pragma once

// Independent numerical check of a QesModel: finite-difference discretization
// of H = -½ d²/dx² + V on a Dirichlet box, lowest eigenpairs by Sturm
// bisection and inverse iteration, Simpson overlaps, node counts, and the
// SUSY degeneracy E⁻ₙ₊₁ = E⁺ₙ.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qes/constructors.hpp"
#include "qes/error.hpp"
#include "qes/funcspace.hpp"
#include "qes/susy_core.hpp"

namespace qes {

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

/// Uniform grid x_i = -L + i·h, i = 0..N-1, h = 2L/(N-1), N odd.
class Grid {
 public:
  Grid(double half_width, int points) : L_(half_width), N_(points) {
    if (!(L_ > 0.0) || !std::isfinite(L_)) throw ParameterError("grid L must be > 0");
    if (N_ < 3 || N_ % 2 == 0) throw ParameterError("grid N must be odd and >= 3");
    h_ = 2.0 * L_ / (N_ - 1);
  }

  double L() const noexcept { return L_; }
  int N() const noexcept { return N_; }
  double h() const noexcept { return h_; }
  /// -L + i·h, evaluated as (i - (N-1)/2)·h so the grid is exactly symmetric.
  double x(int i) const noexcept {
    if (i == 0) return -L_;
    if (i == N_ - 1) return L_;
    return (i - (N_ - 1) / 2) * h_;
  }

  std::vector<double> points() const {
    std::vector<double> xs(static_cast<std::size_t>(N_));
    for (int i = 0; i < N_; ++i) xs[static_cast<std::size_t>(i)] = x(i);
    return xs;
  }

  std::vector<double> sample(const RealFn& f) const {
    std::vector<double> v(static_cast<std::size_t>(N_));
    for (int i = 0; i < N_; ++i) v[static_cast<std::size_t>(i)] = f(x(i));
    return v;
  }

 private:
  double L_;
  int N_;
  double h_;
};

inline constexpr int kDefaultGridPoints = 4001;
inline constexpr double kMaxGridRadius = 50.0;  // in units of scale_hint

// ---------------------------------------------------------------------------
// Symmetric tridiagonal eigensolver
// ---------------------------------------------------------------------------

struct EigenResult {
  std::vector<double> energies;              // ascending
  std::vector<std::vector<double>> vectors;  // length N, zero at the walls, unit l2 norm
};

namespace detail {

/// Number of eigenvalues of tridiag(off, diag, off) strictly below lambda.
inline int sturm_count(std::span<const double> diag, double off, double lambda) {
  const double tiny = std::numeric_limits<double>::min();
  const double off2 = off * off;
  int count = 0;
  double q = diag[0] - lambda;
  if (q == 0.0) q = -tiny;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < diag.size(); ++i) {
    q = diag[i] - lambda - off2 / q;
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

/// index-th smallest eigenvalue (0-based) by bisection on the Sturm count.
inline double bisect_eigenvalue(std::span<const double> diag, double off, int index, double lo,
                                double hi) {
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(diag, off, mid) > index) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Inverse iteration on (T - λ)y = b with a pivoted tridiagonal LU.
inline std::vector<double> inverse_iteration(std::span<const double> diag, double off,
                                             double lambda) {
  const std::size_t n = diag.size();
  std::vector<double> dl(n > 0 ? n - 1 : 0, off), du(n > 0 ? n - 1 : 0, off), d(n),
      du2(n > 1 ? n - 2 : 0, 0.0);
  std::vector<bool> swapped(n > 0 ? n - 1 : 0, false);
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = diag[i] - lambda;
    norm = std::max(norm, std::abs(diag[i]) + 2.0 * std::abs(off));
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      const double fact = d[i] != 0.0 ? dl[i] / d[i] : 0.0;
      dl[i] = fact;
      d[i + 1] -= fact * du[i];
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      dl[i] = fact;
      const double temp = du[i];
      du[i] = d[i + 1];
      d[i + 1] = temp - fact * d[i + 1];
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -fact * du[i + 1];
      }
      swapped[i] = true;
    }
  }
  const double floor = std::numeric_limits<double>::epsilon() * norm;
  for (double& p : d) {
    if (std::abs(p) < floor) p = std::copysign(floor, p == 0.0 ? 1.0 : p);
  }

  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = 1.0 + 1e-3 * std::sin(0.37 * static_cast<double>(i));
  for (int sweep = 0; sweep < 3; ++sweep) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!swapped[i]) {
        b[i + 1] -= dl[i] * b[i];
      } else {
        const double temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl[i] * b[i];
      }
    }
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t k = n; k-- > 2;) {
      const std::size_t i = k - 2;
      b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
    double s = 0.0;
    for (double v : b) s += v * v;
    s = std::sqrt(s);
    for (double& v : b) v /= s;
  }
  // fix the sign: first component above 1e-3 of the peak is positive
  double peak = 0.0;
  for (double v : b) peak = std::max(peak, std::abs(v));
  for (double v : b) {
    if (std::abs(v) > 1e-3 * peak) {
      if (v < 0.0) {
        for (double& w : b) w = -w;
      }
      break;
    }
  }
  return b;
}

}  // namespace detail

/// k lowest eigenpairs of -½ d²/dx² + V with Dirichlet walls at ±L, second
/// order central differences on the interior points of `grid`.
inline EigenResult eigensolve(const RealFn& V, const Grid& grid, int k) {
  const int n = grid.N() - 2;
  if (k < 1 || k > n) throw ParameterError("eigensolve: k out of range");
  const double h2 = grid.h() * grid.h();
  const double off = -0.5 / h2;
  std::vector<double> diag(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = grid.x(i + 1);
    const double v = V(x);
    if (!std::isfinite(v)) throw NonFiniteError("non-finite potential on grid", x);
    diag[static_cast<std::size_t>(i)] = 1.0 / h2 + v;
  }
  double lo = diag[0], hi = diag[0];
  for (double d : diag) {
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  lo -= 2.0 * std::abs(off);
  hi += 2.0 * std::abs(off);

  EigenResult out;
  for (int j = 0; j < k; ++j) {
    const double lower = j == 0 ? lo : out.energies.back();
    const double e = detail::bisect_eigenvalue(diag, off, j, lower, hi);
    out.energies.push_back(e);
    auto interior = detail::inverse_iteration(diag, off, e);
    std::vector<double> full(static_cast<std::size_t>(grid.N()), 0.0);
    std::copy(interior.begin(), interior.end(), full.begin() + 1);
    out.vectors.push_back(std::move(full));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature and node counting on the grid
// ---------------------------------------------------------------------------

/// Composite Simpson rule over the full grid.
inline double simpson(std::span<const double> values, double h) {
  const std::size_t n = values.size();
  if (n < 3 || n % 2 == 0) throw ParameterError("simpson needs an odd number >= 3 of samples");
  double s = values[0] + values[n - 1];
  for (std::size_t i = 1; i + 1 < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * values[i];
  return s * h / 3.0;
}

inline double inner_product(const RealFn& f, const RealFn& g, const Grid& grid) {
  std::vector<double> v(static_cast<std::size_t>(grid.N()));
  for (int i = 0; i < grid.N(); ++i) {
    const double x = grid.x(i);
    v[static_cast<std::size_t>(i)] = f(x) * g(x);
  }
  return simpson(v, grid.h());
}

inline constexpr double kNodeFloor = 1e-9;

/// Sign changes between successive samples after discarding samples whose
/// magnitude is at most floor·max|values|.
inline int count_nodes(std::span<const double> values, double floor = kNodeFloor) {
  if (values.empty()) throw ParameterError("count_nodes needs samples");
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::abs(v));
  const double cut = floor * peak;
  int nodes = 0;
  double prev = 0.0;
  for (double v : values) {
    if (!(std::abs(v) > cut)) continue;
    if (prev != 0.0 && (v > 0.0) != (prev > 0.0)) ++nodes;
    prev = v;
  }
  return nodes;
}

/// ⟨ψ|H|ψ⟩/⟨ψ|ψ⟩ with the same finite-difference H used by eigensolve.
inline double rayleigh_quotient(const RealFn& V, const RealFn& psi, const Grid& grid) {
  const auto p = grid.sample(psi);
  const double h2 = grid.h() * grid.h();
  double num = 0.0, den = 0.0;
  for (int i = 1; i + 1 < grid.N(); ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double hp = -0.5 * (p[u + 1] - 2.0 * p[u] + p[u - 1]) / h2 + V(grid.x(i)) * p[u];
    num += p[u] * hp;
    den += p[u] * p[u];
  }
  return num / den;
}

/// (½⟨ψ'|ψ'⟩ + ⟨ψ|V|ψ⟩)/⟨ψ|ψ⟩ by Simpson quadrature, with the kinetic term
/// from the supplied derivative. Free of the O(h²) bias of the matrix form.
inline double rayleigh_quotient(const RealFn& V, const RealFn& psi, const RealFn& psi_prime,
                                const Grid& grid) {
  const auto n = static_cast<std::size_t>(grid.N());
  std::vector<double> num(n), den(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(static_cast<int>(i));
    const double p = psi(x), dp = psi_prime(x);
    num[i] = 0.5 * dp * dp + V(x) * p * p;
    den[i] = p * p;
  }
  return simpson(num, grid.h()) / simpson(den, grid.h());
}

/// sup |-½ψ'' + (V - E)ψ| / sup|ψ| over `samples` points spread on the grid,
/// with ψ'' from a five-point stencil of step `step`.
inline double schrodinger_residual(const RealFn& V, const RealFn& psi, double energy,
                                   const Grid& grid, double step, int samples = 200) {
  double peak = 0.0;
  for (int i = 0; i < grid.N(); ++i) peak = std::max(peak, std::abs(psi(grid.x(i))));
  double sup = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double x = -grid.L() + (j + 0.5) * 2.0 * grid.L() / samples;
    const double f0 = psi(x);
    const double d2 = (-psi(x + 2 * step) + 16.0 * psi(x + step) - 30.0 * f0 +
                       16.0 * psi(x - step) - psi(x - 2 * step)) /
                      (12.0 * step * step);
    sup = std::max(sup, std::abs(-0.5 * d2 + (V(x) - energy) * f0));
  }
  return sup / peak;
}

// ---------------------------------------------------------------------------
// Automatic grid
// ---------------------------------------------------------------------------

struct GridChoice {
  Grid grid;
  bool decay_reached = true;
  std::vector<std::string> diagnostics;
};

/// Smallest L (a multiple of scale_hint) where |ψ₀| and |ψ₁| at ±L are below
/// target_decay times their maxima; capped at 50·scale_hint.
inline GridChoice auto_grid(const QesModel& model, double target_decay = 1e-12,
                            int points = kDefaultGridPoints) {
  const double s = model.scale_hint;
  const double cap = kMaxGridRadius * s;
  // maxima over a fine scan of the capped box
  double max0 = 0.0, max1 = 0.0;
  const int scan = 4000;
  for (int i = 0; i <= scan; ++i) {
    const double x = -cap + 2.0 * cap * i / scan;
    const double a = std::abs(model.psi0.psi(x));
    const double b = std::abs(model.psi1.psi(x));
    if (std::isfinite(a)) max0 = std::max(max0, a);
    if (std::isfinite(b)) max1 = std::max(max1, b);
  }
  auto small = [](double v, double peak, double target) {
    return std::isfinite(v) && std::abs(v) < target * peak;
  };
  for (int k = 1; k <= static_cast<int>(kMaxGridRadius); ++k) {
    const double L = k * s;
    if (small(model.psi0.psi(L), max0, target_decay) &&
        small(model.psi0.psi(-L), max0, target_decay) &&
        small(model.psi1.psi(L), max1, target_decay) &&
        small(model.psi1.psi(-L), max1, target_decay)) {
      return GridChoice{Grid(L, points), true, {}};
    }
  }
  return GridChoice{Grid(cap, points), false,
                    {"warning: wavefunctions did not decay below target within 50*scale_hint"}};
}

// ---------------------------------------------------------------------------
// verify_model
// ---------------------------------------------------------------------------

struct Tolerances {
  double energy = 1e-5;          // absolute; multiplied by ε when ε > 1
  double cosine = 1e-6;          // 1 - |cos| bound for analytic vs numeric states
  double orthogonality = 1e-8;   // |⟨ψ₀|ψ₁⟩|/(‖ψ₀‖‖ψ₁‖)
  double riccati = kRiccatiTolerance;
  double residual = 1e-5;        // multiplied by max(1, ε)
};

struct SpectralReport {
  std::vector<double> eigenvalues;       // H₋, ascending
  std::vector<double> eigenvalues_plus;  // H₊, ascending
  std::vector<double> analytic_targets;  // {0, ε, exact ladder...}
  std::vector<double> energy_errors;     // against analytic_targets
  std::vector<double> cosine_similarity; // ψ₀, ψ₁ vs eigenvectors
  std::vector<double> residual_sup;      // Schrödinger residual of ψ₀, ψ₁
  double overlap_psi0_psi1 = 0.0;
  std::vector<int> node_counts;          // analytic ψ₀, ψ₁
  std::vector<int> numeric_node_counts;  // eigenvectors 0..k-1 of H₋
  std::vector<double> susy_degeneracy_errors;
  double riccati_sup = 0.0;
  std::vector<double> normalization_constants;
  std::vector<double> boundary_amplitudes;  // |ψ₀(-L)|,|ψ₀(L)|,|ψ₁(-L)|,|ψ₁(L)| relative to peak
  double energy_tolerance = 0.0;
  double residual_tolerance = 0.0;
  Tolerances tolerances;
  std::optional<Grid> grid_used;
  std::map<std::string, bool> checks;
  bool passed = false;
  bool numeric_derivatives = false;
  std::vector<std::string> diagnostics;
};

inline SpectralReport verify_model(const QesModel& model, std::optional<Grid> grid = std::nullopt,
                                   const Tolerances& tol = {}) {
  SpectralReport r;
  r.tolerances = tol;
  r.numeric_derivatives = model.numeric_derivatives;
  if (model.numeric_derivatives) {
    r.diagnostics.push_back("generator derivatives include finite-difference estimates");
  }
  if (!grid) {
    auto choice = auto_grid(model);
    grid = choice.grid;
    for (auto& d : choice.diagnostics) r.diagnostics.push_back(d);
  }
  const Grid& g = *grid;
  r.grid_used = g;
  const double eps = model.epsilon;
  r.energy_tolerance = tol.energy * std::max(1.0, eps);
  r.residual_tolerance = tol.residual * std::max(1.0, eps);

  r.analytic_targets = {0.0, eps};
  for (std::size_t i = 0; i < model.exact_levels.size() && r.analytic_targets.size() < 4; ++i) {
    r.analytic_targets.push_back(model.exact_levels[i]);
  }

  const auto minus = eigensolve(model.potentials.v_minus, g, 4);
  const auto plus = eigensolve(model.potentials.v_plus, g, 3);
  r.eigenvalues = minus.energies;
  r.eigenvalues_plus = plus.energies;

  // (i) energies
  bool energies_ok = true;
  for (std::size_t i = 0; i < r.analytic_targets.size(); ++i) {
    const double err = std::abs(r.eigenvalues[i] - r.analytic_targets[i]);
    r.energy_errors.push_back(err);
    if (!(err < r.energy_tolerance)) energies_ok = false;
  }
  r.checks["energies"] = energies_ok;

  // (ii) analytic states vs eigenvectors
  const auto a0 = g.sample(model.psi0.psi);
  const auto a1 = g.sample(model.psi1.psi);
  auto cosine = [](const std::vector<double>& a, const std::vector<double>& b) {
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ab += a[i] * b[i];
      aa += a[i] * a[i];
      bb += b[i] * b[i];
    }
    return std::abs(ab) / std::sqrt(aa * bb);
  };
  r.cosine_similarity = {cosine(a0, minus.vectors[0]), cosine(a1, minus.vectors[1])};
  r.checks["wavefunctions"] = r.cosine_similarity[0] > 1.0 - tol.cosine &&
                              r.cosine_similarity[1] > 1.0 - tol.cosine;

  // (iii) orthogonality
  {
    std::vector<double> prod(a0.size()), sq0(a0.size()), sq1(a0.size());
    for (std::size_t i = 0; i < a0.size(); ++i) {
      prod[i] = a0[i] * a1[i];
      sq0[i] = a0[i] * a0[i];
      sq1[i] = a1[i] * a1[i];
    }
    const double n0 = simpson(sq0, g.h());
    const double n1 = simpson(sq1, g.h());
    r.overlap_psi0_psi1 = std::abs(simpson(prod, g.h())) / std::sqrt(n0 * n1);
    r.normalization_constants = {1.0 / std::sqrt(n0), 1.0 / std::sqrt(n1)};
    r.checks["orthogonality"] = r.overlap_psi0_psi1 < tol.orthogonality;
  }

  // (iv) nodes
  r.node_counts = {count_nodes(a0), count_nodes(a1)};
  for (const auto& v : minus.vectors) r.numeric_node_counts.push_back(count_nodes(v));
  r.checks["nodes"] = r.node_counts[0] == 0 && r.node_counts[1] == 1;

  // (v) SUSY degeneracy
  bool degeneracy_ok = true;
  for (std::size_t n = 0; n < 3; ++n) {
    const double err = std::abs(r.eigenvalues[n + 1] - r.eigenvalues_plus[n]);
    r.susy_degeneracy_errors.push_back(err);
    if (!(err < r.energy_tolerance)) degeneracy_ok = false;
  }
  r.checks["susy_degeneracy"] = degeneracy_ok;

  // (vi) Riccati identity
  {
    const auto mc = check_model(model);
    r.riccati_sup = mc.riccati_sup;
    r.checks["riccati"] = mc.riccati_sup < tol.riccati;
  }

  // (vii) pointwise Schrödinger residual of the analytic states
  {
    const double step = 1e-2 * model.scale_hint;
    r.residual_sup = {
        schrodinger_residual(model.potentials.v_minus, model.psi0.psi, 0.0, g, step),
        schrodinger_residual(model.potentials.v_minus, model.psi1.psi, eps, g, step)};
    r.checks["schrodinger_residual"] =
        r.residual_sup[0] < r.residual_tolerance && r.residual_sup[1] < r.residual_tolerance;
  }

  {
    double p0 = 0.0, p1 = 0.0;
    for (std::size_t i = 0; i < a0.size(); ++i) {
      p0 = std::max(p0, std::abs(a0[i]));
      p1 = std::max(p1, std::abs(a1[i]));
    }
    r.boundary_amplitudes = {std::abs(model.psi0.psi(-g.L())) / p0,
                             std::abs(model.psi0.psi(g.L())) / p0,
                             std::abs(model.psi1.psi(-g.L())) / p1,
                             std::abs(model.psi1.psi(g.L())) / p1};
  }

  r.passed = true;
  for (const auto& [name, ok] : r.checks) {
    if (!ok) {
      r.passed = false;
      r.diagnostics.push_back("check failed: " + name);
    }
  }
  return r;
}

}  // namespace qes
