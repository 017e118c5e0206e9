// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "qes/qes.hpp"

using namespace qes;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Named {
  std::string name;
  QesModel model;
};

std::vector<Named> built_ins() {
  std::vector<Named> out;
  out.push_back({"poly-wplus", poly_wplus_model({2.0, 1.0})});
  out.push_back({"poly-phi", poly_phi_model(PolyPhiParams(1.0, 1.0, 1.0))});
  out.push_back({"poly-phi-ces", poly_phi_ces_model(1.0, 1.0)});
  out.push_back({"sinh-wplus", sinh_wplus_model({1.0, 1.0, 0.0})});
  return out;
}

double scaled_riccati_sup(const QesModel& m) {
  double sup = 0.0;
  for (double x : probe_grid(m)) {
    sup = std::max(sup, std::abs(riccati_residual(m.W, m.W1, m.epsilon, x)) /
                            riccati_term_scale(m.W, m.W1, m.epsilon, x));
  }
  return sup;
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = poly_wplus_model({2.0, 1.0});
  const auto choice = auto_grid(m);
  const auto r = eigensolve(m.potentials.v_minus, choice.grid, 2);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double e0 = std::abs(r.energies[0]), e1 = std::abs(r.energies[1] - 1.0);
  const bool ok = choice.grid.L() <= 8.0 && choice.grid.N() == 4001 && e0 < 1e-5 && e1 < 1e-5 &&
                  secs < 5.0;
  report(1, ok,
         "poly-wplus a=2 b=1: L=" + fmt("%g", choice.grid.L()) + " |E0|=" + fmt("%.2e", e0) +
             " |E1-1|=" + fmt("%.2e", e1) + " time=" + fmt("%.3f", secs) + "s");
}

void criterion2() {
  double lo0 = 1e300, hi0 = -1e300, lo1 = 1e300, hi1 = -1e300;
  for (double b : {0.5, 1.0, 2.0}) {
    const auto m = poly_wplus_model({2.0, b});
    const auto r = eigensolve(m.potentials.v_minus, auto_grid(m).grid, 2);
    lo0 = std::min(lo0, r.energies[0]);
    hi0 = std::max(hi0, r.energies[0]);
    lo1 = std::min(lo1, r.energies[1]);
    hi1 = std::max(hi1, r.energies[1]);
  }
  const double d0 = hi0 - lo0, d1 = hi1 - lo1;
  report(2, d0 < 2e-5 && d1 < 2e-5,
         "b in {0.5,1,2}: spread E0=" + fmt("%.2e", d0) + " E1=" + fmt("%.2e", d1));
}

void criterion3() {
  const auto m = poly_phi_model(PolyPhiParams(1.0, 1.0, 1.0));
  const double A = 1.0 / 9.0, B = 5.0 / 3.0, R = 7.0 / 18.0, D = -55.0 / 18.0;
  double sup = 0.0;
  for (double x : probe_grid(m)) {
    const double q = 1.0 + x * x;
    sup = std::max(sup, std::abs(m.potentials.v_minus(x) - (0.5 * A * x * x + B / q + D / (q * q) + R)));
  }
  const auto r = eigensolve(m.potentials.v_minus, auto_grid(m).grid, 2);
  const double e0 = std::abs(r.energies[0]), e1 = std::abs(r.energies[1] - 1.0);
  report(3, sup < 1e-10 && e0 < 1e-5 && e1 < 1e-5,
         "poly-phi a=b=eps=1: sup|V- - closed form|=" + fmt("%.2e", sup) + " |E0|=" +
             fmt("%.2e", e0) + " |E1-1|=" + fmt("%.2e", e1));
}

void criterion4() {
  const double a = 1.0, b = 1.0;
  const auto m = poly_phi_ces_model(a, b);
  const PolyPhiParams p(a, b, ces_epsilon(a, b));
  double vsup = 0.0;
  for (double x : probe_grid(m)) {
    const double target = b * b * x * x / (8.0 * a * a) + 5.0 * b / (4.0 * a);
    vsup = std::max(vsup, std::abs(m.potentials.v_plus(x) - target) / std::max(1.0, target));
  }
  // oracle: oscillator read off V₊, then E⁻ₙ = E⁺ₙ₋₁
  const double c = m.potentials.v_plus(0.0);
  const double omega = std::sqrt(2.0 * (m.potentials.v_plus(1.0) - c));
  std::vector<double> oracle{0.0};
  for (int n = 1; n <= 5; ++n) oracle.push_back(omega * (n - 0.5) + c);
  const auto ladder = ces_exact_spectrum(a, b, 5);
  double ladder_gap = 0.0;
  for (std::size_t n = 0; n < oracle.size(); ++n) {
    ladder_gap = std::max(ladder_gap, std::abs(ladder[n] - oracle[n]));
  }
  // n = 5 needs h ≈ 2e-3 to keep the O(h²) error below 1e-5
  const Grid g(auto_grid(m).grid.L(), 12001);
  const auto r = eigensolve(m.potentials.v_minus, g, 6);
  double err = 0.0;
  for (std::size_t n = 0; n < 6; ++n) err = std::max(err, std::abs(r.energies[n] - oracle[n]));
  const bool ok = std::abs(p.D_plus) < 1e-15 && vsup < 1e-12 && ladder_gap < 1e-12 && err < 1e-5;
  report(4, ok,
         "CES a=b=1: D+=" + fmt("%.1e", p.D_plus) + " sup|V+ - oscillator|=" + fmt("%.2e", vsup) +
             " max|E_n - ladder| (n=0..5, N=12001)=" + fmt("%.2e", err));
}

void criterion5() {
  double worst = 0.0;
  std::string detail;
  for (const auto& [name, m] : built_ins()) {
    const Grid g = auto_grid(m).grid;
    const auto minus = eigensolve(m.potentials.v_minus, g, 4);
    const auto plus = eigensolve(m.potentials.v_plus, g, 3);
    double e = 0.0;
    for (std::size_t n = 0; n < 3; ++n) e = std::max(e, std::abs(minus.energies[n + 1] - plus.energies[n]));
    worst = std::max(worst, e);
    detail += " " + name + "=" + fmt("%.1e", e);
  }
  report(5, worst < 1e-5, "SUSY degeneracy max error:" + detail);
}

void criterion6() {
  double worst = 0.0;
  std::string detail;
  for (const auto& [name, m] : built_ins()) {
    const double s = scaled_riccati_sup(m);
    worst = std::max(worst, s);
    detail += " " + name + "=" + fmt("%.1e", s);
  }
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> pos(0.2, 2.0), off(-0.5, 0.5);
  double custom = 0.0;
  int built = 0;
  for (int t = 0; t < 20; ++t) {
    const double c1 = pos(rng), c3 = pos(rng), c5 = 0.2 * pos(rng), shift = off(rng);
    const std::string text = std::to_string(c1) + "*x + " + std::to_string(c3) + "*x^3 + " +
                             std::to_string(c5) + "*sinh(x) + " + std::to_string(shift);
    try {
      const auto m = method_a_build(to_generator(Expression::parse(text), 1.0));
      custom = std::max(custom, scaled_riccati_sup(m));
      ++built;
    } catch (const Error& e) {
      std::printf("  custom generator %s rejected: %s\n", text.c_str(), e.what());
    }
  }
  worst = std::max(worst, custom);
  report(6, worst < 1e-9 && built == 20,
         "Riccati residual sup:" + detail + " custom(" + std::to_string(built) + "/20)=" +
             fmt("%.1e", custom));
}

void criterion7_8() {
  double worst = 0.0;
  bool nodes_ok = true;
  std::string overlap, nodes;
  for (const auto& [name, m] : built_ins()) {
    const auto r = verify_model(m);
    worst = std::max(worst, r.overlap_psi0_psi1);
    overlap += " " + name + "=" + fmt("%.1e", r.overlap_psi0_psi1);
    const bool ok = r.node_counts == std::vector<int>{0, 1};
    nodes_ok = nodes_ok && ok;
    nodes += " " + name + "=" + std::to_string(r.node_counts[0]) + "/" + std::to_string(r.node_counts[1]);
  }
  report(7, worst < 1e-8, "normalized |<psi0|psi1>|:" + overlap);
  report(8, nodes_ok, "nodes psi0/psi1:" + nodes);
}

void criterion9() {
  double worst = 0.0;
  std::string detail;
  const std::vector<std::tuple<double, double, double>> points{
      {1.0, 1.0, 1.0}, {1.0, 1.0, 1.5}, {2.0, 0.5, 0.7}, {0.5, 2.0, 3.0}, {1.5, 1.0, 0.4}};
  for (const auto& [a, b, e] : points) {
    const auto x = cross_check_methods(poly_phi_generator(a, b, poly_phi_scale(e)), e);
    worst = std::max(worst, x.max());
    detail += " " + fmt("%.1e", x.max());
  }
  report(9, worst < 1e-8, "method A vs B discrepancy at 5 poly-phi points:" + detail);
}

void criterion10() {
  const RealFn V = [](double x) { return 0.5 * x * x; };
  // h = 1.25e-3 keeps the O(h²) shift h²(2n²+2n+1)/32 below 1e-6 for n <= 2
  const auto r = eigensolve(V, Grid(10.0, 16001), 3);
  double err = 0.0;
  for (int n = 0; n < 3; ++n) err = std::max(err, std::abs(r.energies[static_cast<std::size_t>(n)] - (n + 0.5)));
  const double e1 = std::abs(eigensolve(V, Grid(10.0, 401), 1).energies[0] - 0.5);
  const double e2 = std::abs(eigensolve(V, Grid(10.0, 801), 1).energies[0] - 0.5);
  const double e3 = std::abs(eigensolve(V, Grid(10.0, 1601), 1).energies[0] - 0.5);
  const double r1 = e1 / e2, r2 = e2 / e3;
  const bool ok = err < 1e-6 && std::abs(r1 - 4.0) < 0.1 && std::abs(r2 - 4.0) < 0.1;
  report(10, ok,
         "oscillator (L=10, N=16001) max error=" + fmt("%.2e", err) + " Richardson ratios " + fmt("%.3f", r1) +
             ", " + fmt("%.3f", r2));
}

}  // namespace

int main() {
  try {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7_8();
    criterion9();
    criterion10();
  } catch (const std::exception& e) {
    std::printf("[FAIL] aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
