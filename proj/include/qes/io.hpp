#pragma once

// Serialization: SpectralReport -> JSON, model tables -> CSV/JSON.
// Every float in a CSV table is written with 17 significant digits.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qes/constructors.hpp"
#include "qes/verify.hpp"

namespace qes {

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline nlohmann::json model_summary_json(const QesModel& m) {
  nlohmann::json j;
  j["family"] = m.provenance.family;
  j["method"] = m.provenance.method;
  j["params"] = m.provenance.params;
  j["epsilon"] = m.epsilon;
  j["x0"] = m.x0;
  j["scale_hint"] = m.scale_hint;
  j["numeric_derivatives"] = m.numeric_derivatives;
  return j;
}

inline nlohmann::json to_json(const SpectralReport& r) {
  nlohmann::json j;
  j["passed"] = r.passed;
  j["eigenvalues"] = r.eigenvalues;
  j["eigenvalues_plus"] = r.eigenvalues_plus;
  j["analytic_targets"] = r.analytic_targets;
  j["energy_errors"] = r.energy_errors;
  j["cosine_similarity"] = r.cosine_similarity;
  j["residual_sup"] = r.residual_sup;
  j["overlap_psi0_psi1"] = r.overlap_psi0_psi1;
  j["node_counts"] = r.node_counts;
  j["numeric_node_counts"] = r.numeric_node_counts;
  j["susy_degeneracy_errors"] = r.susy_degeneracy_errors;
  j["riccati_sup"] = r.riccati_sup;
  j["normalization_constants"] = r.normalization_constants;
  j["boundary_amplitudes"] = r.boundary_amplitudes;
  j["tolerances"] = {
      {"energy", r.tolerances.energy},
      {"energy_effective", r.energy_tolerance},
      {"cosine", r.tolerances.cosine},
      {"orthogonality", r.tolerances.orthogonality},
      {"riccati", r.tolerances.riccati},
      {"residual", r.tolerances.residual},
      {"residual_effective", r.residual_tolerance},
  };
  if (r.grid_used) {
    j["grid"] = {{"L", r.grid_used->L()}, {"N", r.grid_used->N()}, {"h", r.grid_used->h()}};
  }
  j["checks"] = r.checks;
  j["numeric_derivatives"] = r.numeric_derivatives;
  j["diagnostics"] = r.diagnostics;
  return j;
}

inline const std::vector<std::string>& table_columns() {
  static const std::vector<std::string> cols{"x", "v_minus", "v_plus", "w", "w1", "psi0", "psi1"};
  return cols;
}

inline std::vector<double> table_row(const QesModel& m, double x) {
  return {x,
          m.potentials.v_minus(x),
          m.potentials.v_plus(x),
          m.W.w(x),
          m.W1.w(x),
          m.psi0.psi(x),
          m.psi1.psi(x)};
}

inline void write_table_csv(const QesModel& m, const Grid& grid, std::ostream& os) {
  const auto& cols = table_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << '\n';
  for (int i = 0; i < grid.N(); ++i) {
    const auto row = table_row(m, grid.x(i));
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_real(row[c]);
    os << '\n';
  }
}

inline nlohmann::json table_json(const QesModel& m, const Grid& grid) {
  nlohmann::json j;
  j["columns"] = table_columns();
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < grid.N(); ++i) rows.push_back(table_row(m, grid.x(i)));
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace qes
