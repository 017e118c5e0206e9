#pragma once

// Command-line front end:
//   qes build|verify|spectrum|crosscheck [--family F] [--a --b --epsilon --A --alpha --x0]
//       [--expr "..."] [--generator wplus|phi] [--scale S] [--grid-n N] [--grid-l L]
//       [--tol-e T] [--emit PATH] [--format csv|json] [--out PATH] [--config PATH]
//       [--sweep KEY=START:STOP:STEPS] [--n-max N]
// Exit codes: 0 pass, 1 verification failure, 2 usage or validation error.

#include <algorithm>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qes/constructors.hpp"
#include "qes/error.hpp"
#include "qes/expr.hpp"
#include "qes/families.hpp"
#include "qes/io.hpp"
#include "qes/verify.hpp"

namespace qes::cli {

enum ExitCode : int { kPass = 0, kVerificationFailed = 1, kUsage = 2 };

/// Validation failure in the user's configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ModelConfig {
  std::string family;
  std::map<std::string, double> params;
  std::string expr;                 // custom family only
  std::string generator = "wplus";  // custom family: expression is W₊ or φ
  std::optional<double> grid_l;
  std::optional<int> grid_n;
  std::optional<double> tol_e;
  std::string format = "csv";       // table format
  std::string emit_path;            // table output
};

inline const std::map<std::string, std::vector<std::string>>& family_keys() {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"poly-wplus", {"a", "b"}},
      {"poly-phi", {"a", "b", "epsilon"}},
      {"poly-phi-ces", {"a", "b"}},
      {"sinh-wplus", {"A", "alpha", "x0"}},
      {"custom", {}},
  };
  return keys;
}

inline nlohmann::json to_json(const ModelConfig& c) {
  nlohmann::json j;
  j["family"] = c.family;
  j["params"] = c.params;
  if (!c.expr.empty()) {
    j["expr"] = c.expr;
    j["generator"] = c.generator;
  }
  nlohmann::json grid = nlohmann::json::object();
  if (c.grid_l) grid["L"] = *c.grid_l;
  if (c.grid_n) grid["N"] = *c.grid_n;
  j["grid"] = grid;
  nlohmann::json tol = nlohmann::json::object();
  if (c.tol_e) tol["energy"] = *c.tol_e;
  j["tolerances"] = tol;
  j["output"] = {{"format", c.format}, {"path", c.emit_path}};
  return j;
}

/// Reads a JSON config file whose keys mirror ModelConfig.
inline ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ModelConfig c;
  try {
    if (j.contains("family")) c.family = j.at("family").get<std::string>();
    if (j.contains("params")) {
      for (const auto& [k, v] : j.at("params").items()) c.params[k] = v.get<double>();
    }
    if (j.contains("expr")) c.expr = j.at("expr").get<std::string>();
    if (j.contains("generator")) c.generator = j.at("generator").get<std::string>();
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      if (g.contains("L")) c.grid_l = g.at("L").get<double>();
      if (g.contains("N")) c.grid_n = g.at("N").get<int>();
    }
    if (j.contains("tolerances") && j.at("tolerances").contains("energy")) {
      c.tol_e = j.at("tolerances").at("energy").get<double>();
    }
    if (j.contains("output")) {
      const auto& o = j.at("output");
      if (o.contains("format")) c.format = o.at("format").get<std::string>();
      if (o.contains("path")) c.emit_path = o.at("path").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

inline void validate(const ModelConfig& c) {
  const auto& keys = family_keys();
  const auto it = keys.find(c.family);
  if (c.family.empty()) throw ConfigError("family: missing (use --family)");
  if (it == keys.end()) throw ConfigError("family: unknown family '" + c.family + "'");
  for (const auto& k : it->second) {
    if (!c.params.count(k)) {
      throw ConfigError(k + ": missing parameter for family " + c.family);
    }
  }
  if (c.family == "custom") {
    if (c.expr.empty()) throw ConfigError("expr: custom family needs --expr");
    if (c.generator != "wplus" && c.generator != "phi") {
      throw ConfigError("generator: must be 'wplus' or 'phi'");
    }
    if (c.generator == "phi" && !c.params.count("epsilon")) {
      throw ConfigError("epsilon: missing parameter for a phi generator");
    }
  }
  if (c.grid_n && (*c.grid_n < 3 || *c.grid_n % 2 == 0)) {
    throw ConfigError("grid-n: N must be odd and >= 3");
  }
  if (c.grid_l && !(*c.grid_l > 0.0)) throw ConfigError("grid-l: L must be > 0");
  if (c.tol_e && !(*c.tol_e > 0.0)) throw ConfigError("tol-e: must be > 0");
  if (c.format != "csv" && c.format != "json") throw ConfigError("format: must be csv or json");
}

inline bool is_phi_family(const ModelConfig& c) {
  return c.family == "poly-phi" || c.family == "poly-phi-ces" ||
         (c.family == "custom" && c.generator == "phi");
}

inline double param(const ModelConfig& c, const std::string& key, double fallback) {
  const auto it = c.params.find(key);
  return it == c.params.end() ? fallback : it->second;
}

/// φ generator and ε for the φ-based families.
inline std::pair<GeneratorFunction, double> phi_generator(const ModelConfig& c) {
  if (c.family == "custom") {
    return {to_generator(Expression::parse(c.expr), param(c, "scale", 1.0)),
            c.params.at("epsilon")};
  }
  const double a = c.params.at("a"), b = c.params.at("b");
  const double eps = c.family == "poly-phi-ces" ? ces_epsilon(a, b) : c.params.at("epsilon");
  PolyPhiParams(a, b, eps).validate();
  return {poly_phi_generator(a, b, poly_phi_scale(eps)), eps};
}

inline QesModel make_model(const ModelConfig& c) {
  validate(c);
  const auto& p = c.params;
  if (c.family == "poly-wplus") return poly_wplus_model({p.at("a"), p.at("b")});
  if (c.family == "poly-phi") return poly_phi_model(PolyPhiParams(p.at("a"), p.at("b"), p.at("epsilon")));
  if (c.family == "poly-phi-ces") return poly_phi_ces_model(p.at("a"), p.at("b"));
  if (c.family == "sinh-wplus") return sinh_wplus_model({p.at("A"), p.at("alpha"), p.at("x0")});
  const auto expr = Expression::parse(c.expr);
  const double scale = param(c, "scale", 1.0);
  QesModel m = c.generator == "phi" ? method_b_build(to_generator(expr, scale), p.at("epsilon"))
                                    : method_a_build(to_generator(expr, scale));
  m.provenance.family = "custom";
  m.provenance.params = p;
  return m;
}

inline Grid grid_for(const ModelConfig& c, const QesModel& m) {
  if (c.grid_l) return Grid(*c.grid_l, c.grid_n.value_or(kDefaultGridPoints));
  auto choice = auto_grid(m, 1e-12, c.grid_n.value_or(kDefaultGridPoints));
  return choice.grid;
}

/// Grid pinned by the config; a lone N keeps the automatic half-width.
inline std::optional<Grid> explicit_grid(const ModelConfig& c, const QesModel& m) {
  if (c.grid_l || c.grid_n) return grid_for(c, m);
  return std::nullopt;
}

inline Tolerances tolerances_for(const ModelConfig& c) {
  Tolerances t;
  if (c.tol_e) t.energy = *c.tol_e;
  return t;
}

struct Sweep {
  std::string key;
  std::vector<double> values;
};

inline Sweep parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("sweep: expected KEY=START:STOP:STEPS");
  Sweep s;
  s.key = text.substr(0, eq);
  std::vector<std::string> parts;
  std::stringstream ss(text.substr(eq + 1));
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 3) throw ConfigError("sweep: expected KEY=START:STOP:STEPS");
  double start = 0.0, stop = 0.0;
  int steps = 0;
  try {
    start = std::stod(parts[0]);
    stop = std::stod(parts[1]);
    steps = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw ConfigError("sweep: START, STOP must be numbers and STEPS an integer");
  }
  if (steps < 1) throw ConfigError("sweep: STEPS must be >= 1");
  for (int i = 0; i < steps; ++i) {
    s.values.push_back(steps == 1 ? start : start + (stop - start) * i / (steps - 1));
  }
  std::sort(s.values.begin(), s.values.end());
  return s;
}

// ---------------------------------------------------------------------------
// Commands. Each returns its exit code and writes to `out`.
// ---------------------------------------------------------------------------

struct CommandResult {
  int code = kPass;
  std::string text;       // stdout text
  nlohmann::json json;    // verify report, when produced
};

inline std::string summary_line(const QesModel& m) {
  std::ostringstream os;
  os << "family=" << m.provenance.family << " method=" << m.provenance.method
     << " x0=" << format_real(m.x0) << " epsilon=" << format_real(m.epsilon) << " E0=0"
     << " E1=" << format_real(m.epsilon);
  return os.str();
}

inline void emit_table(const ModelConfig& c, const QesModel& m) {
  const Grid g = grid_for(c, m);
  std::ofstream f(c.emit_path);
  if (!f) throw ConfigError("emit: cannot write '" + c.emit_path + "'");
  const bool json = c.format == "json" ||
                    (c.emit_path.size() > 5 &&
                     c.emit_path.compare(c.emit_path.size() - 5, 5, ".json") == 0);
  if (json) {
    f << table_json(m, g).dump() << '\n';
  } else {
    write_table_csv(m, g, f);
  }
}

inline CommandResult cmd_build(const ModelConfig& c) {
  const QesModel m = make_model(c);
  if (!c.emit_path.empty()) emit_table(c, m);
  return {kPass, summary_line(m) + "\n", {}};
}

inline CommandResult cmd_verify(const ModelConfig& c) {
  const QesModel m = make_model(c);
  const SpectralReport r = verify_model(m, explicit_grid(c, m), tolerances_for(c));
  nlohmann::json j;
  j["config"] = to_json(c);
  j["model"] = model_summary_json(m);
  j["report"] = qes::to_json(r);
  return {r.passed ? kPass : kVerificationFailed, "", std::move(j)};
}

inline constexpr int kMaxSpectrumDepth = 8;

inline CommandResult cmd_spectrum(const ModelConfig& c, int n_max) {
  if (n_max > kMaxSpectrumDepth) {
    throw ConfigError("n-max: " + std::to_string(n_max) + " exceeds supported excited-state depth (" +
                      std::to_string(kMaxSpectrumDepth) + ")");
  }
  if (n_max < 0) throw ConfigError("n-max: must be >= 0");
  const QesModel m = make_model(c);
  std::vector<double> analytic{0.0, m.epsilon};
  if (c.family == "poly-phi-ces") {
    analytic = ces_exact_spectrum(c.params.at("a"), c.params.at("b"), n_max);
  }
  const Grid g = grid_for(c, m);
  const auto numeric = eigensolve(m.potentials.v_minus, g, n_max + 1);
  std::ostringstream os;
  os << "n,e_analytic,e_numeric,abs_diff\n";
  for (int n = 0; n <= n_max; ++n) {
    const double e = numeric.energies[static_cast<std::size_t>(n)];
    os << n << ',';
    if (static_cast<std::size_t>(n) < analytic.size()) {
      const double a = analytic[static_cast<std::size_t>(n)];
      os << format_real(a) << ',' << format_real(e) << ',' << format_real(std::abs(e - a));
    } else {
      os << ',' << format_real(e) << ',';
    }
    os << '\n';
  }
  return {kPass, os.str(), {}};
}

inline CommandResult cmd_crosscheck(const ModelConfig& c) {
  validate(c);
  if (!is_phi_family(c)) throw ConfigError("family: crosscheck requires a φ-based family");
  const auto [phi, eps] = phi_generator(c);
  const CrossCheck x = cross_check_methods(phi, eps);
  std::ostringstream os;
  os << "v_minus_sup=" << format_real(x.v_minus_sup) << " psi0_sup=" << format_real(x.psi0_sup)
     << " psi1_sup=" << format_real(x.psi1_sup) << " epsilon_diff=" << format_real(x.epsilon_diff)
     << " x0_diff=" << format_real(x.x0_diff) << " max=" << format_real(x.max())
     << " tolerance=" << format_real(kCrossCheckTolerance) << " ok=" << (x.ok() ? "true" : "false")
     << '\n';
  return {x.ok() ? kPass : kVerificationFailed, os.str(), {}};
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

struct Flags {
  std::string family;
  std::optional<double> a, b, epsilon, A, alpha, x0, scale;
  std::string expr, generator;
  std::optional<int> grid_n;
  std::optional<double> grid_l, tol_e;
  std::string emit, out, config, sweep, format;
  int n_max = 4;
};

inline void add_common_options(CLI::App* sub, Flags& f) {
  sub->add_option("--family", f.family, "poly-wplus | poly-phi | poly-phi-ces | sinh-wplus | custom");
  sub->add_option("--a", f.a, "polynomial coefficient a");
  sub->add_option("--b", f.b, "polynomial coefficient b");
  sub->add_option("--epsilon", f.epsilon, "factorization energy (phi families)");
  sub->add_option("--A", f.A, "sinh amplitude A");
  sub->add_option("--alpha", f.alpha, "sinh rate alpha");
  sub->add_option("--x0", f.x0, "sinh zero x0");
  sub->add_option("--expr", f.expr, "custom generator expression in x");
  sub->add_option("--generator", f.generator, "custom expression is 'wplus' (default) or 'phi'");
  sub->add_option("--scale", f.scale, "custom generator length scale (default 1)");
  sub->add_option("--grid-n", f.grid_n, "grid points (odd)");
  sub->add_option("--grid-l", f.grid_l, "grid half-width");
  sub->add_option("--tol-e", f.tol_e, "energy tolerance");
  sub->add_option("--emit", f.emit, "write the x,V-,V+,W,W1,psi0,psi1 table here");
  sub->add_option("--format", f.format, "table format: csv | json");
  sub->add_option("--out", f.out, "write the report here instead of stdout");
  sub->add_option("--config", f.config, "JSON config file (flags override it)");
  sub->add_option("--sweep", f.sweep, "KEY=START:STOP:STEPS parameter sweep");
}

inline ModelConfig effective_config(const Flags& f) {
  ModelConfig c = f.config.empty() ? ModelConfig{} : load_config(f.config);
  if (!f.family.empty()) c.family = f.family;
  auto set = [&c](const char* key, const std::optional<double>& v) {
    if (v) c.params[key] = *v;
  };
  set("a", f.a);
  set("b", f.b);
  set("epsilon", f.epsilon);
  set("A", f.A);
  set("alpha", f.alpha);
  set("x0", f.x0);
  set("scale", f.scale);
  if (!f.expr.empty()) c.expr = f.expr;
  if (!f.generator.empty()) c.generator = f.generator;
  if (f.grid_n) c.grid_n = f.grid_n;
  if (f.grid_l) c.grid_l = f.grid_l;
  if (f.tol_e) c.tol_e = f.tol_e;
  if (!f.emit.empty()) c.emit_path = f.emit;
  if (!f.format.empty()) c.format = f.format;
  return c;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasi-exactly solvable potentials from supersymmetric factorization", "qes"};
  app.require_subcommand(1, 1);
  Flags flags;
  auto* build = app.add_subcommand("build", "construct a model and print its summary");
  auto* verify = app.add_subcommand("verify", "construct a model and check it numerically");
  auto* spectrum = app.add_subcommand("spectrum", "tabulate analytic and numeric levels");
  auto* crosscheck = app.add_subcommand("crosscheck", "compare both constructions for a phi family");
  for (auto* sub : {build, verify, spectrum, crosscheck}) add_common_options(sub, flags);
  spectrum->add_option("--n-max", flags.n_max, "highest level index (<= 8)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  try {
    const ModelConfig base = effective_config(flags);
    std::vector<std::pair<std::optional<double>, ModelConfig>> runs;
    std::string sweep_key;
    if (!flags.sweep.empty()) {
      const Sweep s = parse_sweep(flags.sweep);
      if (!base.emit_path.empty()) throw ConfigError("emit: cannot be combined with --sweep");
      sweep_key = s.key;
      for (double v : s.values) {
        ModelConfig c = base;
        c.params[s.key] = v;
        runs.emplace_back(v, std::move(c));
      }
    } else {
      runs.emplace_back(std::nullopt, base);
    }

    std::function<CommandResult(const ModelConfig&)> command;
    if (build->parsed()) command = cmd_build;
    else if (verify->parsed()) command = cmd_verify;
    else if (spectrum->parsed()) command = [n = flags.n_max](const ModelConfig& c) { return cmd_spectrum(c, n); };
    else command = cmd_crosscheck;

    // validation errors surface before any work starts
    for (const auto& [v, c] : runs) {
      validate(c);
      if (crosscheck->parsed() && !is_phi_family(c)) {
        throw ConfigError("family: crosscheck requires a φ-based family");
      }
    }

    std::vector<std::future<CommandResult>> jobs;
    for (const auto& [v, c] : runs) {
      jobs.push_back(std::async(runs.size() > 1 ? std::launch::async : std::launch::deferred,
                                command, c));
    }
    std::vector<CommandResult> results;
    for (auto& j : jobs) results.push_back(j.get());

    int code = kPass;
    std::ostringstream text;
    nlohmann::json reports = nlohmann::json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
      code = std::max(code, results[i].code);
      if (!results[i].text.empty()) {
        if (runs[i].first) text << "# " << sweep_key << '=' << format_real(*runs[i].first) << '\n';
        text << results[i].text;
      }
      if (!results[i].json.is_null()) {
        if (runs[i].first) results[i].json["sweep"] = {{"key", sweep_key}, {"value", *runs[i].first}};
        reports.push_back(std::move(results[i].json));
      }
    }
    std::string payload = text.str();
    if (verify->parsed()) {
      payload = (runs.size() == 1 ? reports.at(0) : reports).dump(2) + "\n";
    }
    if (!flags.out.empty()) {
      std::ofstream f(flags.out);
      if (!f) throw ConfigError("out: cannot write '" + flags.out + "'");
      f << payload;
    } else {
      out << payload;
    }
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace qes::cli
