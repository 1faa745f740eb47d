#include "sigmaqc/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "sigmaqc/textio.hpp"

namespace sqc {

namespace {

Rect parse_rect(const std::string& text, int line) {
  const std::vector<std::string> parts = split(text, ',');
  if (parts.size() != 4) throw ConfigError("line " + std::to_string(line) + ": rectangle needs x0, x1, y0, y1");
  Rect r{parse_number(trim(parts[0])), parse_number(trim(parts[1])), parse_number(trim(parts[2])),
         parse_number(trim(parts[3]))};
  if (!(r.x1 > r.x0) || !(r.y1 > r.y0)) throw ConfigError("line " + std::to_string(line) + ": empty rectangle");
  return r;
}

int parse_int(const std::string& text) {
  const double v = parse_number(text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw std::invalid_argument("expected an integer: " + text);
  return static_cast<int>(v);
}

std::string rect_text(const Rect& r) {
  return format_number(r.x0) + "," + format_number(r.x1) + "," + format_number(r.y0) + "," + format_number(r.y1);
}

void set_top(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "case") {
    c.case_name = value;
  } else if (key == "grid") {
    for (const std::string& part : split(value, ',')) c.grids.push_back(parse_int(trim(part)));
  } else if (key == "out") {
    c.out = value;
  } else {
    throw std::invalid_argument("unknown key '" + key + "'");
  }
}

void set_analysis(AnalysisOptions& a, const std::string& key, const std::string& value, int line) {
  if (key == "p") {
    a.p = parse_number(value);
    if (!(a.p > 1.0)) throw std::invalid_argument("p must exceed 1");
  } else if (key == "delta") {
    a.delta = parse_number(value);
    if (!(*a.delta > 0.0)) throw std::invalid_argument("delta must be positive");
  } else if (key == "max_level") {
    a.max_level = parse_int(value);
    if (a.max_level < 0) throw std::invalid_argument("max_level must be non-negative");
  } else if (key == "subregion") {
    a.subregion = parse_rect(value, line);
  } else if (key == "region") {
    a.region = parse_rect(value, line);
  } else if (key == "p_scan") {
    a.p_scan.clear();
    for (const std::string& part : split(value, ',')) a.p_scan.push_back(parse_number(trim(part)));
  } else if (key == "tolerance") {
    a.tolerance = parse_number(value);
  } else {
    throw std::invalid_argument("unknown analysis key '" + key + "'");
  }
}

double relative_error(double measured, double expected) {
  const double scale = std::abs(expected);
  return scale > 0.0 ? std::abs(measured - expected) / scale : std::abs(measured);
}

GridResult evaluate(const CaseBundle& bundle, const RunConfig& config, int n) {
  const Grid g = bundle.grid(n);
  SigmaField sigma = bundle.sigma_on(g);
  SolveInfo info;
  MapField U = bundle.map_on(sigma, {}, &info);
  DilatationReport dil = dilatation_fields(U, sigma, config.analysis.subregion, config.analysis.relative_threshold);
  AnalysisReport an = analyze(U, sigma, dil, config.analysis);
  ConjugatePair pair = stream_function(sigma, U.u1);
  const BeltramiPair belt = beltrami_coefficients(sigma);

  std::map<std::string, double> m;
  const DifferentialField& df = dil.differential;
  const std::size_t cells = g.cell_count();

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double ds_sum = 0.0, w1_sum = 0.0, w2_sum = 0.0;
  std::size_t used = 0;
  for (std::size_t c = 0; c < cells; ++c) {
    if (df.degenerate[c]) continue;
    lo = std::min(lo, dil.d_sigma[c]);
    hi = std::max(hi, dil.d_sigma[c]);
    ds_sum += dil.d_sigma[c];
    w1_sum += dil.w1[c];
    w2_sum += dil.w2[c];
    ++used;
  }
  const double count = used > 0 ? static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN();
  m["d_sigma_mean"] = ds_sum / count;
  m["d_sigma_const"] = used > 0 ? (hi - lo) / (ds_sum / count) : std::numeric_limits<double>::infinity();
  m["w1_mean"] = w1_sum / count;
  m["w2_mean"] = w2_sum / count;
  m["harnack_H"] = dil.harnack_H;
  m["identity_residual"] = dil.identity_residual;
  m["comparability_excess"] = dil.comparability_excess;
  m["degenerate_fraction"] = static_cast<double>(dil.degenerate_count) / static_cast<double>(cells);

  if (bundle.exact) {
    const ExactSolution& ex = *bundle.exact;
    double e_ds = 0.0, e_det = 0.0, e_w = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      if (df.degenerate[c]) continue;
      const Vec2 x = g.cell_center(c);
      if (ex.d_sigma) e_ds = std::max(e_ds, relative_error(dil.d_sigma[c], ex.d_sigma(x)));
      if (ex.det) e_det = std::max(e_det, relative_error(df.det[c], ex.det(x)));
      if (ex.DU) {
        const Mat2 du = ex.DU(x);
        const Mat2 s = bundle.sigma(x);
        e_w = std::max({e_w, relative_error(dil.w1[c], w_value(du, du.row1(), s)),
                        relative_error(dil.w2[c], w_value(du, du.row2(), s))});
      }
    }
    if (ex.d_sigma) m["d_sigma_oracle"] = e_ds;
    if (ex.det) m["det_oracle"] = e_det;
    if (ex.DU) m["w_oracle"] = e_w;
  }

  const double drift_cap = (1.0 + sigma.beta()) * sigma.E() / sigma.alpha();
  double drift_max = 0.0;
  for (std::size_t c = 0; c < cells; ++c) drift_max = std::max({drift_max, norm(dil.B1[c]), norm(dil.B2[c])});
  m["E"] = sigma.E();
  m["drift_max"] = drift_max;
  m["drift_bound"] = drift_max - drift_cap;
  m["lemma_residual"] = std::max(drift_equation_residual(sigma, dil.w1, dil.B1),
                                 drift_equation_residual(sigma, dil.w2, dil.B2));

  const double K = sigma.K();
  double sharp = -std::numeric_limits<double>::infinity();
  double nu_max = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    const double kd = distortion_constant(sigma[c]);
    sharp = std::max(sharp, std::abs(belt.mu[c]) + std::abs(belt.nu[c]) - (kd - 1.0) / (kd + 1.0));
    nu_max = std::max(nu_max, std::abs(belt.nu[c]));
  }
  m["K"] = K;
  m["k_ess"] = belt.k_ess;
  m["K_belt"] = belt.K_belt;
  m["nu_abs"] = nu_max;
  m["beltrami_bound"] = belt.k_ess - (K - 1.0) / (K + 1.0);
  m["beltrami_sharp_bound"] = sharp;
  m["beltrami_residual"] = beltrami_residual(pair, belt);
  m["conjugate_mismatch"] = pair.mismatch;
  m["distortion_excess"] = distortion_excess(pair, belt.K_belt);
  m["solver_residual"] = std::max(weak_residual(sigma, U.u1), weak_residual(sigma, U.u2));

  m["bmo_norm"] = an.bmo_norm;
  m["ap_constant"] = an.ap.constant;
  for (const ApEstimate& a : an.ap_scan) m["ap_constant_p" + format_number(a.p)] = a.constant;
  m["corollary_excess"] = an.corollary.rhs > 0.0 ? an.corollary.lhs / an.corollary.rhs - 1.0 : 0.0;
  if (an.has_global) {
    m["energy_sigma"] = an.energy_sigma;
    m["trace_integral"] = an.trace_integral;
    m["area_integral"] = an.area_integral;
    m["area_identity"] = std::abs(an.area_integral - 1.0);
    m["energy_bound"] = an.energy_sigma - an.trace_integral;
    m["sup_d_sigma"] = an.sup_d_sigma;
    m["bound_M"] = an.bound_M;
    double chain = 0.0;
    for (std::size_t k = 0; k + 1 < an.chain.size(); ++k) {
      if (std::isfinite(an.chain[k + 1])) chain = std::max(chain, an.chain[k] / an.chain[k + 1] - 1.0);
    }
    m["bound_chain"] = chain;
  }

  return GridResult{n, std::move(sigma), std::move(U), std::move(pair), info, std::move(dil), std::move(an),
                    std::move(m)};
}

/// Oracle key and the metric that measures it.
const std::vector<std::pair<std::string, std::string>>& oracle_metrics() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"d_sigma", "d_sigma_mean"}, {"w1", "w1_mean"},       {"w2", "w2_mean"},
      {"harnack_H", "harnack_H"},  {"energy", "energy_sigma"}, {"area", "area_integral"},
      {"trace", "trace_integral"}, {"ap_p2", "ap_constant_p2"}, {"k_ess", "k_ess"},
      {"nu_abs", "nu_abs"},        {"E", "E"}};
  return table;
}

std::string join_params(const std::map<std::string, double>& params) {
  std::string s;
  for (const auto& [k, v] : params) s += (s.empty() ? "" : ",") + k + "=" + format_number(v);
  return s.empty() ? "none" : s;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw std::ios_base::failure("cannot write " + path.string());
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      "d_sigma_const",     "d_sigma_oracle",    "w_oracle",       "det_oracle",         "harnack_H",
      "area_identity",     "energy_bound",      "identity_residual", "comparability_excess", "drift_bound",
      "beltrami_bound",    "beltrami_sharp_bound", "solver_residual", "lemma_residual",  "conjugate_mismatch",
      "beltrami_residual", "distortion_excess", "bound_chain",    "corollary_excess"};
  return names;
}

const std::vector<std::string>& field_names() {
  static const std::vector<std::string> names = {"u1", "u2", "u_tilde", "det", "d", "d_sigma", "w1",
                                                 "w2", "B1", "B2",     "DU",  "sigma", "beltrami"};
  return names;
}

std::map<std::string, double> parse_params(const std::string& text) {
  std::map<std::string, double> out;
  for (const std::string& item : split(text, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("parameter needs key=value: " + t);
    out[trim(t.substr(0, eq))] = parse_number(trim(t.substr(eq + 1)));
  }
  return out;
}

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::string section;
  std::string raw;
  int line = 0;
  std::vector<std::string> seen_checks;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError("line " + std::to_string(line) + ": malformed section header");
      section = trim(text.substr(1, text.size() - 2));
      if (section != "params" && section != "analysis" && section != "checks" && section != "export") {
        throw ConfigError("line " + std::to_string(line) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key");
    try {
      if (section.empty()) {
        set_top(c, key, value);
      } else if (section == "params") {
        c.params[key] = parse_number(value);
      } else if (section == "analysis") {
        set_analysis(c.analysis, key, value, line);
      } else if (section == "checks") {
        const auto& names = check_names();
        if (std::find(names.begin(), names.end(), key) == names.end()) {
          throw std::invalid_argument("unknown check '" + key + "'");
        }
        if (std::find(seen_checks.begin(), seen_checks.end(), key) != seen_checks.end()) {
          throw std::invalid_argument("duplicate check '" + key + "'");
        }
        seen_checks.push_back(key);
        const double tol = parse_number(value);
        if (!(tol >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");
        c.checks.push_back({key, tol});
      } else if (key == "fields") {
        for (const std::string& part : split(value, ',')) {
          const std::string f = trim(part);
          const auto& names = field_names();
          if (std::find(names.begin(), names.end(), f) == names.end()) {
            throw std::invalid_argument("unknown field '" + f + "'");
          }
          c.exports.push_back(f);
        }
      } else {
        throw std::invalid_argument("unknown export key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("line " + std::to_string(line) + ": " + e.what());
    }
  }
  if (c.case_name.empty()) throw ConfigError("missing 'case'");
  if (c.grids.empty()) throw ConfigError("missing 'grid'");
  for (std::size_t k = 0; k < c.grids.size(); ++k) {
    if (c.grids[k] < 2) throw ConfigError("grid sizes must be at least 2");
    if (k > 0 && c.grids[k] <= c.grids[k - 1]) throw ConfigError("grid sizes must be strictly increasing");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path.string());
  return parse_config(f);
}

bool RunReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

RunReport run(const RunConfig& config) {
  RunReport report;
  report.config = config;
  try {
    report.bundle = make_case(config.case_name, config.params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (int n : config.grids) {
    if (n % report.bundle.grid_multiple != 0) {
      throw ConfigError("case " + report.bundle.name + " needs grid sizes divisible by " +
                        std::to_string(report.bundle.grid_multiple));
    }
  }
  if (config.analysis.region) {
    const Rect& r = *config.analysis.region;
    if (std::abs(r.width() - r.height()) > 1e-12 * r.width() || !report.bundle.domain.contains(r)) {
      throw ConfigError("analysis region must be a square inside the case domain");
    }
  }
  if (config.analysis.subregion && !report.bundle.domain.contains(*config.analysis.subregion)) {
    throw ConfigError("analysis subregion leaves the case domain");
  }

  for (int n : config.grids) report.grids.push_back(evaluate(report.bundle, config, n));

  for (const CheckSpec& spec : config.checks) {
    CheckResult r{spec.name, spec.tolerance, -std::numeric_limits<double>::infinity(), 0, true};
    for (const GridResult& g : report.grids) {
      const auto it = g.metrics.find(spec.name);
      if (it == g.metrics.end()) {
        throw ConfigError("check '" + spec.name + "' is not available for case " + report.bundle.name);
      }
      // NaN counts as the worst possible value.
      const double v = std::isnan(it->second) ? std::numeric_limits<double>::infinity() : it->second;
      if (v > r.measured || r.grid == 0) {
        r.measured = v;
        r.grid = g.n;
      }
    }
    r.passed = r.measured <= r.tolerance;
    report.checks.push_back(r);
  }
  return report;
}

std::string RunReport::text() const {
  KeyValueDocument doc;
  doc.add("case", bundle.name);
  doc.add("params", join_params(bundle.params));
  doc.add("topology", to_string(bundle.topology));
  doc.add("domain", rect_text(bundle.domain));
  std::string grid_list;
  for (const GridResult& g : grids) grid_list += (grid_list.empty() ? "" : ",") + std::to_string(g.n);
  doc.add("grids", grid_list);
  for (const GridResult& g : grids) {
    doc.section("grid " + std::to_string(g.n));
    doc.add("solver", std::string(bundle.analytic_map ? "analytic" : (g.solve.direct ? "direct" : "iterative")));
    for (const auto& [k, v] : g.metrics) doc.add(k, v);
    bool any = false;
    for (const auto& [key, metric] : oracle_metrics()) {
      const auto expected = bundle.oracle.find(key);
      const auto measured = g.metrics.find(metric);
      if (expected == bundle.oracle.end() || measured == g.metrics.end()) continue;
      if (!any) doc.section("oracle " + std::to_string(g.n));
      any = true;
      doc.add(key, "expected=" + format_number(expected->second) + " measured=" + format_number(measured->second) +
                       " rel_error=" + format_number(relative_error(measured->second, expected->second)));
    }
  }
  doc.section("checks");
  for (const CheckResult& c : checks) {
    doc.add(c.name, std::string(c.passed ? "PASS" : "FAIL") + " measured=" + format_number(c.measured) +
                        " tolerance=" + format_number(c.tolerance) + " grid=" + std::to_string(c.grid));
  }
  doc.section("status");
  doc.add("result", std::string(passed() ? "pass" : "fail"));
  std::ostringstream os;
  doc.write(os);
  return os.str();
}

void write_field(std::ostream& out, const RunReport&, const GridResult& g, const std::string& field) {
  const DilatationReport& d = g.dilatation;
  if (field == "u1") return write_table(out, g.map->u1);
  if (field == "u2") return write_table(out, g.map->u2);
  if (field == "u_tilde") return write_table(out, g.pair->u_tilde);
  if (field == "det") return write_table(out, d.differential.det);
  if (field == "d") return write_table(out, d.d);
  if (field == "d_sigma") return write_table(out, d.d_sigma);
  if (field == "w1") return write_table(out, d.w1);
  if (field == "w2") return write_table(out, d.w2);
  if (field == "B1") return write_table(out, d.B1);
  if (field == "B2") return write_table(out, d.B2);
  if (field == "DU") return write_table(out, d.differential.DU);
  if (field == "sigma") return write_table(out, g.sigma->matrix());
  if (field == "beltrami") {
    const BeltramiPair b = beltrami_coefficients(*g.sigma);
    return write_table(out, b.mu, b.nu);
  }
  throw ConfigError("unknown field '" + field + "'");
}

int run_command(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out_dir,
                std::ostream& log, std::ostream& err) {
  RunReport report;
  std::filesystem::path dir;
  try {
    const RunConfig config = load_config(config_path);
    dir = out_dir.value_or(config.out.value_or("."));
    if (config.out && config.out->is_relative() && !out_dir) dir = config_path.parent_path() / *config.out;
    report = run(config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const SolverError& e) {
    err << "solver failed: " << e.what() << " (iterations " << e.iterations() << ", residual "
        << format_number(e.residual()) << ")\n";
    return exit_check_failed;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config_error;
  }

  try {
    std::filesystem::create_directories(dir);
    write_file(dir / "report.txt", report.text());
    for (const GridResult& g : report.grids) {
      const std::string suffix = "_n" + std::to_string(g.n) + ".txt";
      std::ostringstream a;
      write_report(a, g.analysis);
      write_file(dir / ("analysis" + suffix), a.str());
      std::ostringstream d;
      write_summary(d, g.dilatation);
      write_file(dir / ("dilatation" + suffix), d.str());
      for (const std::string& field : report.config.exports) {
        std::ostringstream f;
        write_field(f, report, g, field);
        write_file(dir / ("field_" + field + "_n" + std::to_string(g.n) + ".csv"), f.str());
      }
    }
  } catch (const std::exception& e) {
    err << "io error: " << e.what() << "\n";
    return exit_config_error;
  }

  for (const CheckResult& c : report.checks) {
    log << (c.passed ? "PASS " : "FAIL ") << c.name << " measured=" << format_number(c.measured)
        << " tolerance=" << format_number(c.tolerance) << " grid=" << c.grid << "\n";
  }
  log << "report: " << (dir / "report.txt").string() << "\n";
  return report.passed() ? exit_ok : exit_check_failed;
}

int export_command(const std::filesystem::path& config_path, const std::string& field, std::ostream& out,
                   std::ostream& err) {
  const auto& names = field_names();
  if (std::find(names.begin(), names.end(), field) == names.end()) {
    err << "config error: unknown field '" << field << "'\n";
    return exit_config_error;
  }
  try {
    const RunReport report = run(load_config(config_path));
    write_field(out, report, report.grids.back(), field);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const SolverError& e) {
    err << "solver failed: " << e.what() << "\n";
    return exit_check_failed;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config_error;
  }
  if (!out) {
    err << "io error: cannot write field\n";
    return exit_config_error;
  }
  return exit_ok;
}

}  // namespace sqc
