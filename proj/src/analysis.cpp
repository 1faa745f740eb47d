#include "sigmaqc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sigmaqc/textio.hpp"

namespace sqc {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::string rect_text(const Rect& r) {
  return format_number(r.x0) + "," + format_number(r.x1) + "," + format_number(r.y0) + "," + format_number(r.y1);
}

}  // namespace

double bmo_norm(const CellScalar& phi, const Rect& region, int max_level) {
  double worst = 0.0;
  for (const Square& q : dyadic_squares(phi.grid(), region, max_level)) {
    const double m = integrate_mean(phi, q);
    worst = std::max(worst, integrate_mean(phi, q, [m](double v) { return std::abs(v - m); }));
  }
  return worst;
}

double bmo_norm(const NodalField& phi, const Rect& region, int max_level) {
  return bmo_norm(cell_values(phi), region, max_level);
}

ApEstimate muckenhoupt_constant(const CellScalar& weight, double p, const Rect& region, int max_level) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  const std::vector<Square> squares = dyadic_squares(weight.grid(), region, max_level);
  ApEstimate out;
  out.p = p;
  out.worst = squares.front();
  for (const CellWeight& cw : overlap(weight.grid(), region)) {
    if (weight[cw.cell] <= 0.0) ++out.nonpositive_cells;
  }
  if (out.nonpositive_cells > 0) {
    out.infinite = true;
    out.constant = inf;
    return out;
  }
  const double e = -1.0 / (p - 1.0);
  out.constant = 0.0;
  for (const Square& q : squares) {
    const double a = integrate_mean(weight, q);
    const double b = integrate_mean(weight, q, [e](double v) { return std::pow(v, e); });
    const double value = a * std::pow(b, p - 1.0);
    if (value > out.constant) {
      out.constant = value;
      out.worst = q;
    }
  }
  return out;
}

HarnackEstimate harnack_ratio(const CellScalar& d_sigma, const std::function<bool(Vec2)>& inside,
                              const std::vector<char>* excluded) {
  const Grid& g = d_sigma.grid();
  HarnackEstimate out;
  out.sup = -inf;
  out.inf = inf;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    if (!inside(g.cell_center(c))) continue;
    if (excluded != nullptr && (*excluded)[c]) {
      ++out.cells_excluded;
      continue;
    }
    ++out.cells_used;
    out.sup = std::max(out.sup, d_sigma[c]);
    out.inf = std::min(out.inf, d_sigma[c]);
  }
  out.defined = out.cells_used > 0 && out.inf > 0.0;
  out.H = out.defined ? out.sup / out.inf : inf;
  return out;
}

HarnackEstimate harnack_ratio(const CellScalar& d_sigma, const Rect& subregion, const std::vector<char>* excluded) {
  if (!d_sigma.grid().domain().contains(subregion)) throw std::invalid_argument("subregion leaves the field domain");
  return harnack_ratio(d_sigma, [&](Vec2 x) { return subregion.contains(x); }, excluded);
}

CorollaryCheck corollary_bound(const CellScalar& d_sigma, double delta, double H, const Rect& region,
                               const std::vector<char>* excluded) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (!d_sigma.grid().domain().contains(region)) throw std::invalid_argument("region leaves the field domain");
  const Grid& g = d_sigma.grid();
  double sup = -inf;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    if (!region.contains(g.cell_center(c))) continue;
    if (excluded != nullptr && (*excluded)[c]) continue;
    sup = std::max(sup, d_sigma[c]);
    sum += std::pow(d_sigma[c], delta);
    ++count;
  }
  CorollaryCheck out;
  out.delta = delta;
  out.H = H;
  if (count == 0) return out;
  out.lhs = sup;
  out.rhs = H * std::pow(sum / static_cast<double>(count), 1.0 / delta);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-12);
  return out;
}

double default_delta(double p) { return std::min(0.5, 1.0 / (2.0 * (p - 1.0))); }

CellScalar log_determinant(const DifferentialField& df) {
  std::vector<double> v(df.det.size());
  const double floor = std::max(df.det_threshold, std::numeric_limits<double>::min());
  for (std::size_t c = 0; c < v.size(); ++c) v[c] = std::log(std::max(df.det[c], floor));
  return CellScalar(df.det.grid(), std::move(v));
}

AnalysisReport analyze(const MapField& U, const SigmaField& sigma, const DilatationReport& dil,
                       const AnalysisOptions& options) {
  const Grid& g = sigma.grid();
  if (!(U.grid() == g)) throw std::invalid_argument("map and coefficients on different grids");
  if (!(options.p > 1.0)) throw std::invalid_argument("p must exceed 1");

  AnalysisReport r;
  r.p = options.p;
  r.delta = options.delta.value_or(default_delta(options.p));
  r.region = options.region.value_or(g.periodic() ? g.domain() : g.domain().centered_half());
  r.max_level = std::min(options.max_level, max_resolved_level(g, r.region));
  r.harnack_region = options.subregion.value_or(g.domain().centered_half());

  const DifferentialField& df = dil.differential;
  r.bmo_norm = bmo_norm(log_determinant(df), r.region, r.max_level);
  r.ap = muckenhoupt_constant(df.det, r.p, r.region, r.max_level);
  r.ap_best_p = r.p;
  r.ap_best_constant = r.ap.constant;
  for (double p : options.p_scan) {
    r.ap_scan.push_back(muckenhoupt_constant(df.det, p, r.region, r.max_level));
    if (r.ap_scan.back().constant < r.ap_best_constant) {
      r.ap_best_constant = r.ap_scan.back().constant;
      r.ap_best_p = p;
    }
  }

  r.harnack = harnack_ratio(dil.d_sigma, r.harnack_region, &df.degenerate);
  r.corollary = corollary_bound(dil.d_sigma, r.delta, r.harnack.H, r.harnack_region, &df.degenerate);
  if (!r.harnack.defined) r.failures.push_back("harnack_undefined");
  if (!r.corollary.holds) r.failures.push_back("corollary_bound");

  if (!g.periodic()) return r;

  // Global chain over the unit cell.
  r.has_global = true;
  const double tol = options.tolerance;
  r.energy_sigma = bilinear_form(sigma, U.u1, U.u1) + bilinear_form(sigma, U.u2, U.u2);
  r.two_K = 2.0 * sigma.K();
  const double area = g.cell_area();
  double trace = 0.0;
  double det_sum = 0.0;
  double energy_center = 0.0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    trace += area * sigma[c].trace();
    det_sum += area * df.det[c];
    energy_center += area * (df.DU[c] * sigma[c] * df.DU[c].transpose()).trace();
  }
  r.trace_integral = trace;
  r.area_integral = det_sum;
  if (r.energy_sigma > r.trace_integral + tol) r.failures.push_back("energy_bound");
  if (r.trace_integral > r.two_K + tol) r.failures.push_back("trace_bound");
  if (std::abs(r.area_integral - 1.0) > tol) r.failures.push_back("area_identity");

  const HarnackEstimate cell = harnack_ratio(dil.d_sigma, [](Vec2) { return true; }, &df.degenerate);
  r.cell_H = cell.H;
  r.sup_d_sigma = cell.sup;
  r.C = muckenhoupt_constant(df.det, r.p, g.domain(), r.max_level).constant;
  r.bound_M = r.C * r.cell_H * sigma.K();

  const double delta = r.delta;
  const double half_H = 0.5 * r.cell_H;
  const bool clean = df.degenerate_cells.empty();
  const double cells = static_cast<double>(g.cell_count());
  double s_d = 0.0;
  double s_energy = 0.0;
  double s_det = 0.0;
  double s_weight = 0.0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    if (df.degenerate[c]) continue;
    const double e = (df.DU[c] * sigma[c] * df.DU[c].transpose()).trace();
    s_d += std::pow(dil.d_sigma[c], delta);
    s_energy += std::pow(e, 2.0 * delta);
    s_det += std::pow(df.det[c], -2.0 * delta);
    s_weight += std::pow(df.det[c], -1.0 / (r.p - 1.0));
  }
  const double used = cells - static_cast<double>(df.degenerate_cells.size());
  r.chain.push_back(r.sup_d_sigma);
  r.chain.push_back(used > 0 ? r.cell_H * std::pow(s_d / used, 1.0 / delta) : inf);
  if (clean) {
    r.chain.push_back(half_H * std::pow(s_energy / cells, 0.5 / delta) * std::pow(s_det / cells, 0.5 / delta));
    r.chain.push_back(half_H * energy_center * std::pow(s_weight / cells, r.p - 1.0));
    r.chain.push_back(half_H * energy_center * r.C / det_sum);
  } else {
    r.chain.insert(r.chain.end(), 3, inf);
  }
  r.chain.push_back(half_H * r.trace_integral * r.C / det_sum);
  r.chain.push_back(r.bound_M);
  for (std::size_t k = 0; k + 1 < r.chain.size(); ++k) {
    if (!(r.chain[k] <= r.chain[k + 1] * (1.0 + 1e-9) + 1e-12)) r.chain_ok = false;
  }
  if (!r.chain_ok) r.failures.push_back("bound_chain");
  return r;
}

AnalysisReport global_checks(const MapField& U, const SigmaField& sigma, const AnalysisOptions& options) {
  if (!sigma.grid().periodic()) throw std::invalid_argument("global checks need a periodic cell solution");
  const DilatationReport dil = dilatation_fields(U, sigma, options.subregion, options.relative_threshold);
  return analyze(U, sigma, dil, options);
}

void write_report(std::ostream& out, const AnalysisReport& r) {
  KeyValueDocument doc;
  doc.add("p", r.p);
  doc.add("delta", r.delta);
  doc.add("max_level", r.max_level);
  doc.add("region", rect_text(r.region));
  doc.add("bmo_norm", r.bmo_norm);
  doc.add("ap_constant", r.ap.constant);
  doc.add("ap_infinite", r.ap.infinite);
  for (const ApEstimate& a : r.ap_scan) doc.add("ap_constant_p" + format_number(a.p), a.constant);
  doc.add("ap_best_p", r.ap_best_p);
  doc.add("ap_best_constant", r.ap_best_constant);
  doc.add("harnack_region", rect_text(r.harnack_region));
  doc.add("harnack_H", r.harnack.H);
  doc.add("harnack_defined", r.harnack.defined);
  doc.add("harnack_cells_excluded", r.harnack.cells_excluded);
  doc.add("corollary_lhs", r.corollary.lhs);
  doc.add("corollary_rhs", r.corollary.rhs);
  doc.add("corollary_holds", r.corollary.holds);
  if (r.has_global) {
    doc.section("global");
    doc.add("energy_sigma", r.energy_sigma);
    doc.add("trace_integral", r.trace_integral);
    doc.add("two_K", r.two_K);
    doc.add("area_integral", r.area_integral);
    doc.add("sup_d_sigma", r.sup_d_sigma);
    doc.add("cell_harnack_H", r.cell_H);
    doc.add("C", r.C);
    doc.add("bound_M", r.bound_M);
    for (std::size_t k = 0; k < r.chain.size(); ++k) doc.add("chain_" + std::to_string(k), r.chain[k]);
    doc.add("chain_ok", r.chain_ok);
  }
  std::string failures;
  for (const std::string& f : r.failures) failures += (failures.empty() ? "" : ",") + f;
  doc.section("status");
  doc.add("failures", failures.empty() ? std::string("none") : failures);
  doc.write(out);
}

}  // namespace sqc
