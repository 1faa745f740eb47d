#include "sigmaqc/dilatation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sigmaqc/textio.hpp"

namespace sqc {

DifferentialField map_differential(const MapField& U, double relative_threshold) {
  const Grid& g = U.grid();
  if (!(U.u2.grid() == g)) throw std::invalid_argument("map components on different grids");
  const VectorField g1 = gradient(U.u1);
  const VectorField g2 = gradient(U.u2);

  std::vector<Mat2> du(g.cell_count());
  std::vector<double> det(g.cell_count());
  double scale = 0.0;
  for (std::size_t c = 0; c < du.size(); ++c) {
    du[c] = Mat2::from_rows(g1[c], g2[c]);
    det[c] = du[c].det();
    scale = std::max(scale, du[c].frobenius_sq());
  }

  DifferentialField out{MatrixField(g, std::move(du)), CellScalar(g, std::move(det)), {}, {}, 0.0, 0.0, scale};
  out.det_threshold = relative_threshold * scale;
  out.grad_threshold = relative_threshold * scale;
  out.degenerate.assign(g.cell_count(), 0);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const Mat2& m = out.DU[c];
    const bool bad = out.det[c] <= out.det_threshold || dot(m.row1(), m.row1()) <= out.grad_threshold ||
                     dot(m.row2(), m.row2()) <= out.grad_threshold;
    if (bad) {
      out.degenerate[c] = 1;
      out.degenerate_cells.push_back(c);
    }
  }
  return out;
}

double distortion(const Mat2& du) { return du.frobenius_sq() / (2.0 * du.det()); }

double sigma_distortion(const Mat2& du, const Mat2& sigma) {
  return (du * sigma * du.transpose()).trace() / (2.0 * du.det());
}

double w_value(const Mat2& du, Vec2 g, const Mat2& sigma) { return du.det() / dot(sigma * g, g); }

Vec2 drift_vector(Vec2 g, const Mat2& sigma, Vec2 grad_b, Vec2 grad_c, double grad_threshold) {
  if (dot(g, g) <= grad_threshold) return {};
  const Vec2 jg = rotate(g);
  const Vec2 sg = sigma * g;
  return (dot(jg, grad_c) * jg + dot(jg, grad_b) * sg) / dot(sg, g);
}

DriftPair drift_fields(const MapField& U, const SigmaField& sigma, double relative_threshold) {
  const DifferentialField df = map_differential(U, relative_threshold);
  const Grid& g = sigma.grid();
  if (!(U.grid() == g)) throw std::invalid_argument("map and coefficients on different grids");
  std::vector<Vec2> b1(g.cell_count());
  std::vector<Vec2> b2(g.cell_count());
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    b1[c] = drift_vector(df.DU[c].row1(), sigma[c], sigma.grad_b()[c], sigma.grad_c()[c], df.grad_threshold);
    b2[c] = drift_vector(df.DU[c].row2(), sigma[c], sigma.grad_b()[c], sigma.grad_c()[c], df.grad_threshold);
  }
  return {VectorField(g, std::move(b1)), VectorField(g, std::move(b2))};
}

DilatationReport dilatation_fields(const MapField& U, const SigmaField& sigma, std::optional<Rect> subregion,
                                   double relative_threshold) {
  const Grid& g = sigma.grid();
  if (!(U.grid() == g)) throw std::invalid_argument("map and coefficients on different grids");
  DifferentialField df = map_differential(U, relative_threshold);
  DriftPair drift = drift_fields(U, sigma, relative_threshold);

  const std::size_t n = g.cell_count();
  std::vector<double> d(n, 0.0), ds(n, 0.0), w1(n, 0.0), w2(n, 0.0);
  const Rect region = subregion.value_or(g.domain().centered_half());
  if (!g.domain().contains(region)) throw std::invalid_argument("subregion leaves the grid domain");

  double sup = -std::numeric_limits<double>::infinity();
  double inf = std::numeric_limits<double>::infinity();
  double identity = 0.0;
  double comparability = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < n; ++c) {
    if (df.degenerate[c]) continue;
    const Mat2& du = df.DU[c];
    d[c] = distortion(du);
    ds[c] = sigma_distortion(du, sigma[c]);
    w1[c] = w_value(du, du.row1(), sigma[c]);
    w2[c] = w_value(du, du.row2(), sigma[c]);
    identity = std::max(identity, std::abs(ds[c] - 0.5 * (1.0 / w1[c] + 1.0 / w2[c])));
    comparability = std::max({comparability, sigma.alpha() * d[c] - ds[c], ds[c] - sigma.beta() * d[c]});
    if (region.contains(g.cell_center(c))) {
      sup = std::max(sup, ds[c]);
      inf = std::min(inf, ds[c]);
    }
  }

  DilatationReport out{std::move(df),
                       CellScalar(g, std::move(d)),
                       CellScalar(g, std::move(ds)),
                       CellScalar(g, std::move(w1)),
                       CellScalar(g, std::move(w2)),
                       std::move(drift.B1),
                       std::move(drift.B2),
                       region};
  out.sup_d_sigma = sup;
  out.inf_d_sigma = inf;
  out.harnack_H = (inf > 0.0 && std::isfinite(sup)) ? sup / inf : std::numeric_limits<double>::infinity();
  out.identity_residual = identity;
  out.comparability_excess = comparability;
  out.degenerate_count = out.differential.degenerate_cells.size();
  out.degenerate_dominated = 10 * out.degenerate_count > n;
  return out;
}

double drift_equation_residual(const SigmaField& sigma, const CellScalar& w, const VectorField& B) {
  return weak_residual(sigma, node_reconstruction(w), B);
}

void write_summary(std::ostream& out, const DilatationReport& r) {
  KeyValueDocument doc;
  doc.add("subregion", format_number(r.subregion.x0) + "," + format_number(r.subregion.x1) + "," +
                           format_number(r.subregion.y0) + "," + format_number(r.subregion.y1));
  doc.add("sup_d_sigma", r.sup_d_sigma);
  doc.add("inf_d_sigma", r.inf_d_sigma);
  doc.add("harnack_H", r.harnack_H);
  doc.add("identity_residual", r.identity_residual);
  doc.add("comparability_excess", r.comparability_excess);
  doc.add("degenerate_cells", r.degenerate_count);
  doc.add("degenerate_dominated", r.degenerate_dominated);
  doc.write(out);
}

}  // namespace sqc
