#include "sigmaqc/mesh.hpp"

#include <algorithm>

namespace sqc {

double symmetric_min_eigenvalue(const Mat2& m) {
  const Mat2 s = m.symmetric_part();
  const double mean = 0.5 * (s.a11 + s.a22);
  const double rad = std::hypot(0.5 * (s.a11 - s.a22), s.a12);
  return mean - rad;
}

double symmetric_max_eigenvalue(const Mat2& m) {
  const Mat2 s = m.symmetric_part();
  const double mean = 0.5 * (s.a11 + s.a22);
  const double rad = std::hypot(0.5 * (s.a11 - s.a22), s.a12);
  return mean + rad;
}

std::string to_string(Topology t) { return t == Topology::periodic ? "periodic" : "dirichlet"; }

Grid Grid::build(int nx, int ny, Rect domain, Topology topology) {
  if (nx < 2 || ny < 2) throw GridError("degenerate grid");
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0)) throw GridError("degenerate grid");
  if (topology == Topology::periodic && !(domain == Rect::unit())) {
    throw GridError("periodic topology requires the unit cell [0,1]x[0,1]");
  }
  return Grid(nx, ny, domain, topology);
}

namespace {
int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}
int period_count(int i, int n) {
  return i >= 0 ? i / n : -((-i + n - 1) / n);
}
}  // namespace

std::size_t Grid::node(int i, int j) const {
  if (periodic()) {
    i = wrap(i, nx_);
    j = wrap(j, ny_);
  }
  return static_cast<std::size_t>(j) * static_cast<std::size_t>(node_cols()) +
         static_cast<std::size_t>(i);
}

NodalField::NodalField(Grid grid, std::vector<double> values, Vec2 jump)
    : grid_(std::move(grid)), values_(std::move(values)), jump_(jump) {
  if (values_.size() != grid_.node_count()) {
    throw std::invalid_argument("nodal field size does not match grid");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("nodal field has non-finite entry");
  }
  if (!grid_.periodic() && (jump_.x != 0.0 || jump_.y != 0.0)) {
    throw std::invalid_argument("period jump requires a periodic grid");
  }
}

NodalField NodalField::sample(const Grid& grid, const std::function<double(Vec2)>& f, Vec2 jump) {
  std::vector<double> values(grid.node_count());
  for (int j = 0; j < grid.node_rows(); ++j) {
    for (int i = 0; i < grid.node_cols(); ++i) values[grid.node(i, j)] = f(grid.node_position(i, j));
  }
  return NodalField(grid, std::move(values), jump);
}

NodalField NodalField::constant(const Grid& grid, double value) {
  return NodalField(grid, std::vector<double>(grid.node_count(), value));
}

double NodalField::value(int i, int j) const {
  if (!grid_.periodic()) return values_[grid_.node(i, j)];
  return values_[grid_.node(i, j)] + period_count(i, grid_.nx()) * jump_.x +
         period_count(j, grid_.ny()) * jump_.y;
}

NodalField NodalField::shifted(double offset) const {
  std::vector<double> v(values_);
  for (double& x : v) x += offset;
  return NodalField(grid_, std::move(v), jump_);
}

ElementGradients element_gradients(const NodalField& u, int i, int j) {
  const Grid& g = u.grid();
  const double u00 = u.value(i, j);
  const double u10 = u.value(i + 1, j);
  const double u11 = u.value(i + 1, j + 1);
  const double u01 = u.value(i, j + 1);
  return {{(u10 - u00) / g.hx(), (u11 - u10) / g.hy()},
          {(u11 - u01) / g.hx(), (u01 - u00) / g.hy()}};
}

VectorField gradient(const NodalField& u) {
  const Grid& g = u.grid();
  std::vector<Vec2> out(g.cell_count());
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double u00 = u.value(i, j);
      const double u10 = u.value(i + 1, j);
      const double u11 = u.value(i + 1, j + 1);
      const double u01 = u.value(i, j + 1);
      out[g.cell(i, j)] = {((u10 - u00) + (u11 - u01)) / (2.0 * g.hx()),
                           ((u01 - u00) + (u11 - u10)) / (2.0 * g.hy())};
    }
  }
  return VectorField(g, std::move(out));
}

CellScalar cell_values(const NodalField& u) {
  const Grid& g = u.grid();
  std::vector<double> out(g.cell_count());
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      out[g.cell(i, j)] =
          0.25 * (u.value(i, j) + u.value(i + 1, j) + u.value(i + 1, j + 1) + u.value(i, j + 1));
    }
  }
  return CellScalar(g, std::move(out));
}

NodalField node_average(const CellScalar& f) {
  const Grid& g = f.grid();
  std::vector<double> out(g.node_count());
  for (int j = 0; j < g.node_rows(); ++j) {
    for (int i = 0; i < g.node_cols(); ++i) {
      double sum = 0.0;
      int count = 0;
      for (int cj = j - 1; cj <= j; ++cj) {
        for (int ci = i - 1; ci <= i; ++ci) {
          int wi = ci;
          int wj = cj;
          if (g.periodic()) {
            wi = wrap(ci, g.nx());
            wj = wrap(cj, g.ny());
          } else if (ci < 0 || cj < 0 || ci >= g.nx() || cj >= g.ny()) {
            continue;
          }
          sum += f.at(wi, wj);
          ++count;
        }
      }
      out[g.node(i, j)] = sum / count;
    }
  }
  return NodalField(g, std::move(out));
}

NodalField node_reconstruction(const CellScalar& f) {
  const NodalField avg = node_average(f);
  const Grid& g = f.grid();
  if (g.periodic() || g.nx() < 4 || g.ny() < 4) return avg;
  std::vector<double> out(avg.values().begin(), avg.values().end());
  const int nx = g.nx();
  const int ny = g.ny();
  // Step from a boundary node towards the interior; corners move diagonally.
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      if (!g.is_boundary_node(i, j)) continue;
      const int di = i == 0 ? 1 : (i == nx ? -1 : 0);
      const int dj = j == 0 ? 1 : (j == ny ? -1 : 0);
      out[g.node(i, j)] = 2.0 * avg.value(i + di, j + dj) - avg.value(i + 2 * di, j + 2 * dj);
    }
  }
  return NodalField(g, std::move(out));
}

double integral(const NodalField& u) {
  const Grid& g = u.grid();
  double total = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      total += 2.0 * u.value(i, j) + u.value(i + 1, j) + 2.0 * u.value(i + 1, j + 1) +
               u.value(i, j + 1);
    }
  }
  return total * g.cell_area() / 6.0;
}

double integral(const CellScalar& f) {
  double total = 0.0;
  for (double v : f.values()) total += v;
  return total * f.grid().cell_area();
}

std::vector<CellWeight> overlap(const Grid& grid, const Rect& r) {
  const Rect& d = grid.domain();
  const double hx = grid.hx();
  const double hy = grid.hy();
  const int i0 = std::max(0, static_cast<int>(std::floor((r.x0 - d.x0) / hx)));
  const int i1 = std::min(grid.nx() - 1, static_cast<int>(std::ceil((r.x1 - d.x0) / hx)) - 1);
  const int j0 = std::max(0, static_cast<int>(std::floor((r.y0 - d.y0) / hy)));
  const int j1 = std::min(grid.ny() - 1, static_cast<int>(std::ceil((r.y1 - d.y0) / hy)) - 1);
  std::vector<CellWeight> out;
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      const Rect c = grid.cell_rect(i, j);
      const double wx = std::min(c.x1, r.x1) - std::max(c.x0, r.x0);
      const double wy = std::min(c.y1, r.y1) - std::max(c.y0, r.y0);
      if (wx <= 0.0 || wy <= 0.0) continue;
      // Snap near-complete coverage so aligned squares see exact unit weights.
      double fx = wx / hx;
      double fy = wy / hy;
      if (fx > 1.0 - 1e-10) fx = 1.0;
      if (fy > 1.0 - 1e-10) fy = 1.0;
      if (fx < 1e-10 || fy < 1e-10) continue;
      out.push_back({grid.cell(i, j), fx * fy});
    }
  }
  return out;
}

namespace {
void require_inside(const Grid& grid, const Rect& r) {
  const double tol = 1e-12 * std::max(grid.domain().width(), grid.domain().height());
  if (!grid.domain().contains(r, tol)) {
    throw std::invalid_argument("square extends outside the grid domain");
  }
}
}  // namespace

double integrate_mean(const CellScalar& f, const Square& q, const std::function<double(double)>& g) {
  require_inside(f.grid(), q.bounds());
  double sum = 0.0;
  double weight = 0.0;
  for (const CellWeight& cw : overlap(f.grid(), q.bounds())) {
    sum += cw.fraction * g(f[cw.cell]);
    weight += cw.fraction;
  }
  if (weight <= 0.0) throw std::invalid_argument("square has zero area");
  return sum / weight;
}

double integrate_mean(const CellScalar& f, const Square& q) {
  return integrate_mean(f, q, [](double v) { return v; });
}

double integrate_mean(const NodalField& f, const Square& q) { return integrate_mean(cell_values(f), q); }

int max_resolved_level(const Grid& grid, const Rect& region) {
  const double cell = std::max(grid.hx(), grid.hy());
  int level = 0;
  while (region.width() / std::ldexp(1.0, level + 1) >= cell * (1.0 - 1e-12)) ++level;
  return level;
}

std::vector<Square> dyadic_squares(const Grid& grid, const Rect& region, int max_level) {
  if (max_level < 0) throw std::invalid_argument("max_level must be non-negative");
  const double side = region.width();
  if (!(side > 0.0) || std::abs(side - region.height()) > 1e-12 * side) {
    throw std::invalid_argument("dyadic region must be a square");
  }
  require_inside(grid, region);
  if (max_level > max_resolved_level(grid, region)) throw std::invalid_argument("resolution exceeded");

  std::vector<Square> out;
  for (int level = 0; level <= max_level; ++level) {
    const int per_axis = 1 << level;
    const double s = side / per_axis;
    for (int b = 0; b < per_axis; ++b) {
      for (int a = 0; a < per_axis; ++a) {
        out.push_back({{region.x0 + (a + 0.5) * s, region.y0 + (b + 0.5) * s}, s, level});
      }
    }
  }
  return out;
}

}  // namespace sqc
