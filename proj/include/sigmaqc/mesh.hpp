#pragma once

/// \file sigmaqc/mesh.hpp
/// \brief Structured 2D grids, nodal and cell fields, gradients, cell-wise
///        quadrature and dyadic square families.
///
/// Nodal fields are continuous piecewise-linear on the triangulation that
/// splits every cell (i, j) along its (i, j)-(i+1, j+1) diagonal. The two
/// triangle gradients of a cell average to the bilinear reconstruction
/// differentiated at the cell center; that average is the per-cell gradient
/// exposed by gradient().

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace sqc {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// J v, the counter-clockwise quarter turn.
inline Vec2 rotate(Vec2 v) { return {-v.y, v.x}; }

struct Mat2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }
  static Mat2 from_rows(Vec2 r1, Vec2 r2) { return {r1.x, r1.y, r2.x, r2.y}; }
  /// The quarter-turn matrix J = [[0, -1], [1, 0]].
  static Mat2 rotation() { return {0.0, -1.0, 1.0, 0.0}; }

  double det() const { return a11 * a22 - a12 * a21; }
  double trace() const { return a11 + a22; }
  Mat2 transpose() const { return {a11, a21, a12, a22}; }
  Mat2 inverse() const {
    const double d = det();
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }
  Mat2 symmetric_part() const {
    const double off = 0.5 * (a12 + a21);
    return {a11, off, off, a22};
  }
  Vec2 row1() const { return {a11, a12}; }
  Vec2 row2() const { return {a21, a22}; }
  double frobenius_sq() const { return a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22; }
};

inline Vec2 operator*(const Mat2& m, Vec2 v) {
  return {m.a11 * v.x + m.a12 * v.y, m.a21 * v.x + m.a22 * v.y};
}
inline Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
          a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}
inline Mat2 operator+(const Mat2& a, const Mat2& b) {
  return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
}
inline Mat2 operator*(double s, const Mat2& a) {
  return {s * a.a11, s * a.a12, s * a.a21, s * a.a22};
}

/// Smallest eigenvalue of a symmetric 2x2 matrix.
double symmetric_min_eigenvalue(const Mat2& m);
/// Largest eigenvalue of a symmetric 2x2 matrix.
double symmetric_max_eigenvalue(const Mat2& m);

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;

  static Rect unit() { return {0.0, 1.0, 0.0, 1.0}; }
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  Vec2 center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(Vec2 p, double tol = 0.0) const {
    return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
  }
  bool contains(const Rect& r, double tol = 1e-12) const {
    return r.x0 >= x0 - tol && r.x1 <= x1 + tol && r.y0 >= y0 - tol && r.y1 <= y1 + tol;
  }
  /// Square of half the side lengths sharing this rectangle's center.
  Rect centered_half() const {
    const Vec2 c = center();
    return {c.x - 0.25 * width(), c.x + 0.25 * width(), c.y - 0.25 * height(),
            c.y + 0.25 * height()};
  }
  bool operator==(const Rect&) const = default;
};

enum class Topology { dirichlet, periodic };

std::string to_string(Topology t);

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Grid {
 public:
  /// Throws GridError("degenerate grid") for nx or ny below 2 and for
  /// periodic topology on anything other than the unit cell.
  static Grid build(int nx, int ny, Rect domain, Topology topology);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double hx() const { return domain_.width() / nx_; }
  double hy() const { return domain_.height() / ny_; }
  double cell_area() const { return hx() * hy(); }
  const Rect& domain() const { return domain_; }
  Topology topology() const { return topology_; }
  bool periodic() const { return topology_ == Topology::periodic; }

  /// Distinct node columns and rows (periodic grids drop the identified edge).
  int node_cols() const { return periodic() ? nx_ : nx_ + 1; }
  int node_rows() const { return periodic() ? ny_ : ny_ + 1; }
  std::size_t node_count() const {
    return static_cast<std::size_t>(node_cols()) * static_cast<std::size_t>(node_rows());
  }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
  }

  /// Storage index of logical node (i, j); periodic grids wrap any integer pair.
  std::size_t node(int i, int j) const;
  std::size_t cell(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
  }
  std::pair<int, int> cell_ij(std::size_t c) const {
    return {static_cast<int>(c % static_cast<std::size_t>(nx_)),
            static_cast<int>(c / static_cast<std::size_t>(nx_))};
  }
  std::pair<int, int> node_ij(std::size_t n) const {
    const auto cols = static_cast<std::size_t>(node_cols());
    return {static_cast<int>(n % cols), static_cast<int>(n / cols)};
  }

  Vec2 node_position(int i, int j) const {
    return {domain_.x0 + i * hx(), domain_.y0 + j * hy()};
  }
  Vec2 cell_center(int i, int j) const {
    return {domain_.x0 + (i + 0.5) * hx(), domain_.y0 + (j + 0.5) * hy()};
  }
  Vec2 cell_center(std::size_t c) const {
    const auto [i, j] = cell_ij(c);
    return cell_center(i, j);
  }
  Rect cell_rect(int i, int j) const {
    const Vec2 p = node_position(i, j);
    return {p.x, p.x + hx(), p.y, p.y + hy()};
  }

  bool is_boundary_node(int i, int j) const {
    return !periodic() && (i == 0 || j == 0 || i == nx_ || j == ny_);
  }

  bool operator==(const Grid&) const = default;

 private:
  Grid(int nx, int ny, Rect domain, Topology topology)
      : nx_(nx), ny_(ny), domain_(domain), topology_(topology) {}

  int nx_;
  int ny_;
  Rect domain_;
  Topology topology_;
};

namespace detail {
inline bool finite(double v) { return std::isfinite(v); }
inline bool finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }
inline bool finite(const Mat2& m) {
  return std::isfinite(m.a11) && std::isfinite(m.a12) && std::isfinite(m.a21) &&
         std::isfinite(m.a22);
}
inline bool finite(std::complex<double> z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }
}  // namespace detail

/// One scalar per grid node. On periodic grids the field may carry a
/// constant jump per period: value(i + nx, j) = value(i, j) + jump.x, and
/// likewise in y. This represents U = x + periodic corrector exactly.
class NodalField {
 public:
  NodalField(Grid grid, std::vector<double> values, Vec2 jump = {});

  static NodalField sample(const Grid& grid, const std::function<double(Vec2)>& f,
                           Vec2 jump = {});
  static NodalField constant(const Grid& grid, double value);

  const Grid& grid() const { return grid_; }
  Vec2 jump() const { return jump_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t node) const { return values_[node]; }
  /// Value at logical node (i, j), including the periodic jump.
  double value(int i, int j) const;

  NodalField shifted(double offset) const;

 private:
  Grid grid_;
  std::vector<double> values_;
  Vec2 jump_;
};

template <class T>
class CellField {
 public:
  CellField(Grid grid, std::vector<T> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.cell_count()) {
      throw std::invalid_argument("cell field size does not match grid");
    }
    for (const T& v : values_) {
      if (!detail::finite(v)) throw std::invalid_argument("cell field has non-finite entry");
    }
  }

  template <class F>
  static CellField sample(const Grid& grid, F&& f) {
    std::vector<T> values(grid.cell_count());
    for (std::size_t c = 0; c < values.size(); ++c) values[c] = f(grid.cell_center(c));
    return CellField(grid, std::move(values));
  }

  static CellField filled(const Grid& grid, const T& value) {
    return CellField(grid, std::vector<T>(grid.cell_count(), value));
  }

  const Grid& grid() const { return grid_; }
  std::span<const T> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  const T& operator[](std::size_t c) const { return values_[c]; }
  const T& at(int i, int j) const { return values_[grid_.cell(i, j)]; }

 private:
  Grid grid_;
  std::vector<T> values_;
};

using CellScalar = CellField<double>;
using VectorField = CellField<Vec2>;
using MatrixField = CellField<Mat2>;
using ComplexField = CellField<std::complex<double>>;

/// Gradients on the two triangles of cell (i, j): lower = (00, 10, 11),
/// upper = (00, 11, 01).
struct ElementGradients {
  Vec2 lower;
  Vec2 upper;
  Vec2 mean() const { return 0.5 * (lower + upper); }
};

ElementGradients element_gradients(const NodalField& u, int i, int j);

/// Per-cell gradient: bilinear reconstruction differentiated at the cell center.
VectorField gradient(const NodalField& u);

/// Bilinear value at every cell center (average of the four corners).
CellScalar cell_values(const NodalField& u);

/// Node values as the average of the adjacent cells. Periodic output has zero jump.
NodalField node_average(const CellScalar& f);

/// node_average with linear extrapolation at Dirichlet boundary nodes, where
/// the one-sided average is only first-order accurate.
NodalField node_reconstruction(const CellScalar& f);

/// Integral over the grid domain, exact for the piecewise-linear interpolant.
double integral(const NodalField& u);
/// Midpoint-rule integral over the grid domain.
double integral(const CellScalar& f);

struct Square {
  Vec2 center;
  double side = 0.0;
  int level = 0;

  Rect bounds() const {
    const double h = 0.5 * side;
    return {center.x - h, center.x + h, center.y - h, center.y + h};
  }
};

/// Cells intersecting a rectangle with the fraction of each cell's area inside it.
struct CellWeight {
  std::size_t cell;
  double fraction;
};
std::vector<CellWeight> overlap(const Grid& grid, const Rect& r);

/// (1/|Q|) \int_Q f with cell-wise quadrature; exact for cell-wise constant f.
/// Throws std::invalid_argument if q leaves the grid domain.
double integrate_mean(const CellScalar& f, const Square& q);
double integrate_mean(const NodalField& f, const Square& q);

/// Mean of g(f) over q with the same cell-wise quadrature.
double integrate_mean(const CellScalar& f, const Square& q, const std::function<double(double)>& g);

/// Dyadic subdivisions of a square region up to max_level (1 + 4 + ... squares).
/// Throws if the region is not a square inside the grid or a square would
/// be smaller than one grid cell ("resolution exceeded").
std::vector<Square> dyadic_squares(const Grid& grid, const Rect& region, int max_level);

/// Deepest dyadic level whose squares are still at least one cell wide.
int max_resolved_level(const Grid& grid, const Rect& region);

}  // namespace sqc
