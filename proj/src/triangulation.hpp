#pragma once

// Structured triangulation: cell (i, j) splits into lower (00, 10, 11) and
// upper (00, 11, 01) triangles.

#include <array>
#include <cstddef>

#include "sigmaqc/mesh.hpp"

namespace sqc::detail {

struct Triangle {
  std::array<int, 3> i;
  std::array<int, 3> j;
  /// Gradients of the three hat functions restricted to the triangle.
  std::array<Vec2, 3> grad;
  double area;
};

template <class F>
void for_each_triangle(const Grid& g, F&& f) {
  const double ihx = 1.0 / g.hx();
  const double ihy = 1.0 / g.hy();
  const double area = 0.5 * g.cell_area();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const std::size_t cell = g.cell(i, j);
      f(cell, Triangle{{i, i + 1, i + 1}, {j, j, j + 1}, {Vec2{-ihx, 0.0}, Vec2{ihx, -ihy}, Vec2{0.0, ihy}}, area});
      f(cell, Triangle{{i, i + 1, i}, {j, j + 1, j + 1}, {Vec2{0.0, -ihy}, Vec2{ihx, 0.0}, Vec2{-ihx, ihy}}, area});
    }
  }
}

}  // namespace sqc::detail
