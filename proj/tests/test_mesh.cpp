#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sigmaqc/mesh.hpp"

using namespace sqc;

TEST_CASE("grid counts and identification") {
  const Grid d = Grid::build(2, 2, Rect::unit(), Topology::dirichlet);
  CHECK(d.node_count() == 9);
  CHECK(d.cell_count() == 4);
  const Grid p = Grid::build(2, 2, Rect::unit(), Topology::periodic);
  CHECK(p.node_count() == 4);
  CHECK(p.node(2, 1) == p.node(0, 1));
  CHECK(p.node(-1, -1) == p.node(1, 1));
}

TEST_CASE("grid rejects degenerate sizes and non-unit periodic domains") {
  CHECK_THROWS_WITH_AS(Grid::build(0, 4, Rect::unit(), Topology::dirichlet), "degenerate grid", GridError);
  CHECK_THROWS_AS(Grid::build(1, 4, Rect::unit(), Topology::dirichlet), GridError);
  CHECK_THROWS_AS(Grid::build(4, 4, Rect{0, 2, 0, 1}, Topology::periodic), GridError);
  CHECK_NOTHROW(Grid::build(4, 4, Rect{0, 2, 0, 1}, Topology::dirichlet));
}

TEST_CASE("gradient reproduces affine fields exactly") {
  for (int trial = 0; trial < 20; ++trial) {
    const double a = oracle::uniform(-3, 3), b = oracle::uniform(-3, 3), c = oracle::uniform(-3, 3);
    const int nx = 2 + static_cast<int>(oracle::uniform(0, 20));
    const int ny = 2 + static_cast<int>(oracle::uniform(0, 20));
    const Rect r{oracle::uniform(-1, 0), oracle::uniform(0.5, 2), oracle::uniform(-1, 0), oracle::uniform(0.5, 2)};
    const Grid g = Grid::build(nx, ny, r, Topology::dirichlet);
    const VectorField grad = gradient(NodalField::sample(g, [&](Vec2 x) { return a * x.x + b * x.y + c; }));
    for (std::size_t k = 0; k < grad.size(); ++k) {
      CHECK(grad[k].x == doctest::Approx(a).epsilon(1e-12));
      CHECK(grad[k].y == doctest::Approx(b).epsilon(1e-12));
    }
  }
}

TEST_CASE("gradient on periodic fields with a period jump") {
  const Grid g = Grid::build(8, 8, Rect::unit(), Topology::periodic);
  const NodalField u = NodalField::sample(g, [](Vec2 x) { return 2.0 * x.x - x.y; }, {2.0, -1.0});
  const VectorField grad = gradient(u);
  for (const Vec2& v : grad.values()) {
    CHECK(v.x == doctest::Approx(2.0));
    CHECK(v.y == doctest::Approx(-1.0));
  }
  const VectorField zero = gradient(NodalField::constant(g, 4.0));
  for (const Vec2& v : zero.values()) CHECK(norm(v) == 0.0);
}

TEST_CASE("gradient of x1^2 matches 2 x1 at cell centers within O(h)") {
  const Grid g = Grid::build(64, 64, Rect::unit(), Topology::dirichlet);
  const VectorField grad = gradient(NodalField::sample(g, [](Vec2 x) { return x.x * x.x; }));
  double err = 0.0;
  for (std::size_t c = 0; c < grad.size(); ++c) {
    err = std::max(err, std::abs(grad[c].x - 2.0 * g.cell_center(c).x) + std::abs(grad[c].y));
  }
  CHECK(err <= 1.0 / 64);
}

TEST_CASE("periodic wrap: the seam stencil equals the interior stencil on translated data") {
  const Grid g = Grid::build(16, 16, Rect::unit(), Topology::periodic);
  const double two_pi = 2.0 * std::acos(-1.0);
  auto f = [&](double shift) {
    return NodalField::sample(g, [&](Vec2 x) { return std::sin(two_pi * (x.x + shift)) * std::cos(two_pi * x.y); });
  };
  const VectorField base = gradient(f(0.0));
  const VectorField moved = gradient(f(3.0 / 16.0));
  // Cell (15, j) of the shifted field sits where cell (2, j) of the base one does.
  for (int j = 0; j < 16; ++j) {
    for (int i = 0; i < 16; ++i) {
      const Vec2 a = moved.at(i, j);
      const Vec2 b = base.at((i + 3) % 16, j);
      CHECK(a.x == doctest::Approx(b.x).epsilon(1e-12));
      CHECK(a.y == doctest::Approx(b.y).epsilon(1e-12));
    }
  }
}

TEST_CASE("integrate_mean") {
  const Grid g = Grid::build(32, 32, Rect::unit(), Topology::dirichlet);
  const Square whole{{0.5, 0.5}, 1.0, 0};
  CHECK(integrate_mean(CellScalar::filled(g, 3.5), Square{{0.25, 0.75}, 0.5, 1}) == doctest::Approx(3.5));
  CHECK(integrate_mean(CellScalar::filled(g, 1.0), whole) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(integrate_mean(NodalField::sample(g, [](Vec2 x) { return x.x; }), whole) == doctest::Approx(0.5));
  // 1 - x^2 - y^2 has mean 1/3; the cell-center bilinear value is second order.
  const double h = 1.0 / 32;
  const double m = integrate_mean(NodalField::sample(g, [](Vec2 x) { return 1 - x.x * x.x - x.y * x.y; }), whole);
  CHECK(std::abs(m - 1.0 / 3.0) <= h * h);
  CHECK_THROWS_AS(integrate_mean(CellScalar::filled(g, 1.0), Square{{1.0, 0.5}, 0.5, 1}), std::invalid_argument);
}

TEST_CASE("integrate_mean of a cell-wise constant field on a non-aligned square") {
  const Grid g = Grid::build(4, 4, Rect::unit(), Topology::dirichlet);
  std::vector<double> v(16, 0.0);
  v[g.cell(1, 1)] = 1.0;
  const CellScalar f(g, v);
  // Square [0.125, 0.375]^2 covers a quarter of cell (1,1), whose area is 1/16.
  CHECK(integrate_mean(f, Square{{0.25, 0.25}, 0.25, 0}) == doctest::Approx(0.25));
}

TEST_CASE("dyadic squares") {
  const Grid g = Grid::build(8, 8, Rect::unit(), Topology::dirichlet);
  CHECK(dyadic_squares(g, Rect::unit(), 0).size() == 1);
  const auto sq = dyadic_squares(g, Rect::unit(), 2);
  CHECK(sq.size() == 21);
  for (const Square& q : sq) {
    CHECK(Rect::unit().contains(q.bounds()));
    CHECK(q.side == doctest::Approx(std::ldexp(1.0, -q.level)));
  }
  CHECK(max_resolved_level(g, Rect::unit()) == 3);
  CHECK_THROWS_WITH(dyadic_squares(g, Rect::unit(), 4), "resolution exceeded");
  CHECK_THROWS(dyadic_squares(g, Rect{0, 1, 0, 0.5}, 1));
}

TEST_CASE("integral of nodal fields is exact for the piecewise-linear interpolant") {
  const Grid g = Grid::build(7, 5, Rect{0, 2, -1, 1}, Topology::dirichlet);
  CHECK(integral(NodalField::sample(g, [](Vec2 x) { return 3 * x.x - x.y + 1; })) == doctest::Approx(4 * (3 + 1)));
}
