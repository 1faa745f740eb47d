#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "sigmaqc/coeff.hpp"
#include "sigmaqc/solve.hpp"

using namespace sqc;

namespace {

Grid unit(int n, Topology t = Topology::dirichlet) { return Grid::build(n, n, Rect::unit(), t); }

SigmaField constant(const Grid& g, Mat2 s) {
  const MatrixField m = MatrixField::filled(g, s);
  const auto [a, b] = tight_constants(m);
  return SigmaField::create(m, a, b);
}

double laminate_a(double x) { return x < 0.5 ? 2.0 : 0.5; }

}  // namespace

TEST_CASE("affine data is reproduced for constant coefficients, symmetric or not") {
  for (const Mat2& s : {Mat2::identity(), Mat2{1, -1, 1, 1}, Mat2{2.0, 0.7, -0.4, 1.3}}) {
    const Grid g = unit(12);
    const NodalField u = solve_dirichlet(constant(g, s), [](Vec2 x) { return 0.3 + 2 * x.x - 1.5 * x.y; });
    for (int j = 0; j <= 12; ++j) {
      for (int i = 0; i <= 12; ++i) {
        const Vec2 p = g.node_position(i, j);
        CHECK(std::abs(u.value(i, j) - (0.3 + 2 * p.x - 1.5 * p.y)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("harmonic polynomial x1^2 - x2^2: L2 error of order 2") {
  auto f = [](Vec2 x) { return x.x * x.x - x.y * x.y; };
  std::vector<double> errors;
  for (int n : {32, 64, 128}) {
    const Grid g = unit(n);
    errors.push_back(oracle::l2_error(solve_dirichlet(constant(g, Mat2::identity()), f), f));
  }
  CHECK(oracle::order(errors[0], errors[1]) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(oracle::order(errors[1], errors[2]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("two-phase laminate Dirichlet problem has flux a du/dx1 = harmonic mean") {
  const double H = oracle::harmonic_mean(laminate_a);
  CHECK(H == doctest::Approx(0.8));
  // One-dimensional solution u(x1) = H \int_0^x1 1/a.
  auto exact = [H](Vec2 x) { return x.x < 0.5 ? H * x.x / 2.0 : H * (0.25 + 2.0 * (x.x - 0.5)); };
  const Grid g = unit(32);
  const SigmaField s = SigmaField::create(
      MatrixField::sample(g, [](Vec2 x) { return Mat2::diag(laminate_a(x.x), 1.0); }), 0.5, 2.0);
  const NodalField u = solve_dirichlet(s, exact);
  const VectorField grad = gradient(u);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    CHECK(laminate_a(g.cell_center(c).x) * grad[c].x == doctest::Approx(H).epsilon(1e-10));
    CHECK(std::abs(grad[c].y) <= 1e-10);
  }
}

TEST_CASE("maximum principle and energy identity for symmetric coefficients") {
  const Grid g = unit(24);
  const SigmaField s = SigmaField::create(
      MatrixField::sample(g, [](Vec2 x) { return Mat2::diag(1 + x.x * x.y, 2 - x.y); }), 1.0, 2.0);
  auto data = [](Vec2 x) { return std::sin(3 * x.x) + x.y * x.y; };
  const NodalField u = solve_dirichlet(s, data);
  double lo = HUGE_VAL, hi = -HUGE_VAL;
  std::vector<double> boundary_only(g.node_count(), 0.0);
  for (int j = 0; j <= 24; ++j) {
    for (int i = 0; i <= 24; ++i) {
      if (!g.is_boundary_node(i, j)) continue;
      lo = std::min(lo, u.value(i, j));
      hi = std::max(hi, u.value(i, j));
      boundary_only[g.node(i, j)] = u.value(i, j);
    }
  }
  for (double v : u.values()) {
    CHECK(v >= lo - 1e-12);
    CHECK(v <= hi + 1e-12);
  }
  // a(u, u) = a(u, G) for the zero-interior extension G of the boundary data.
  const NodalField G(g, boundary_only);
  CHECK(bilinear_form(s, u, u) == doctest::Approx(bilinear_form(s, u, G)).epsilon(1e-12));
}

TEST_CASE("assembled matrices: symmetry and stencil width") {
  const Grid g = unit(10);
  const NodalField zero = NodalField::constant(g, 0.0);
  const LinearSystem sym = assemble_dirichlet(constant(g, Mat2{2.0, 0.3, 0.3, 1.0}), zero);
  const SparseMatrix t = sym.matrix.transpose();
  CHECK((sym.matrix - t).norm() <= 1e-14 * sym.matrix.norm());
  // A constant skew part integrates to zero against gradients; a varying one does not.
  CHECK((assemble_dirichlet(constant(g, Mat2{1, -1, 1, 1}), zero).matrix - sym.matrix).norm() > 0.0);
  const SigmaField skew = SigmaField::create(
      MatrixField::sample(g, [](Vec2 x) { return Mat2{1, -x.x, x.x, 1}; }), 1.0, 2.0);
  const LinearSystem non = assemble_dirichlet(skew, zero);
  const SparseMatrix nt = non.matrix.transpose();
  CHECK((non.matrix - nt).norm() > 1e-3);
  for (Eigen::Index r = 0; r < non.matrix.rows(); ++r) CHECK(non.matrix.row(r).nonZeros() <= 7);
}

TEST_CASE("weak residual") {
  const Grid g = unit(16);
  const SigmaField id = constant(g, Mat2::identity());
  CHECK(weak_residual(id, NodalField::sample(g, [](Vec2 x) { return x.x; })) <= 1e-12);
  CHECK(weak_residual(constant(g, Mat2{1, -1, 1, 1}), NodalField::constant(g, 3.0)) == 0.0);

  // A solution perturbed at one interior node: residual > 0 and linear in the perturbation.
  const NodalField u = solve_dirichlet(id, [](Vec2 x) { return x.x * x.y; });
  auto perturbed = [&](double eps) {
    std::vector<double> v(u.values().begin(), u.values().end());
    v[g.node(8, 8)] += eps;
    return weak_residual(id, NodalField(g, v));
  };
  const double h2 = 1.0 / (16.0 * 16.0);
  const double r1 = perturbed(h2);
  const double r2 = perturbed(2 * h2);
  CHECK(r1 > 1e-6);
  CHECK(r2 / r1 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("flux conservation: nodal residuals sum to zero") {
  const Grid g = unit(12);
  const SigmaField s = SigmaField::create(
      MatrixField::sample(g, [](Vec2 x) { return Mat2{1 + x.x, -0.3 * x.y, 0.3 * x.y, 1.0}; }), 1.0, 2.2);
  const std::vector<double> r = nodal_residuals(s, NodalField::sample(g, [](Vec2 x) { return std::exp(x.x) * x.y; }));
  double sum = 0.0, scale = 0.0;
  for (double v : r) {
    sum += v;
    scale += std::abs(v);
  }
  CHECK(std::abs(sum) <= 1e-13 * scale);
}

TEST_CASE("cell problem: identity and constant non-symmetric coefficients give U = x") {
  for (const Mat2& s : {Mat2::identity(), Mat2{1, -1, 1, 1}}) {
    const Grid g = unit(16, Topology::periodic);
    const MapField U = solve_cell_problem(constant(g, s));
    for (int j = 0; j < 16; ++j) {
      for (int i = 0; i < 16; ++i) {
        const Vec2 p = g.node_position(i, j);
        CHECK(std::abs(U.u1.value(i, j) - p.x) <= 1e-12);
        CHECK(std::abs(U.u2.value(i, j) - p.y) <= 1e-12);
      }
    }
  }
}

TEST_CASE("cell problem for the laminate: du1/dx1 = H/a, u2 = x2, mean-zero correctors") {
  const double H = oracle::harmonic_mean(laminate_a);
  const Grid g = unit(32, Topology::periodic);
  const SigmaField s = SigmaField::create(
      MatrixField::sample(g, [](Vec2 x) { return Mat2::diag(laminate_a(x.x), 1.0 / laminate_a(x.x)); }), 0.5, 2.0);
  SolveInfo info;
  const MapField U = solve_cell_problem(s, {}, &info);
  CHECK(info.direct);
  const VectorField g1 = gradient(U.u1);
  const VectorField g2 = gradient(U.u2);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    CHECK(g1[c].x == doctest::Approx(H / laminate_a(g.cell_center(c).x)).epsilon(1e-10));
    CHECK(std::abs(g1[c].y) <= 1e-10);
    CHECK(std::abs(g2[c].x) <= 1e-10);
    CHECK(g2[c].y == doctest::Approx(1.0).epsilon(1e-10));
  }
  // \int (u^i - x_i) = 0.
  CHECK(std::abs(integral(U.u1) - 0.5) <= 1e-12);
  CHECK(std::abs(integral(U.u2) - 0.5) <= 1e-12);
  CHECK(weak_residual(s, U.u1) <= 1e-9);
}

TEST_CASE("iterative path agrees with the direct one") {
  const Grid g = unit(24, Topology::periodic);
  const SigmaField s = SigmaField::create(
      MatrixField::sample(g, [](Vec2 x) { return Mat2{1.5 + std::sin(6.283185307179586 * x.x), 0.2, -0.2, 1.0}; }),
      0.5, 3.0);
  const MapField direct = solve_cell_problem(s);
  SolverOptions opt;
  opt.direct_limit = 10;
  SolveInfo info;
  const MapField iterative = solve_cell_problem(s, opt, &info);
  CHECK_FALSE(info.direct);
  for (std::size_t k = 0; k < g.node_count(); ++k) CHECK(std::abs(direct.u1[k] - iterative.u1[k]) <= 1e-7);
}

TEST_CASE("solver failure is reported with iterations and residual") {
  const Grid g = unit(16);
  SolverOptions opt;
  opt.direct_limit = 0;
  opt.max_iterations = 1;
  opt.relative_tolerance = 1e-14;
  try {
    solve_dirichlet(constant(g, Mat2::identity()), [](Vec2 x) { return std::sin(9 * x.x) * x.y; }, opt);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(e.iterations() >= 1);
    CHECK(e.residual() > 0.0);
  }
}
