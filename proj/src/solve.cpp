#include "sigmaqc/solve.hpp"

#include <array>
#include <cmath>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "sigmaqc/textio.hpp"
#include "triangulation.hpp"

namespace sqc {

LinearSystem assemble_dirichlet(const SigmaField& sigma, const NodalField& boundary) {
  const Grid& g = sigma.grid();
  if (g.periodic()) throw std::invalid_argument("assemble_dirichlet needs a dirichlet grid");
  if (!(boundary.grid() == g)) throw std::invalid_argument("boundary data on a different grid");

  LinearSystem sys;
  sys.node_unknown.assign(g.node_count(), -1);
  for (int j = 0; j < g.node_rows(); ++j) {
    for (int i = 0; i < g.node_cols(); ++i) {
      if (g.is_boundary_node(i, j)) continue;
      sys.node_unknown[g.node(i, j)] = static_cast<std::ptrdiff_t>(sys.unknown_node.size());
      sys.unknown_node.push_back(g.node(i, j));
    }
  }
  const auto n = static_cast<Eigen::Index>(sys.unknown_node.size());
  sys.rhs = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * 7);

  detail::for_each_triangle(g, [&](std::size_t cell, const detail::Triangle& t) {
    const Mat2& s = sigma[cell];
    for (int a = 0; a < 3; ++a) {
      const std::ptrdiff_t row = sys.node_unknown[g.node(t.i[a], t.j[a])];
      if (row < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const double k = t.area * dot(s * t.grad[b], t.grad[a]);
        const std::size_t col_node = g.node(t.i[b], t.j[b]);
        const std::ptrdiff_t col = sys.node_unknown[col_node];
        if (col < 0) {
          sys.rhs[row] -= k * boundary[col_node];
        } else {
          triplets.emplace_back(row, col, k);
        }
      }
    }
  });
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  return sys;
}

LinearSystem assemble_periodic(const SigmaField& sigma, Vec2 xi) {
  const Grid& g = sigma.grid();
  if (!g.periodic()) throw std::invalid_argument("assemble_periodic needs a periodic grid");

  LinearSystem sys;
  const auto n = static_cast<Eigen::Index>(g.node_count());
  sys.node_unknown.resize(g.node_count());
  sys.unknown_node.resize(g.node_count());
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    sys.node_unknown[k] = static_cast<std::ptrdiff_t>(k);
    sys.unknown_node[k] = k;
  }
  sys.rhs = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(g.node_count() * 14);

  detail::for_each_triangle(g, [&](std::size_t cell, const detail::Triangle& t) {
    const Mat2& s = sigma[cell];
    const Vec2 flux = s * xi;
    for (int a = 0; a < 3; ++a) {
      const auto row = static_cast<Eigen::Index>(g.node(t.i[a], t.j[a]));
      sys.rhs[row] -= t.area * dot(flux, t.grad[a]);
      for (int b = 0; b < 3; ++b) {
        triplets.emplace_back(row, static_cast<Eigen::Index>(g.node(t.i[b], t.j[b])),
                              t.area * dot(s * t.grad[b], t.grad[a]));
      }
    }
  });
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  return sys;
}

namespace {

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double bn = b.norm();
  const double rn = (a * x - b).norm();
  return bn > 0.0 ? rn / bn : rn;
}

void check_residual(double residual, int iterations, const SolverOptions& options) {
  // Direct solves: the residual only reflects conditioning, accept up to 1e-8.
  if (!(residual <= std::max(options.relative_tolerance, 1e-8))) {
    throw SolverError("linear solve did not converge: " + std::to_string(iterations) +
                          " iterations, relative residual " + format_number(residual),
                      iterations, residual);
  }
}

Eigen::VectorXd bicgstab(const SparseMatrix& a, const Eigen::VectorXd& b, const SolverOptions& options,
                         SolveInfo* info) {
  Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>> solver;
  solver.setTolerance(options.relative_tolerance);
  solver.setMaxIterations(options.max_iterations);
  solver.compute(a);
  Eigen::VectorXd x = solver.solve(b);
  const int iterations = static_cast<int>(solver.iterations());
  const double residual = relative_residual(a, x, b);
  if (info != nullptr) *info = {false, std::max(info->iterations, iterations), residual};
  if (solver.info() != Eigen::Success || !(residual <= 10.0 * options.relative_tolerance)) {
    throw SolverError("BiCGSTAB did not converge: " + std::to_string(iterations) +
                          " iterations, relative residual " + format_number(residual),
                      iterations, residual);
  }
  return x;
}

}  // namespace

Eigen::VectorXd solve_sparse(const SparseMatrix& a, const Eigen::VectorXd& b, const SolverOptions& options,
                             SolveInfo* info) {
  if (b.size() == 0) return b;
  if (b.norm() == 0.0) {
    if (info != nullptr) *info = {true, 0, 0.0};
    return Eigen::VectorXd::Zero(b.size());
  }
  if (static_cast<std::size_t>(a.rows()) > options.direct_limit) return bicgstab(a, b, options, info);

  Eigen::SparseMatrix<double> colmajor = a;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(colmajor);
  if (lu.info() != Eigen::Success) throw SolverError("sparse LU failed: singular system", 0, HUGE_VAL);
  Eigen::VectorXd x = lu.solve(b);
  const double residual = relative_residual(a, x, b);
  if (info != nullptr) *info = {true, 1, residual};
  check_residual(residual, 1, options);
  return x;
}

std::vector<Eigen::VectorXd> solve_mean_zero(const SparseMatrix& a, const std::vector<Eigen::VectorXd>& rhs,
                                             const SolverOptions& options, SolveInfo* info) {
  const Eigen::Index n = a.rows();

  // Pinning node 0 removes the constant kernel without the dense border row
  // a Lagrange multiplier would add; the mean is projected out afterwards.
  // Krylov methods on the singular matrix itself break down for
  // non-symmetric coefficients, so both paths use the pinned one.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(a.nonZeros() + 1));
  for (Eigen::Index r = 1; r < a.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      if (it.col() != 0) triplets.emplace_back(it.row(), it.col(), it.value());
    }
  }
  triplets.emplace_back(0, 0, 1.0);

  // Residuals are relative to the largest right-hand side: a companion rhs
  // that vanishes up to roundoff must not be judged against its own norm.
  double scale = 0.0;
  for (const Eigen::VectorXd& b : rhs) scale = std::max(scale, b.norm());
  const bool direct = static_cast<std::size_t>(n) <= options.direct_limit;

  std::vector<Eigen::VectorXd> out;
  out.reserve(rhs.size());
  double worst = 0.0;
  int iterations = direct ? 1 : 0;
  auto finish = [&](Eigen::VectorXd x, const Eigen::VectorXd& b) {
    x.array() -= x.mean();
    if (scale > 0.0) worst = std::max(worst, (a * x - b).norm() / scale);
    out.push_back(std::move(x));
  };

  if (direct) {
    Eigen::SparseMatrix<double> pinned(n, n);
    pinned.setFromTriplets(triplets.begin(), triplets.end());
    pinned.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(pinned);
    if (lu.info() != Eigen::Success) throw SolverError("sparse LU failed: singular system", 0, HUGE_VAL);
    for (const Eigen::VectorXd& b : rhs) {
      Eigen::VectorXd full = b;
      full[0] = 0.0;
      finish(lu.solve(full), b);
    }
  } else {
    SparseMatrix pinned(n, n);
    pinned.setFromTriplets(triplets.begin(), triplets.end());
    pinned.makeCompressed();
    for (const Eigen::VectorXd& b : rhs) {
      if (b.norm() <= 1e-14 * scale) {
        finish(Eigen::VectorXd::Zero(n), b);
        continue;
      }
      Eigen::VectorXd full = b;
      full[0] = 0.0;
      SolveInfo step;
      finish(bicgstab(pinned, full, options, &step), b);
      iterations = std::max(iterations, step.iterations);
    }
  }
  if (info != nullptr) *info = {direct, iterations, worst};
  if (direct) {
    check_residual(worst, 1, options);
  } else if (!(worst <= 10.0 * options.relative_tolerance)) {
    throw SolverError("BiCGSTAB did not converge: relative residual " + format_number(worst), iterations, worst);
  }
  return out;
}

NodalField solve_dirichlet(const SigmaField& sigma, const std::function<double(Vec2)>& g,
                           const SolverOptions& options, SolveInfo* info) {
  const Grid& grid = sigma.grid();
  const NodalField boundary = NodalField::sample(grid, g);
  const LinearSystem sys = assemble_dirichlet(sigma, boundary);
  const Eigen::VectorXd x = solve_sparse(sys.matrix, sys.rhs, options, info);
  std::vector<double> values(boundary.values().begin(), boundary.values().end());
  for (std::size_t k = 0; k < sys.unknown_node.size(); ++k) values[sys.unknown_node[k]] = x[static_cast<Eigen::Index>(k)];
  return NodalField(grid, std::move(values));
}

MapField solve_cell_problem(const SigmaField& sigma, const SolverOptions& options, SolveInfo* info) {
  const Grid& g = sigma.grid();
  if (!g.periodic()) throw std::invalid_argument("cell problem needs a periodic grid");
  LinearSystem first = assemble_periodic(sigma, {1.0, 0.0});
  const LinearSystem second = assemble_periodic(sigma, {0.0, 1.0});
  const std::vector<Eigen::VectorXd> chi = solve_mean_zero(first.matrix, {first.rhs, second.rhs}, options, info);

  std::vector<double> u1(g.node_count());
  std::vector<double> u2(g.node_count());
  for (int j = 0; j < g.node_rows(); ++j) {
    for (int i = 0; i < g.node_cols(); ++i) {
      const std::size_t k = g.node(i, j);
      const Vec2 p = g.node_position(i, j);
      u1[k] = p.x + chi[0][static_cast<Eigen::Index>(k)];
      u2[k] = p.y + chi[1][static_cast<Eigen::Index>(k)];
    }
  }
  return {NodalField(g, std::move(u1), {1.0, 0.0}), NodalField(g, std::move(u2), {0.0, 1.0}), true};
}

namespace {

struct NodeAccumulators {
  std::vector<double> residual;
  std::vector<double> grad_phi_sq;
  std::vector<double> grad_w_sq;
  std::vector<double> w_sq;
};

NodeAccumulators accumulate(const SigmaField& sigma, const NodalField& w, const VectorField* drift) {
  const Grid& g = sigma.grid();
  if (!(w.grid() == g)) throw std::invalid_argument("field and coefficients on different grids");
  if (drift != nullptr && !(drift->grid() == g)) throw std::invalid_argument("drift on a different grid");
  NodeAccumulators acc{std::vector<double>(g.node_count(), 0.0), std::vector<double>(g.node_count(), 0.0),
                       std::vector<double>(g.node_count(), 0.0), std::vector<double>(g.node_count(), 0.0)};
  detail::for_each_triangle(g, [&](std::size_t cell, const detail::Triangle& t) {
    std::array<double, 3> wv{};
    Vec2 grad_w{};
    for (int a = 0; a < 3; ++a) {
      wv[a] = w.value(t.i[a], t.j[a]);
      grad_w = grad_w + wv[a] * t.grad[a];
    }
    const double w_mean = (wv[0] + wv[1] + wv[2]) / 3.0;
    const double w_sq_int =
        t.area / 12.0 * (wv[0] * wv[0] + wv[1] * wv[1] + wv[2] * wv[2] + 9.0 * w_mean * w_mean);
    Vec2 flux = sigma[cell] * grad_w;
    if (drift != nullptr) flux = flux + w_mean * (*drift)[cell];
    for (int a = 0; a < 3; ++a) {
      const std::size_t k = g.node(t.i[a], t.j[a]);
      acc.residual[k] += t.area * dot(flux, t.grad[a]);
      acc.grad_phi_sq[k] += t.area * dot(t.grad[a], t.grad[a]);
      acc.grad_w_sq[k] += t.area * dot(grad_w, grad_w);
      acc.w_sq[k] += w_sq_int;
    }
  });
  return acc;
}

double normalized_max(const SigmaField& sigma, const NodalField& w, const VectorField* drift) {
  const Grid& g = sigma.grid();
  const NodeAccumulators acc = accumulate(sigma, w, drift);
  double worst = 0.0;
  for (int j = 0; j < g.node_rows(); ++j) {
    for (int i = 0; i < g.node_cols(); ++i) {
      if (g.is_boundary_node(i, j)) continue;
      const std::size_t k = g.node(i, j);
      const double denom = std::sqrt(acc.grad_phi_sq[k]) * (std::sqrt(acc.grad_w_sq[k]) + std::sqrt(acc.w_sq[k]));
      if (denom > 0.0) worst = std::max(worst, std::abs(acc.residual[k]) / denom);
    }
  }
  return worst;
}

}  // namespace

std::vector<double> nodal_residuals(const SigmaField& sigma, const NodalField& w, const VectorField* drift) {
  return accumulate(sigma, w, drift).residual;
}

double weak_residual(const SigmaField& sigma, const NodalField& w) { return normalized_max(sigma, w, nullptr); }

double weak_residual(const SigmaField& sigma, const NodalField& w, const VectorField& drift) {
  return normalized_max(sigma, w, &drift);
}

double bilinear_form(const SigmaField& sigma, const NodalField& u, const NodalField& v) {
  const Grid& g = sigma.grid();
  double total = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const ElementGradients gu = element_gradients(u, i, j);
      const ElementGradients gv = element_gradients(v, i, j);
      const Mat2& s = sigma[g.cell(i, j)];
      total += 0.5 * g.cell_area() * (dot(s * gu.lower, gv.lower) + dot(s * gu.upper, gv.upper));
    }
  }
  return total;
}

}  // namespace sqc
