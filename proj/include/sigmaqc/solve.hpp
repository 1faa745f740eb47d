#pragma once

/// \file sigmaqc/solve.hpp
/// \brief Assembly and solution of div(sigma grad u) = 0 on Dirichlet and
///        periodic grids, and weak residuals of div(sigma grad w + w B) = 0.
///
/// The bilinear form is a(u, phi) = \int sigma grad u . grad phi over the
/// piecewise-linear space of mesh.hpp, with sigma constant per cell. It is
/// not symmetrized: non-symmetric sigma yields a non-symmetric matrix.

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Sparse>

#include "sigmaqc/coeff.hpp"
#include "sigmaqc/mesh.hpp"

namespace sqc {

struct SolverOptions {
  double relative_tolerance = 1e-10;
  int max_iterations = 20000;
  /// Systems with at most this many unknowns use sparse LU, larger ones BiCGSTAB.
  std::size_t direct_limit = 256 * 256;
};

struct SolveInfo {
  bool direct = true;
  int iterations = 0;
  double relative_residual = 0.0;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct LinearSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  /// Grid node of every unknown.
  std::vector<std::size_t> unknown_node;
  /// Unknown of every grid node, -1 for eliminated Dirichlet nodes.
  std::vector<std::ptrdiff_t> node_unknown;
};

/// Interior unknowns; boundary values of `boundary` are folded into the rhs.
LinearSystem assemble_dirichlet(const SigmaField& sigma, const NodalField& boundary);

/// Periodic corrector system for U = xi . x + chi: A chi = -a(xi . x, phi).
/// The matrix is singular (constants); solve_periodic adds the mean constraint.
LinearSystem assemble_periodic(const SigmaField& sigma, Vec2 macroscopic_gradient);

/// Solves A x = b, sparse LU up to options.direct_limit unknowns, otherwise
/// BiCGSTAB with a diagonal preconditioner. Throws SolverError.
Eigen::VectorXd solve_sparse(const SparseMatrix& a, const Eigen::VectorXd& b,
                             const SolverOptions& options, SolveInfo* info = nullptr);

/// Solves A x = b_k for a singular A whose kernel is the constants and a
/// consistent b_k, returning the solution with sum(x) = 0. One factorization
/// serves every right-hand side.
std::vector<Eigen::VectorXd> solve_mean_zero(const SparseMatrix& a,
                                             const std::vector<Eigen::VectorXd>& rhs,
                                             const SolverOptions& options,
                                             SolveInfo* info = nullptr);

NodalField solve_dirichlet(const SigmaField& sigma, const std::function<double(Vec2)>& g,
                           const SolverOptions& options = {}, SolveInfo* info = nullptr);

/// A pair of scalar fields (u1, u2) on one grid.
struct MapField {
  NodalField u1;
  NodalField u2;
  bool sense_preserving = true;

  const Grid& grid() const { return u1.grid(); }
};

/// U with U - x periodic and mean-zero correctors.
MapField solve_cell_problem(const SigmaField& sigma, const SolverOptions& options = {},
                            SolveInfo* info = nullptr);

/// a(w, phi_k) + \int w B . grad phi_k for every grid node k.
std::vector<double> nodal_residuals(const SigmaField& sigma, const NodalField& w,
                                    const VectorField* drift = nullptr);

/// Max over interior test functions phi of |\int (sigma grad w + w B) . grad phi|
/// normalized by ||grad phi|| (||grad w|| + ||w||), L2 norms on supp phi.
double weak_residual(const SigmaField& sigma, const NodalField& w);
double weak_residual(const SigmaField& sigma, const NodalField& w, const VectorField& drift);

/// \int sigma grad u . grad v over the triangulation (exact for cell-constant sigma).
double bilinear_form(const SigmaField& sigma, const NodalField& u, const NodalField& v);

}  // namespace sqc
