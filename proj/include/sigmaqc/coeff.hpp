#pragma once

/// \file sigmaqc/coeff.hpp
/// \brief Coefficient matrices in the ellipticity class M(alpha, beta) and
///        the derived scalars b = s12 - s21, c = det sigma and their
///        Lipschitz bound E.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigmaqc/mesh.hpp"

namespace sqc {

struct CellViolation {
  std::size_t cell;
  /// true: sigma xi.xi >= alpha |xi|^2 failed; false: the inverse condition failed.
  bool lower;
  double eigenvalue;
  double bound;
};

struct EllipticityReport {
  double alpha = 0.0;
  double beta = 0.0;
  bool lower_ok = true;
  bool upper_ok = true;
  bool determinant_ok = true;
  /// Smallest eigenvalue of (sigma + sigma^T)/2 over cells, and where.
  double min_symmetric_eigenvalue = 0.0;
  std::size_t worst_lower_cell = 0;
  /// Smallest eigenvalue of (sigma^-1 + sigma^-T)/2 over cells, and where.
  double min_inverse_symmetric_eigenvalue = 0.0;
  std::size_t worst_upper_cell = 0;
  /// max(1/alpha, beta)
  double K = 1.0;
  std::vector<CellViolation> violations;

  bool passed() const { return lower_ok && upper_ok && determinant_ok; }
  std::string describe() const;
};

EllipticityReport validate_sigma(const MatrixField& sigma, double alpha, double beta);

class EllipticityError : public std::invalid_argument {
 public:
  explicit EllipticityError(EllipticityReport report)
      : std::invalid_argument(report.describe()), report_(std::move(report)) {}
  const EllipticityReport& report() const { return report_; }

 private:
  EllipticityReport report_;
};

/// Exact per-cell gradients of b and c with the exact Lipschitz bound, for
/// analytically specified coefficients.
struct ExactScalarGradients {
  VectorField grad_b;
  VectorField grad_c;
  double E;
};

/// A validated coefficient field with its derived scalars. Immutable.
class SigmaField {
 public:
  /// Throws EllipticityError unless both inequalities hold in every cell.
  static SigmaField create(MatrixField sigma, double alpha, double beta);
  /// Tightest constants of the field, then alpha = 1/K, beta = K.
  static SigmaField create_normalized(MatrixField sigma);

  SigmaField with_exact_gradients(ExactScalarGradients exact) const;

  const MatrixField& matrix() const { return sigma_; }
  const Mat2& operator[](std::size_t c) const { return sigma_[c]; }
  const Grid& grid() const { return sigma_.grid(); }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double K() const { return std::max(1.0 / alpha_, beta_); }
  bool unit_convention() const { return std::abs(1.0 / alpha_ - beta_) <= 1e-14 * beta_; }

  const CellScalar& b() const { return b_; }
  const CellScalar& c() const { return c_; }
  const VectorField& grad_b() const { return grad_b_; }
  const VectorField& grad_c() const { return grad_c_; }
  double E() const { return E_; }
  /// true when E comes from difference quotients rather than exact gradients.
  bool E_is_discrete() const { return E_discrete_; }

 private:
  SigmaField(MatrixField sigma, double alpha, double beta);

  MatrixField sigma_;
  double alpha_;
  double beta_;
  CellScalar b_;
  CellScalar c_;
  VectorField grad_b_;
  VectorField grad_c_;
  double E_ = 0.0;
  bool E_discrete_ = true;
};

struct DerivedScalars {
  CellScalar b;
  CellScalar c;
  double E;
};

DerivedScalars derived_scalars(const SigmaField& sigma);

/// Per-cell gradient of a cell field: central differences, one-sided at
/// Dirichlet boundaries, wrapped on periodic grids.
VectorField cell_difference_gradient(const CellScalar& f);

/// Tightest (alpha, beta) for which the field lies in M(alpha, beta).
std::pair<double, double> tight_constants(const MatrixField& sigma);

/// Smallest K with K + 1/K >= sup_xi (|xi|^2 + |s xi|^2) / (s xi . xi): the
/// distortion constant for which |mu| + |nu| <= (K-1)/(K+1) is sharp.
double distortion_constant(const Mat2& s);

}  // namespace sqc
