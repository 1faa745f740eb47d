#pragma once

/// \file sigmaqc/dilatation.hpp
/// \brief DU, det DU, the distortions d and d^sigma, the fields
///        w^i = det DU / (sigma grad u^i . grad u^i) and their drift fields.

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "sigmaqc/coeff.hpp"
#include "sigmaqc/mesh.hpp"
#include "sigmaqc/solve.hpp"

namespace sqc {

struct DifferentialField {
  /// Rows grad u1, grad u2 per cell.
  MatrixField DU;
  CellScalar det;
  /// Cells with det DU <= det_threshold or some |grad u^i|^2 <= grad_threshold.
  std::vector<std::size_t> degenerate_cells;
  std::vector<char> degenerate;
  double det_threshold = 0.0;
  double grad_threshold = 0.0;
  /// max |DU|^2 over cells; thresholds are relative * scale.
  double scale = 0.0;
};

inline constexpr double default_relative_threshold = 1e-12;

DifferentialField map_differential(const MapField& U, double relative_threshold = default_relative_threshold);

/// Closed-form per-cell quantities. Degenerate inputs give non-finite values.
double distortion(const Mat2& du);
double sigma_distortion(const Mat2& du, const Mat2& sigma);
/// det DU / (sigma g . g) for the row g of DU.
double w_value(const Mat2& du, Vec2 g, const Mat2& sigma);

/// [(J g . grad c) J g + (J g . grad b) sigma g] / (sigma g . g), zero when
/// |g|^2 <= grad_threshold.
Vec2 drift_vector(Vec2 g, const Mat2& sigma, Vec2 grad_b, Vec2 grad_c, double grad_threshold);

struct DriftPair {
  VectorField B1;
  VectorField B2;
};

DriftPair drift_fields(const MapField& U, const SigmaField& sigma,
                       double relative_threshold = default_relative_threshold);

struct DilatationReport {
  DifferentialField differential;
  /// Zero on degenerate cells.
  CellScalar d;
  CellScalar d_sigma;
  CellScalar w1;
  CellScalar w2;
  VectorField B1;
  VectorField B2;

  Rect subregion;
  double sup_d_sigma = 0.0;
  double inf_d_sigma = 0.0;
  /// sup/inf of d^sigma over non-degenerate cells centered in the subregion;
  /// infinite when the subregion holds no usable cell.
  double harnack_H = 1.0;
  double identity_residual = 0.0;
  /// max over non-degenerate cells of alpha d - d^sigma and d^sigma - beta d.
  double comparability_excess = 0.0;
  std::size_t degenerate_count = 0;
  bool degenerate_dominated = false;
};

/// subregion defaults to the centered half-side square of the grid domain.
DilatationReport dilatation_fields(const MapField& U, const SigmaField& sigma,
                                   std::optional<Rect> subregion = std::nullopt,
                                   double relative_threshold = default_relative_threshold);

/// weak_residual(sigma, w, B) with w carried from cells to nodes by node_reconstruction.
double drift_equation_residual(const SigmaField& sigma, const CellScalar& w, const VectorField& B);

/// Key = value summary (sup_d_sigma, inf_d_sigma, harnack_H, identity_residual, ...).
void write_summary(std::ostream& out, const DilatationReport& report);

}  // namespace sqc
