#pragma once

/// \file sigmaqc/cases.hpp
/// \brief Built-in scenarios: coefficient fields, boundary data, analytic
///        maps and closed-form oracle values.

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigmaqc/coeff.hpp"
#include "sigmaqc/mesh.hpp"
#include "sigmaqc/solve.hpp"

namespace sqc {

class CaseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Analytic map data. Any member may be empty.
struct ExactSolution {
  std::function<Vec2(Vec2)> U;
  std::function<Mat2(Vec2)> DU;
  std::function<double(Vec2)> det;
  std::function<double(Vec2)> d_sigma;
};

struct CaseBundle {
  std::string name;
  std::map<std::string, double> params;
  Topology topology = Topology::periodic;
  Rect domain = Rect::unit();
  std::function<Mat2(Vec2)> sigma;
  /// Ellipticity constants of the analytic field.
  double alpha = 1.0;
  double beta = 1.0;
  /// Exact gradients of b = s12 - s21 and c = det sigma, when known.
  std::function<Vec2(Vec2)> grad_b;
  std::function<Vec2(Vec2)> grad_c;
  std::optional<double> exact_E;
  /// Dirichlet data for U; empty on periodic cases.
  std::function<Vec2(Vec2)> boundary;
  /// U is sampled from exact->U instead of solved for.
  bool analytic_map = false;
  std::optional<ExactSolution> exact;
  /// Closed-form expected values: d_sigma, w1, w2, H, energy, area, ...
  std::map<std::string, double> oracle;
  /// Grid sizes must be multiples of this (coefficient jumps on cell edges).
  int grid_multiple = 1;

  Grid grid(int n) const;
  /// Per-cell sigma at cell centers with exact gradients injected when known.
  SigmaField sigma_on(const Grid& grid) const;
  /// Solves or samples U on the grid.
  MapField map_on(const SigmaField& sigma, const SolverOptions& options = {}, SolveInfo* info = nullptr) const;
  /// Oracle tolerance for grid size n: tight for exactly resolved cases, O(h^2) otherwise.
  double tolerance(int n) const;
};

const std::vector<std::string>& case_names();

/// Throws CaseError for unknown names or parameters, EllipticityError when
/// the parameters leave the ellipticity class.
CaseBundle make_case(const std::string& name, const std::map<std::string, double>& params = {});

}  // namespace sqc
