#pragma once

/// \file sigmaqc/analysis.hpp
/// \brief Mean oscillation, Muckenhoupt constants, Harnack ratios, the
///        reverse-Holder style sup bound for d^sigma, and the global bound
///        chain for periodic cell solutions.

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sigmaqc/coeff.hpp"
#include "sigmaqc/dilatation.hpp"
#include "sigmaqc/mesh.hpp"
#include "sigmaqc/solve.hpp"

namespace sqc {

/// Max over dyadic squares of region of (1/|Q|) \int_Q |phi - phi_Q|.
double bmo_norm(const CellScalar& phi, const Rect& region, int max_level);
double bmo_norm(const NodalField& phi, const Rect& region, int max_level);

struct ApEstimate {
  double p = 2.0;
  double constant = 1.0;
  /// The weight is <= 0 on some cell of the region.
  bool infinite = false;
  std::size_t nonpositive_cells = 0;
  Square worst;
};

/// Max over dyadic squares of (mean w) (mean w^(-1/(p-1)))^(p-1). Throws for p <= 1.
ApEstimate muckenhoupt_constant(const CellScalar& weight, double p, const Rect& region, int max_level);

struct HarnackEstimate {
  double H = 1.0;
  double sup = 0.0;
  double inf = 0.0;
  /// false when the minimum is <= 0 or no cell is usable.
  bool defined = true;
  std::size_t cells_used = 0;
  std::size_t cells_excluded = 0;
};

/// Cells whose centers satisfy `inside`; cells flagged in `excluded` are skipped and counted.
HarnackEstimate harnack_ratio(const CellScalar& d_sigma, const std::function<bool(Vec2)>& inside,
                              const std::vector<char>* excluded = nullptr);
/// Throws unless the subregion lies inside the field domain.
HarnackEstimate harnack_ratio(const CellScalar& d_sigma, const Rect& subregion,
                              const std::vector<char>* excluded = nullptr);

struct CorollaryCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double delta = 1.0;
  double H = 1.0;
  bool holds = true;
};

/// sup d <= H ((1/|A|) \int_A d^delta)^(1/delta) over the cells selected as in
/// harnack_ratio. Throws std::invalid_argument("delta must be positive").
CorollaryCheck corollary_bound(const CellScalar& d_sigma, double delta, double H, const Rect& region,
                               const std::vector<char>* excluded = nullptr);

/// min(1/2, 1/(2(p-1)))
double default_delta(double p);

/// log det DU with det clamped below at the degeneracy threshold.
CellScalar log_determinant(const DifferentialField& df);

struct AnalysisOptions {
  double p = 2.0;
  std::optional<double> delta;
  int max_level = 4;
  /// Harnack subregion; defaults to the centered half of the domain.
  std::optional<Rect> subregion;
  /// Square region for BMO and A_p; defaults to the unit cell on periodic
  /// grids and to the centered half of the domain otherwise.
  std::optional<Rect> region;
  std::vector<double> p_scan{1.5, 2.0, 3.0};
  double tolerance = 1e-6;
  double relative_threshold = default_relative_threshold;
};

struct AnalysisReport {
  double p = 2.0;
  double delta = 0.5;
  int max_level = 0;

  Rect region;
  double bmo_norm = 0.0;
  ApEstimate ap;
  std::vector<ApEstimate> ap_scan;
  double ap_best_p = 2.0;
  double ap_best_constant = 1.0;

  Rect harnack_region;
  HarnackEstimate harnack;
  CorollaryCheck corollary;

  /// Periodic cell solutions only.
  bool has_global = false;
  double energy_sigma = 0.0;
  double trace_integral = 0.0;
  double two_K = 2.0;
  double area_integral = 0.0;
  double sup_d_sigma = 0.0;
  /// Harnack ratio and A_p constant over the whole cell.
  double cell_H = 1.0;
  double C = 1.0;
  double bound_M = 1.0;
  /// sup d^sigma followed by each successive upper bound down to C H K.
  std::vector<double> chain;
  bool chain_ok = true;

  std::vector<std::string> failures;
};

/// Local estimators for any map; the global chain when the grid is periodic.
AnalysisReport analyze(const MapField& U, const SigmaField& sigma, const DilatationReport& dil,
                       const AnalysisOptions& options = {});

/// analyze() for a periodic cell solution. Throws on non-periodic grids.
AnalysisReport global_checks(const MapField& U, const SigmaField& sigma, const AnalysisOptions& options = {});

void write_report(std::ostream& out, const AnalysisReport& report);

}  // namespace sqc
