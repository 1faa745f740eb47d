#pragma once

/// \file sigmaqc/conjugate.hpp
/// \brief Stream functions grad u~ = J sigma grad u, the first-order
///        Beltrami system F_zbar = mu F_z + nu conj(F_z) for F = u + i u~,
///        and the complex dilatations mu, nu.

#include <complex>

#include "sigmaqc/coeff.hpp"
#include "sigmaqc/mesh.hpp"
#include "sigmaqc/solve.hpp"

namespace sqc {

struct ConjugatePair {
  NodalField u;
  NodalField u_tilde;
  /// Relative L2 mismatch ||grad u~ - J sigma grad u|| / ||J sigma grad u||.
  double mismatch = 0.0;
  /// weak_residual(sigma, u): the discrete curl of J sigma grad u.
  double compatibility_residual = 0.0;
  /// false when compatibility_residual exceeds the requested tolerance.
  bool compatible = true;
};

struct StreamOptions {
  double compatibility_tolerance = 1e-6;
  SolverOptions solver;
};

/// Least-squares stream function, normalized to zero mean. On periodic grids
/// u~ carries the mean of J sigma grad u as its period jump.
ConjugatePair stream_function(const SigmaField& sigma, const NodalField& u, const StreamOptions& options = {});

struct BeltramiPair {
  ComplexField mu;
  ComplexField nu;
  /// max over cells of |mu| + |nu|
  double k_ess = 0.0;
  /// (1 + k_ess) / (1 - k_ess)
  double K_belt = 1.0;
};

std::complex<double> beltrami_mu(const Mat2& s);
std::complex<double> beltrami_nu(const Mat2& s);

BeltramiPair beltrami_coefficients(const SigmaField& sigma);

/// F_z = (dF/dx1 - i dF/dx2)/2 and F_zbar = (dF/dx1 + i dF/dx2)/2 for F = u + i v.
struct ComplexDerivatives {
  std::complex<double> dz;
  std::complex<double> dzbar;
};
ComplexDerivatives complex_derivatives(Vec2 grad_u, Vec2 grad_v);

/// ||F_zbar - mu F_z - nu conj(F_z)|| / || |F_z| + |F_zbar| || over cells.
double beltrami_residual(const ConjugatePair& pair, const BeltramiPair& belt);

/// max over cells of (|DF|^2 - (K + 1/K) det DF) / |DF|^2 for F = (u, u~).
double distortion_excess(const ConjugatePair& pair, double K);

}  // namespace sqc
