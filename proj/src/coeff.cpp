#include "sigmaqc/coeff.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "sigmaqc/textio.hpp"

namespace sqc {

namespace {
constexpr double kRelTol = 1e-12;

CellScalar antisymmetric_part(const MatrixField& s) {
  std::vector<double> v(s.size());
  for (std::size_t c = 0; c < v.size(); ++c) v[c] = s[c].a12 - s[c].a21;
  return CellScalar(s.grid(), std::move(v));
}

CellScalar determinant(const MatrixField& s) {
  std::vector<double> v(s.size());
  for (std::size_t c = 0; c < v.size(); ++c) v[c] = s[c].det();
  return CellScalar(s.grid(), std::move(v));
}

double max_norm(const VectorField& f) {
  double m = 0.0;
  for (Vec2 v : f.values()) m = std::max(m, norm(v));
  return m;
}
}  // namespace

std::string EllipticityReport::describe() const {
  if (passed()) return "ellipticity check passed";
  std::ostringstream os;
  os << "ellipticity check failed (alpha = " << format_number(alpha)
     << ", beta = " << format_number(beta) << "): " << violations.size() << " violating cell(s)";
  const std::size_t shown = std::min<std::size_t>(violations.size(), 5);
  for (std::size_t k = 0; k < shown; ++k) {
    const CellViolation& v = violations[k];
    os << "; cell " << v.cell << ' '
       << (v.lower ? "sigma xi.xi >= alpha|xi|^2" : "sigma^-1 xi.xi >= |xi|^2/beta")
       << " fails (eigenvalue " << format_number(v.eigenvalue) << " < " << format_number(v.bound)
       << ')';
  }
  if (!determinant_ok) os << "; non-positive det sigma";
  return os.str();
}

EllipticityReport validate_sigma(const MatrixField& sigma, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("alpha and beta must be positive");
  EllipticityReport r;
  r.alpha = alpha;
  r.beta = beta;
  r.K = std::max(1.0 / alpha, beta);
  r.min_symmetric_eigenvalue = std::numeric_limits<double>::infinity();
  r.min_inverse_symmetric_eigenvalue = std::numeric_limits<double>::infinity();
  const double inv_bound = 1.0 / beta;
  for (std::size_t c = 0; c < sigma.size(); ++c) {
    const Mat2& s = sigma[c];
    const double lo = symmetric_min_eigenvalue(s);
    if (lo < r.min_symmetric_eigenvalue) {
      r.min_symmetric_eigenvalue = lo;
      r.worst_lower_cell = c;
    }
    if (lo < alpha * (1.0 - kRelTol)) {
      r.lower_ok = false;
      r.violations.push_back({c, true, lo, alpha});
    }
    if (!(s.det() > 0.0)) {
      r.determinant_ok = false;
      r.upper_ok = false;
      r.violations.push_back({c, false, -std::numeric_limits<double>::infinity(), inv_bound});
      continue;
    }
    const double inv_lo = symmetric_min_eigenvalue(s.inverse());
    if (inv_lo < r.min_inverse_symmetric_eigenvalue) {
      r.min_inverse_symmetric_eigenvalue = inv_lo;
      r.worst_upper_cell = c;
    }
    if (inv_lo < inv_bound * (1.0 - kRelTol)) {
      r.upper_ok = false;
      r.violations.push_back({c, false, inv_lo, inv_bound});
    }
  }
  return r;
}

std::pair<double, double> tight_constants(const MatrixField& sigma) {
  double alpha = std::numeric_limits<double>::infinity();
  double inv = std::numeric_limits<double>::infinity();
  for (const Mat2& s : sigma.values()) {
    alpha = std::min(alpha, symmetric_min_eigenvalue(s));
    if (s.det() > 0.0) inv = std::min(inv, symmetric_min_eigenvalue(s.inverse()));
    else inv = 0.0;
  }
  return {alpha, inv > 0.0 ? 1.0 / inv : std::numeric_limits<double>::infinity()};
}

double distortion_constant(const Mat2& s) {
  // With lambda = K + 1/K the pencil det(I + s^T s - lambda sym) = 0 is
  // shifted by 2: m = lambda - 2 solves det((s - I)^T (s - I) - m sym) = 0.
  // Working with m avoids the cancellation in lambda - 2 near s = I.
  const Mat2 sym = s.symmetric_part();
  const Mat2 e{s.a11 - 1.0, s.a12, s.a21, s.a22 - 1.0};
  const Mat2 b = e.transpose() * e;
  const double qa = sym.a11 * sym.a22 - sym.a12 * sym.a12;
  const double qb = -(b.a11 * sym.a22 + b.a22 * sym.a11 - 2.0 * b.a12 * sym.a12);
  const double qc = b.a11 * b.a22 - b.a12 * b.a12;
  const double disc = std::max(0.0, qb * qb - 4.0 * qa * qc);
  const double m = std::max(0.0, (-qb + std::sqrt(disc)) / (2.0 * qa));
  // (K - 1)/(K + 1) = sqrt(m / (m + 4)).
  const double k = std::sqrt(m / (m + 4.0));
  return (1.0 + k) / (1.0 - k);
}

VectorField cell_difference_gradient(const CellScalar& f) {
  const Grid& g = f.grid();
  std::vector<Vec2> out(g.cell_count());
  // Difference along one axis; k is the position on that axis, at(s) the value at s.
  const auto diff = [&](int k, int n, double h, auto&& at) {
    if (g.periodic()) return (at((k + 1) % n) - at((k - 1 + n) % n)) / (2.0 * h);
    if (k == 0) return (at(1) - at(0)) / h;
    if (k == n - 1) return (at(n - 1) - at(n - 2)) / h;
    return (at(k + 1) - at(k - 1)) / (2.0 * h);
  };
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      out[g.cell(i, j)] = {diff(i, g.nx(), g.hx(), [&](int s) { return f.at(s, j); }),
                           diff(j, g.ny(), g.hy(), [&](int s) { return f.at(i, s); })};
    }
  }
  return VectorField(g, std::move(out));
}

SigmaField::SigmaField(MatrixField sigma, double alpha, double beta)
    : sigma_(std::move(sigma)),
      alpha_(alpha),
      beta_(beta),
      b_(antisymmetric_part(sigma_)),
      c_(determinant(sigma_)),
      grad_b_(cell_difference_gradient(b_)),
      grad_c_(cell_difference_gradient(c_)) {
  E_ = max_norm(grad_c_) + max_norm(grad_b_);
}

SigmaField SigmaField::create(MatrixField sigma, double alpha, double beta) {
  EllipticityReport report = validate_sigma(sigma, alpha, beta);
  if (!report.passed()) throw EllipticityError(std::move(report));
  return SigmaField(std::move(sigma), alpha, beta);
}

SigmaField SigmaField::create_normalized(MatrixField sigma) {
  const auto [alpha, beta] = tight_constants(sigma);
  if (!(alpha > 0.0) || !std::isfinite(beta)) {
    throw EllipticityError(validate_sigma(sigma, std::max(alpha, 1e-300), 1.0));
  }
  const double K = std::max(1.0 / alpha, beta);
  return create(std::move(sigma), 1.0 / K, K);
}

SigmaField SigmaField::with_exact_gradients(ExactScalarGradients exact) const {
  if (!(exact.grad_b.grid() == grid()) || !(exact.grad_c.grid() == grid())) {
    throw std::invalid_argument("exact gradients live on a different grid");
  }
  SigmaField out = *this;
  out.grad_b_ = std::move(exact.grad_b);
  out.grad_c_ = std::move(exact.grad_c);
  out.E_ = std::max(exact.E, max_norm(out.grad_c_) + max_norm(out.grad_b_));
  out.E_discrete_ = false;
  return out;
}

DerivedScalars derived_scalars(const SigmaField& sigma) { return {sigma.b(), sigma.c(), sigma.E()}; }

}  // namespace sqc
