#include "sigmaqc/conjugate.hpp"

#include <cmath>
#include <vector>

#include "triangulation.hpp"

namespace sqc {

namespace {

Vec2 triangle_gradient(const NodalField& u, const detail::Triangle& t) {
  Vec2 g{};
  for (int a = 0; a < 3; ++a) g = g + u.value(t.i[a], t.j[a]) * t.grad[a];
  return g;
}

}  // namespace

ConjugatePair stream_function(const SigmaField& sigma, const NodalField& u, const StreamOptions& options) {
  const Grid& g = sigma.grid();
  if (!(u.grid() == g)) throw std::invalid_argument("field and coefficients on different grids");

  // Target field J sigma grad u, one value per triangle.
  std::vector<Vec2> target;
  target.reserve(2 * g.cell_count());
  Vec2 mean{};
  detail::for_each_triangle(g, [&](std::size_t cell, const detail::Triangle& t) {
    const Vec2 v = rotate(sigma[cell] * triangle_gradient(u, t));
    target.push_back(v);
    mean = mean + t.area * v;
  });
  mean = mean / g.domain().area();
  const Vec2 jump = g.periodic() ? mean : Vec2{};

  // Normal equations of min \int |grad p + jump - target|^2: the P1 Laplacian
  // with natural boundary conditions.
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(g.node_count() * 14);
  std::size_t k = 0;
  detail::for_each_triangle(g, [&](std::size_t, const detail::Triangle& t) {
    const Vec2 v = target[k++] - jump;
    for (int a = 0; a < 3; ++a) {
      const auto row = static_cast<Eigen::Index>(g.node(t.i[a], t.j[a]));
      rhs[row] += t.area * dot(v, t.grad[a]);
      for (int b = 0; b < 3; ++b) {
        triplets.emplace_back(row, static_cast<Eigen::Index>(g.node(t.i[b], t.j[b])),
                              t.area * dot(t.grad[b], t.grad[a]));
      }
    }
  });
  SparseMatrix laplacian(n, n);
  laplacian.setFromTriplets(triplets.begin(), triplets.end());
  laplacian.makeCompressed();
  const Eigen::VectorXd p = solve_mean_zero(laplacian, {rhs}, options.solver).front();

  std::vector<double> values(g.node_count());
  for (int j = 0; j < g.node_rows(); ++j) {
    for (int i = 0; i < g.node_cols(); ++i) {
      const std::size_t node = g.node(i, j);
      values[node] = p[static_cast<Eigen::Index>(node)] + dot(jump, g.node_position(i, j));
    }
  }
  NodalField raw(g, std::move(values), jump);
  NodalField u_tilde = raw.shifted(-integral(raw) / g.domain().area());

  double err = 0.0;
  double ref = 0.0;
  k = 0;
  detail::for_each_triangle(g, [&](std::size_t, const detail::Triangle& t) {
    const Vec2 d = triangle_gradient(u_tilde, t) - target[k];
    err += t.area * dot(d, d);
    ref += t.area * dot(target[k], target[k]);
    ++k;
  });

  ConjugatePair out{u, std::move(u_tilde), ref > 0.0 ? std::sqrt(err / ref) : std::sqrt(err), 0.0, true};
  out.compatibility_residual = weak_residual(sigma, u);
  out.compatible = out.compatibility_residual <= options.compatibility_tolerance;
  return out;
}

std::complex<double> beltrami_mu(const Mat2& s) {
  const double denom = 1.0 + s.trace() + s.det();
  return {(s.a22 - s.a11) / denom, -(s.a12 + s.a21) / denom};
}

std::complex<double> beltrami_nu(const Mat2& s) {
  const double denom = 1.0 + s.trace() + s.det();
  return {(1.0 - s.det()) / denom, (s.a12 - s.a21) / denom};
}

BeltramiPair beltrami_coefficients(const SigmaField& sigma) {
  const Grid& g = sigma.grid();
  std::vector<std::complex<double>> mu(g.cell_count());
  std::vector<std::complex<double>> nu(g.cell_count());
  double k = 0.0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    mu[c] = beltrami_mu(sigma[c]);
    nu[c] = beltrami_nu(sigma[c]);
    k = std::max(k, std::abs(mu[c]) + std::abs(nu[c]));
  }
  return {ComplexField(g, std::move(mu)), ComplexField(g, std::move(nu)), k, (1.0 + k) / (1.0 - k)};
}

ComplexDerivatives complex_derivatives(Vec2 grad_u, Vec2 grad_v) {
  const std::complex<double> d1(grad_u.x, grad_v.x);
  const std::complex<double> d2(grad_u.y, grad_v.y);
  const std::complex<double> i(0.0, 1.0);
  return {0.5 * (d1 - i * d2), 0.5 * (d1 + i * d2)};
}

double beltrami_residual(const ConjugatePair& pair, const BeltramiPair& belt) {
  const VectorField gu = gradient(pair.u);
  const VectorField gv = gradient(pair.u_tilde);
  if (!(gu.grid() == belt.mu.grid())) throw std::invalid_argument("pair and coefficients on different grids");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t c = 0; c < gu.size(); ++c) {
    const ComplexDerivatives d = complex_derivatives(gu[c], gv[c]);
    num += std::norm(d.dzbar - belt.mu[c] * d.dz - belt.nu[c] * std::conj(d.dz));
    const double s = std::abs(d.dz) + std::abs(d.dzbar);
    den += s * s;
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double distortion_excess(const ConjugatePair& pair, double K) {
  const VectorField gu = gradient(pair.u);
  const VectorField gv = gradient(pair.u_tilde);
  double worst = -HUGE_VAL;
  for (std::size_t c = 0; c < gu.size(); ++c) {
    const Mat2 df = Mat2::from_rows(gu[c], gv[c]);
    const double hs = df.frobenius_sq();
    if (hs <= 0.0) continue;
    worst = std::max(worst, (hs - (K + 1.0 / K) * df.det()) / hs);
  }
  return worst;
}

}  // namespace sqc
