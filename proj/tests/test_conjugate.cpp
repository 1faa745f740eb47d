#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "sigmaqc/cases.hpp"
#include "sigmaqc/conjugate.hpp"

using namespace sqc;
using cplx = std::complex<double>;

namespace {

Grid unit(int n, Topology t = Topology::dirichlet) { return Grid::build(n, n, Rect::unit(), t); }

SigmaField constant(const Grid& g, Mat2 s) {
  const MatrixField m = MatrixField::filled(g, s);
  const auto [a, b] = tight_constants(m);
  return SigmaField::create(m, a, b);
}

Mat2 random_sigma() {
  const double l1 = oracle::uniform(0.3, 3.0), l2 = oracle::uniform(0.3, 3.0);
  const double t = oracle::uniform(0.0, 3.14159);
  const double c = std::cos(t), s = std::sin(t);
  const double k = oracle::uniform(-1.5, 1.5);
  return {c * c * l1 + s * s * l2, c * s * (l1 - l2) - k, c * s * (l1 - l2) + k, s * s * l1 + c * c * l2};
}

// For F = u + i v with grad v = J s grad u and grad u = g:
// dF/dx1 = g1 + i (J s g)_1, dF/dx2 = g2 + i (J s g)_2.
std::pair<cplx, cplx> wirtinger(const Mat2& s, Vec2 g) {
  const Vec2 h = rotate(s * g);
  const cplx fx(g.x, h.x), fy(g.y, h.y);
  const cplx i(0, 1);
  return {0.5 * (fx - i * fy), 0.5 * (fx + i * fy)};
}

// Solves F_zbar = mu F_z + nu conj(F_z) for (mu, nu) from two independent gradients.
std::pair<cplx, cplx> dilatations_from_two_maps(const Mat2& s) {
  const auto [a1, b1] = wirtinger(s, {1.0, 0.0});
  const auto [a2, b2] = wirtinger(s, {0.3, 1.0});
  // [a1 conj(a1); a2 conj(a2)] [mu; nu] = [b1; b2]
  const cplx det = a1 * std::conj(a2) - std::conj(a1) * a2;
  return {(b1 * std::conj(a2) - std::conj(a1) * b2) / det, (a1 * b2 - a2 * b1) / det};
}

}  // namespace

TEST_CASE("stream functions of affine and harmonic data") {
  const Grid g = unit(16);
  const ConjugatePair x1 = stream_function(constant(g, Mat2::identity()), NodalField::sample(g, [](Vec2 x) { return x.x; }));
  CHECK(x1.compatible);
  CHECK(x1.mismatch <= 1e-12);
  CHECK(oracle::l2_error(x1.u_tilde, [](Vec2 x) { return x.y - 0.5; }) <= 1e-12);

  const ConjugatePair d = stream_function(constant(g, Mat2::diag(2.0, 0.5)), NodalField::sample(g, [](Vec2 x) { return x.x; }));
  CHECK(oracle::l2_error(d.u_tilde, [](Vec2 x) { return 2 * x.y - 1.0; }) <= 1e-12);
}

TEST_CASE("stream function of x1^2 - x2^2 converges to 2 x1 x2 at order 2") {
  auto u = [](Vec2 x) { return x.x * x.x - x.y * x.y; };
  auto v = [](Vec2 x) { return 2 * x.x * x.y; };
  std::vector<double> e;
  for (int n : {16, 32, 64}) {
    const Grid g = unit(n);
    e.push_back(oracle::l2_error(stream_function(constant(g, Mat2::identity()), NodalField::sample(g, u)).u_tilde, v, true));
  }
  CHECK(oracle::order(e[0], e[1]) >= 1.8);
  CHECK(oracle::order(e[1], e[2]) >= 1.8);
}

TEST_CASE("anisotropic refinement: sigma = diag(2, 1/2), u = x1^2 - 4 x2^2, conjugate 4 x1 x2") {
  auto u = [](Vec2 x) { return x.x * x.x - 4 * x.y * x.y; };
  auto v = [](Vec2 x) { return 4 * x.x * x.y; };
  std::vector<double> e, m;
  for (int n : {16, 32, 64}) {
    const Grid g = unit(n);
    const ConjugatePair p = stream_function(constant(g, Mat2::diag(2.0, 0.5)), NodalField::sample(g, u));
    e.push_back(oracle::l2_error(p.u_tilde, v, true));
    m.push_back(p.mismatch);
  }
  CHECK(oracle::order(e[1], e[2]) >= 1.8);
  CHECK(m[2] < m[1]);
  CHECK(m[1] < m[0]);
}

TEST_CASE("gauge invariance: adding a constant to u leaves u~ unchanged") {
  const Grid g = unit(12);
  const SigmaField s = constant(g, Mat2{1.2, -0.4, 0.4, 0.9});
  const NodalField u = NodalField::sample(g, [](Vec2 x) { return 0.7 * x.x - 0.2 * x.y; });
  const ConjugatePair a = stream_function(s, u);
  const ConjugatePair b = stream_function(s, u.shifted(5.0));
  for (std::size_t k = 0; k < g.node_count(); ++k) CHECK(a.u_tilde[k] == doctest::Approx(b.u_tilde[k]).epsilon(1e-12));
}

TEST_CASE("compatibility flag: data that is not a solution is reported") {
  const Grid g = unit(16);
  const ConjugatePair p = stream_function(constant(g, Mat2::identity()), NodalField::sample(g, [](Vec2 x) { return x.x * x.x + x.y * x.y; }));
  CHECK_FALSE(p.compatible);
  CHECK(p.compatibility_residual > 1e-3);
  CHECK(p.mismatch > 1e-3);
}

TEST_CASE("periodic laminate: u~ = H x2 with period jump (0, H)") {
  const CaseBundle lam = make_case("laminate");
  const double H = lam.oracle.at("H");
  const SigmaField s = lam.sigma_on(lam.grid(32));
  const MapField U = lam.map_on(s);
  const ConjugatePair p = stream_function(s, U.u1);
  CHECK(p.compatible);
  CHECK(p.u_tilde.jump().x == doctest::Approx(0.0).scale(1.0));
  CHECK(p.u_tilde.jump().y == doctest::Approx(H).epsilon(1e-10));
  const VectorField gv = gradient(p.u_tilde);
  for (std::size_t c = 0; c < gv.size(); ++c) {
    CHECK(std::abs(gv[c].x) <= 1e-10);
    CHECK(gv[c].y == doctest::Approx(H).epsilon(1e-10));
  }
  CHECK(p.mismatch <= 1e-10);
}

TEST_CASE("complex dilatations match the two-map oracle") {
  for (int trial = 0; trial < 40; ++trial) {
    const Mat2 s = random_sigma();
    const auto [mu, nu] = dilatations_from_two_maps(s);
    CHECK(std::abs(beltrami_mu(s) - mu) <= 1e-12);
    CHECK(std::abs(beltrami_nu(s) - nu) <= 1e-12);
    CHECK(std::abs(mu) + std::abs(nu) < 1.0);
  }
  CHECK(std::abs(beltrami_mu(Mat2::identity())) == 0.0);
  CHECK(std::abs(beltrami_nu(Mat2::identity())) == 0.0);
  // I + tJ: mu = 0, |nu| = t / sqrt(t^2 + 4).
  for (double t : {0.5, 1.0, 3.0}) {
    const Mat2 s{1, -t, t, 1};
    CHECK(std::abs(beltrami_mu(s)) == doctest::Approx(0.0).scale(1.0));
    CHECK(std::abs(beltrami_nu(s)) == doctest::Approx(t / std::sqrt(t * t + 4)));
  }
}

TEST_CASE("complex derivatives and the residual of z and conj(z)") {
  const ComplexDerivatives z = complex_derivatives({1, 0}, {0, 1});
  CHECK(z.dz == cplx(1, 0));
  CHECK(z.dzbar == cplx(0, 0));
  const ComplexDerivatives zb = complex_derivatives({1, 0}, {0, -1});
  CHECK(zb.dz == cplx(0, 0));
  CHECK(zb.dzbar == cplx(1, 0));

  const Grid g = unit(8);
  const BeltramiPair id = beltrami_coefficients(constant(g, Mat2::identity()));
  CHECK(id.k_ess == 0.0);
  CHECK(id.K_belt == 1.0);
  const NodalField x = NodalField::sample(g, [](Vec2 p) { return p.x; });
  const ConjugatePair holo{x, NodalField::sample(g, [](Vec2 p) { return p.y; }), 0, 0, true};
  const ConjugatePair anti{x, NodalField::sample(g, [](Vec2 p) { return -p.y; }), 0, 0, true};
  CHECK(beltrami_residual(holo, id) <= 1e-14);
  CHECK(beltrami_residual(anti, id) == doctest::Approx(1.0));
}

TEST_CASE("solutions with their stream functions satisfy the Beltrami system") {
  const Grid g = unit(16);
  for (int trial = 0; trial < 5; ++trial) {
    const SigmaField s = constant(g, random_sigma());
    const double a = oracle::uniform(-1, 1), b = oracle::uniform(-1, 1);
    const ConjugatePair p = stream_function(s, NodalField::sample(g, [&](Vec2 x) { return a * x.x + b * x.y; }));
    CHECK(beltrami_residual(p, beltrami_coefficients(s)) <= 1e-10);
  }
}

TEST_CASE("distortion inequality |DF|^2 <= (K + 1/K) det DF, sharp over directions") {
  const Grid g = unit(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat2 s = random_sigma();
    const double K = distortion_constant(s);
    const SigmaField field = constant(g, s);
    double best = -HUGE_VAL;
    for (int k = 0; k < 90; ++k) {
      const double t = 3.141592653589793 * k / 90;
      const NodalField u = NodalField::sample(g, [&](Vec2 x) { return std::cos(t) * x.x + std::sin(t) * x.y; });
      const double excess = distortion_excess(stream_function(field, u), K);
      CHECK(excess <= 1e-10);
      best = std::max(best, excess);
    }
    CHECK(best >= -0.01);
  }
}
