#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sigmaqc/cases.hpp"
#include "sigmaqc/coeff.hpp"

using namespace sqc;

namespace {

Grid unit(int n) { return Grid::build(n, n, Rect::unit(), Topology::dirichlet); }

MatrixField constant(const Grid& g, Mat2 s) { return MatrixField::filled(g, s); }

// Random matrix with positive definite symmetric part plus a skew part.
Mat2 random_sigma() {
  const double l1 = oracle::uniform(0.3, 3.0), l2 = oracle::uniform(0.3, 3.0);
  const double t = oracle::uniform(0.0, 3.14159);
  const double c = std::cos(t), s = std::sin(t);
  const double k = oracle::uniform(-1.5, 1.5);
  return {c * c * l1 + s * s * l2, c * s * (l1 - l2) - k, c * s * (l1 - l2) + k, s * s * l1 + c * c * l2};
}

}  // namespace

TEST_CASE("validate_sigma: identity, diag(2, 1/2), indefinite") {
  const Grid g = unit(4);
  const EllipticityReport id = validate_sigma(constant(g, Mat2::identity()), 1.0, 1.0);
  CHECK(id.passed());
  CHECK(id.K == 1.0);

  // Eigenvalues of sigma and sigma^-1 are {2, 1/2}.
  const EllipticityReport d = validate_sigma(constant(g, Mat2::diag(2.0, 0.5)), 0.5, 2.0);
  CHECK(d.passed());
  CHECK(d.K == 2.0);

  const EllipticityReport bad = validate_sigma(constant(g, Mat2::diag(1.0, -1.0)), 0.5, 2.0);
  CHECK_FALSE(bad.passed());
  CHECK_FALSE(bad.lower_ok);
  REQUIRE_FALSE(bad.violations.empty());
  CHECK(bad.violations.front().lower);
  CHECK(bad.violations.size() >= g.cell_count());
}

TEST_CASE("validate_sigma names the inverse condition when beta is too small") {
  const Grid g = unit(2);
  const EllipticityReport r = validate_sigma(constant(g, Mat2::diag(2.0, 0.5)), 0.5, 1.5);
  CHECK(r.lower_ok);
  CHECK_FALSE(r.upper_ok);
  CHECK_FALSE(r.violations.front().lower);
  CHECK_THROWS_AS(SigmaField::create(constant(g, Mat2::diag(2.0, 0.5)), 0.5, 1.5), EllipticityError);
}

TEST_CASE("derived scalars of constant fields") {
  const Grid g = unit(8);
  const DerivedScalars id = derived_scalars(SigmaField::create(constant(g, Mat2::identity()), 1, 1));
  CHECK(id.E == 0.0);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    CHECK(id.b[c] == 0.0);
    CHECK(id.c[c] == 1.0);
  }
  // I + J = [[1, -1], [1, 1]]: b = -1 - 1, c = 1 + 1.
  const DerivedScalars ij = derived_scalars(SigmaField::create(constant(g, Mat2{1, -1, 1, 1}), 1, 2));
  CHECK(ij.E == 0.0);
  CHECK(ij.b[0] == -2.0);
  CHECK(ij.c[0] == 2.0);
}

TEST_CASE("discrete E of diag(1 + x1, 1) tends to |grad c| = 1") {
  double previous = HUGE_VAL;
  for (int n : {8, 16, 32}) {
    const Grid g = unit(n);
    const SigmaField s =
        SigmaField::create(MatrixField::sample(g, [](Vec2 x) { return Mat2::diag(1 + x.x, 1); }), 1, 2);
    CHECK(s.E_is_discrete());
    const double err = std::abs(s.E() - 1.0);
    CHECK(err <= previous);
    CHECK(err <= 1e-12);  // c is affine, so central and one-sided quotients are exact
    previous = err;
  }
}

TEST_CASE("E = 0 exactly for random constant coefficients") {
  for (int trial = 0; trial < 10; ++trial) {
    const Mat2 s = random_sigma();
    const auto [a, b] = tight_constants(constant(unit(2), s));
    const SigmaField f = SigmaField::create(constant(unit(6), s), a, b);
    CHECK(f.E() == 0.0);
  }
}

TEST_CASE("|sigma xi| <= beta |xi| for valid fields") {
  for (int trial = 0; trial < 50; ++trial) {
    const Mat2 s = random_sigma();
    const auto [alpha, beta] = tight_constants(constant(unit(2), s));
    REQUIRE(validate_sigma(constant(unit(2), s), alpha, beta).passed());
    for (int k = 0; k < 32; ++k) {
      const double t = 2.0 * 3.141592653589793 * k / 32;
      const Vec2 xi{std::cos(t), std::sin(t)};
      CHECK(norm(s * xi) <= beta * (1 + 1e-12));
      CHECK(dot(s * xi, xi) >= alpha * (1 - 1e-12));
    }
  }
}

TEST_CASE("b and c follow a periodic shift of the laminate") {
  const CaseBundle lam = make_case("laminate");
  const Grid g = Grid::build(16, 16, Rect::unit(), Topology::periodic);
  const SigmaField a = SigmaField::create(MatrixField::sample(g, lam.sigma), lam.alpha, lam.beta);
  const SigmaField b = SigmaField::create(
      MatrixField::sample(g, [&](Vec2 x) { return lam.sigma({std::fmod(x.x + 0.25, 1.0), x.y}); }), lam.alpha,
      lam.beta);
  for (int j = 0; j < 16; ++j) {
    for (int i = 0; i < 16; ++i) {
      CHECK(b.b().at(i, j) == a.b().at((i + 4) % 16, j));
      CHECK(b.c().at(i, j) == a.c().at((i + 4) % 16, j));
    }
  }
}

TEST_CASE("normalized fields satisfy 1/alpha = beta = K") {
  const Grid g = unit(4);
  const SigmaField s = SigmaField::create_normalized(constant(g, Mat2::diag(3.0, 1.5)));
  CHECK(s.unit_convention());
  CHECK(s.K() == doctest::Approx(3.0));
  CHECK(1.0 / s.alpha() == doctest::Approx(s.beta()));
}

TEST_CASE("distortion constant") {
  // Symmetric: K is the eigenvalue ratio bound max(lambda, 1/lambda) for det 1.
  CHECK(distortion_constant(Mat2::diag(2.0, 0.5)) == doctest::Approx(2.0));
  CHECK(distortion_constant(Mat2::identity()) == doctest::Approx(1.0));
  // sigma = I + tJ: (|xi|^2 + |sigma xi|^2)/(sigma xi.xi) = 2 + t^2 for every xi.
  for (double t : {0.5, 1.0, 2.0}) {
    const double K = distortion_constant(Mat2{1, -t, t, 1});
    CHECK(K + 1 / K == doctest::Approx(2 + t * t));
  }
  // Near the identity K - 1 keeps full relative accuracy: diag(a, 1) has K = a.
  for (double eps : {1e-4, 1e-7, 1e-10}) {
    CHECK(distortion_constant(Mat2::diag(1 + eps, 1.0)) - 1.0 == doctest::Approx(eps).epsilon(1e-5));
  }
}
