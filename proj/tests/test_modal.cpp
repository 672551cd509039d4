#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace fpbh;
using Catch::Approx;

namespace {

// Newton iteration on cos x cosh x + 1 from the asymptotic guess (2k - 1) pi / 2.
double newton_root(int k) {
  double x = (2.0 * k - 1.0) * kPi / 2.0;
  if (k == 1) x = 1.9;
  for (int i = 0; i < 60; ++i) {
    const double f = std::cos(x) * std::cosh(x) + 1.0;
    const double df = -std::sin(x) * std::cosh(x) + std::cos(x) * std::sinh(x);
    x -= f / df;
  }
  return x;
}

}  // namespace

TEST_CASE("pinned-pinned frequencies follow n^2 and the closed form") {
  const auto lam = test::unimorph();
  const auto geom = FpbGeometry::symmetric(test::kLength, 0.88, 0.83);
  const auto basis = fpb_basis(geom, lam, Damping::uniform(0.02), 8);
  const double w1 = std::pow(kPi / test::kLength, 2) * std::sqrt(lam.bending_stiffness() / lam.mass_per_length());
  CHECK(test::rel(basis.mode(1).omega, w1) < 1e-14);
  for (std::size_t n = 1; n <= 8; ++n) CHECK(test::rel(basis.mode(n).omega, n * n * w1) < 1e-13);
}

TEST_CASE("pinned-pinned shapes are orthonormal under Simpson quadrature") {
  const auto model = test::fpb_model(0.88, 0.83, 6);
  const auto& b = model.basis();
  for (std::size_t i = 1; i <= 6; ++i)
    for (std::size_t j = 1; j <= 6; ++j) {
      const double v = test::simpson([&](double x) { return b.shape(i, x) * b.shape(j, x); }, 0.0, b.length(), 4000);
      CHECK(std::abs(v - (i == j ? 1.0 : 0.0)) < 1e-8);
    }
}

TEST_CASE("pinned-pinned boundary conditions") {
  const auto model = test::fpb_model();
  const auto& b = model.basis();
  for (std::size_t n = 1; n <= 4; ++n) {
    CHECK(std::abs(b.shape(n, 0.0)) < 1e-12);
    CHECK(std::abs(b.shape(n, b.length())) < 1e-12);
    CHECK(std::abs(b.curvature(n, 0.0)) < 1e-8);
    CHECK(std::abs(b.curvature(n, b.length()) / b.curvature(n, b.length() / (2.0 * n))) < 1e-12);
  }
}

TEST_CASE("derivatives agree with central differences") {
  const auto model = test::fpb_model();
  const auto& b = model.basis();
  const double h = 1e-5;
  for (std::size_t n = 1; n <= 4; ++n)
    for (double x : {0.013, 0.05, 0.091}) {
      CHECK(b.slope(n, x) == Approx((b.shape(n, x + h) - b.shape(n, x - h)) / (2 * h)).epsilon(1e-6));
      CHECK(b.curvature(n, x) == Approx((b.slope(n, x + h) - b.slope(n, x - h)) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("symmetric fixture decouples even modes") {
  const auto model = test::fpb_model(0.6, 0.83, 6);
  const auto& b = model.basis();
  double odd = 0.0;
  for (std::size_t n = 1; n <= 6; ++n) {
    if (n % 2 == 0) {
      CHECK(std::abs(b.mode(n).sigma) < 1e-12 * std::abs(b.mode(1).sigma));
      CHECK(std::abs(b.mode(n).gamma) < 1e-12 * std::abs(b.mode(1).gamma));
    } else {
      odd = std::max(odd, std::abs(b.mode(n).sigma));
    }
  }
  CHECK(odd > 0.0);
}

TEST_CASE("force coefficients from the shape functions") {
  FpbGeometry g;
  g.total_length = 0.1;
  g.overhang_left = 0.01;
  g.overhang_right = 0.03;
  g.load_split = 0.015;
  g.piezo_start = 0.0;
  g.piezo_end = 0.1;
  const auto b = fpb_basis(g, test::unimorph(), Damping::uniform(0.02), 4);
  const double share = 0.015 / 0.06;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto shape = [&](double x) { return std::sqrt(2.0 / 0.1) * std::sin(n * kPi * x / 0.1); };
    CHECK(b.mode(n).sigma == Approx(-((1 - share) * shape(0.01) + share * shape(0.07))).epsilon(1e-13));
  }
  CHECK_FALSE(g.is_symmetric());
}

TEST_CASE("coupling coefficients are energy consistent") {
  const auto model = test::fpb_model();
  const auto& lam = model.laminate();
  for (const auto& m : model.basis().modes()) {
    if (std::abs(m.lambda) < 1e-20) continue;
    CHECK(lam.mass_per_length() * m.gamma / m.lambda == Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("full-length piezo on a pinned beam has zero net slope jump for even modes") {
  const auto b = fpb_basis(FpbGeometry::symmetric(0.1, 0.5, 1.0), test::unimorph(), Damping::uniform(0.02), 4);
  CHECK(std::abs(b.mode(2).lambda) < 1e-15);
  CHECK(std::abs(b.mode(1).lambda) > 0.0);
}

TEST_CASE("cantilever eigenvalues match Newton roots") {
  const auto roots = cantilever_eigenvalues(6);
  CHECK(roots[0] == Approx(1.8751040687).epsilon(1e-9));
  for (int k = 1; k <= 6; ++k) CHECK(std::abs(roots[k - 1] - newton_root(k)) < 1e-9);
}

TEST_CASE("cantilever shapes: boundary conditions and orthonormality") {
  const auto lam = test::unimorph();
  const double L = test::kLength;
  const auto b = cantilever_basis(L, lam, Damping::uniform(0.02), 6, L, 0.0, 0.085);
  for (std::size_t n = 1; n <= 6; ++n) {
    CHECK(std::abs(b.shape(n, 0.0)) < 1e-10);
    CHECK(std::abs(b.slope(n, 0.0)) < 1e-8 * std::abs(b.slope(n, L)));
    CHECK(std::abs(b.curvature(n, L)) < 1e-7 * std::abs(b.curvature(n, 0.0)));
    CHECK(std::abs(b.derivative(n, L, 3)) < 1e-6 * std::abs(b.derivative(n, 0.0, 3)));
    for (std::size_t m = 1; m <= 6; ++m) {
      const double v = test::simpson([&](double x) { return b.shape(n, x) * b.shape(m, x); }, 0.0, L, 4000);
      CHECK(std::abs(v - (n == m ? 1.0 : 0.0)) < 1e-8);
    }
  }
  // Tip displacement of a unit-normalized cantilever mode is 2/sqrt(L) in magnitude.
  CHECK(std::abs(b.shape(1, L)) == Approx(2.0 / std::sqrt(L)).epsilon(1e-9));
}

TEST_CASE("viscous damping converts to modal ratios") {
  const auto lam = test::unimorph();
  const auto b = fpb_basis(FpbGeometry::symmetric(0.1, 0.5, 0.8), lam, Damping::from_viscous(0.5), 3);
  for (const auto& m : b.modes()) CHECK(m.zeta == Approx(0.5 / (2 * lam.mass_per_length() * m.omega)).epsilon(1e-14));
}

TEST_CASE("modal input errors") {
  const auto lam = test::unimorph();
  const auto g = FpbGeometry::symmetric(0.1, 0.5, 0.8);
  CHECK_THROWS_AS(fpb_basis(g, lam, Damping::uniform(0.02), 0), ValidationError);
  CHECK_THROWS_AS(fpb_basis(g, lam, Damping::per_mode({0.02, 0.03}), 4), ValidationError);
  CHECK_THROWS_AS(fpb_basis(g, lam, Damping::uniform(1.2), 2), ValidationError);
  CHECK_THROWS_AS(FpbGeometry::symmetric(0.1, 1.2, 0.8), ValidationError);
  CHECK_THROWS_AS(FpbGeometry::symmetric(0.1, 0.5, 0.0), ValidationError);
  const auto b = fpb_basis(g, lam, Damping::uniform(0.02), 2);
  CHECK_THROWS_AS(b.shape(3, 0.01), ValidationError);
  CHECK_THROWS_AS(b.shape(1, 0.2), ValidationError);
  CHECK_THROWS_AS(cantilever_basis(0.1, lam, Damping::uniform(0.02), 2, 0.0, 0.0, 0.05), ValidationError);
}
