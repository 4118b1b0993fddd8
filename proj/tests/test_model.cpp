#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "model.hpp"

using namespace nhqm;

TEST_CASE("potential values") {
  const PotentialParams p;
  CHECK(potential_value(0.0, 0.0, p).real() == doctest::Approx(-0.8));
  const double xb = std::sqrt(11.6);
  const double vb = (0.5 * 11.6 - 0.8) * std::exp(-1.16);
  CHECK(potential_value(xb, 0.0, p).real() == doctest::Approx(vb).epsilon(1e-14));
  CHECK(potential_value(-xb, 0.0, p).real() == doctest::Approx(vb).epsilon(1e-14));
  CHECK(vb == doctest::Approx(1.5674).epsilon(1e-4));
  CHECK(std::abs(potential_value(20.0, 0.0, p)) < 1e-15);
  CHECK(potential_value(1.7, 0.0, p).imag() == 0.0);
}

TEST_CASE("scaled potential is even and follows the rotated coordinate") {
  const PotentialParams p;
  for (double x : {0.3, 1.0, 2.5, 7.0}) {
    CHECK(std::abs(potential_value(x, 0.3, p) - potential_value(-x, 0.3, p)) < 1e-15);
    const cplx z = x * std::exp(cplx(0.0, 0.3));
    const cplx direct = (0.5 * z * z - 0.8) * std::exp(-0.1 * z * z);
    CHECK(std::abs(potential_value(x, 0.3, p) - direct) < 1e-14);
  }
  // Decays along the real grid for theta < pi/4.
  CHECK(std::abs(potential_value(60.0, 0.7, p)) < 1e-10);
}

TEST_CASE("barrier tops match the analytic root") {
  const PotentialParams p;
  const BarrierTop b = barrier_tops(p);
  // V'(x) = 0  <=>  x^2 = (a + g s) / (g a)
  const double x2 = (p.quad_coef + p.gauss_exp * p.shift) / (p.gauss_exp * p.quad_coef);
  CHECK(b.position == doctest::Approx(std::sqrt(x2)).epsilon(1e-12));
  CHECK(b.position == doctest::Approx(3.4059).epsilon(1e-4));
  CHECK(b.height == doctest::Approx(1.5674).epsilon(1e-4));
  CHECK(potential_value(b.position + 0.01, 0.0, p).real() < b.height);
  CHECK(potential_value(b.position - 0.01, 0.0, p).real() < b.height);
  CHECK(std::abs(potential_derivative(b.position, p)) < 1e-10);
}

TEST_CASE("barrier tops for modified parameters") {
  PotentialParams p;
  p.quad_coef = 1.0;
  p.shift = 0.5;
  p.gauss_exp = 0.2;
  const double x2 = (1.0 + 0.2 * 0.5) / (0.2 * 1.0);
  CHECK(barrier_tops(p).position == doctest::Approx(std::sqrt(x2)).epsilon(1e-12));
}

TEST_CASE("parameter and angle validation") {
  PotentialParams p;
  p.gauss_exp = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = PotentialParams{};
  p.mass = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  CHECK_THROWS_AS(ScalingAngle(-0.1), InvalidArgument);
  CHECK_THROWS_AS(ScalingAngle(kPi / 4), InvalidArgument);
  CHECK(ScalingAngle(0.0).value() == 0.0);
}

TEST_CASE("build_hamiltonian structure") {
  const GridPtr g = make_grid(128, 40.0);
  const PotentialParams p;
  const ScaledHamiltonian h0 = build_hamiltonian(g, ScalingAngle(0.0), p);
  CHECK(h0.matrix.imag().cwiseAbs().maxCoeff() == 0.0);
  CHECK(h0.warnings.empty());

  const ScaledHamiltonian h = build_hamiltonian(g, ScalingAngle(0.3), p);
  CHECK((h.matrix - h.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  const CMatrix t = kinetic_matrix(*g, p.mass, 0.3);
  for (int i = 0; i < g->size(); ++i)
    CHECK(h.matrix(i, i) == t(i, i) + potential_value(g->point(i), 0.3, p));
  CHECK(h.matrix(3, 7) == t(3, 7));
}

TEST_CASE("small extent warns, strict mode throws") {
  const GridPtr g = make_grid(64, 20.0);
  const ScaledHamiltonian h = build_hamiltonian(g, ScalingAngle(0.3), PotentialParams{});
  CHECK(h.warnings.size() == 1);
  CHECK_THROWS_AS(build_hamiltonian(g, ScalingAngle(0.3), PotentialParams{}, true), InvalidArgument);
}
