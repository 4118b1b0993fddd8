#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "error.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "spectrum.hpp"

using namespace nhqm;

namespace {

CMatrix random_matrix(int n, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  CMatrix a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = cplx(nd(rng), nd(rng));
  return a;
}

// Greedy nearest matching of two eigenvalue sets; returns the worst distance.
double set_distance(const CVector& a, const CVector& b) {
  std::vector<char> used(static_cast<std::size_t>(b.size()), 0);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double best = INFINITY;
    Eigen::Index arg = -1;
    for (Eigen::Index j = 0; j < b.size(); ++j)
      if (!used[static_cast<std::size_t>(j)] && std::abs(a[i] - b[j]) < best) {
        best = std::abs(a[i] - b[j]);
        arg = j;
      }
    used[static_cast<std::size_t>(arg)] = 1;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_CASE("2x2 analytic complex symmetric case") {
  CMatrix a(2, 2);
  a << 1.0, kI, kI, 1.0;
  const MatrixEigenpairs es = eigendecompose(a);
  REQUIRE(es.c_normalized);
  std::vector<cplx> vals{es.values[0], es.values[1]};
  std::sort(vals.begin(), vals.end(), [](cplx x, cplx y) { return x.imag() < y.imag(); });
  CHECK(std::abs(vals[0] - cplx(1.0, -1.0)) < 1e-14);
  CHECK(std::abs(vals[1] - cplx(1.0, 1.0)) < 1e-14);
  for (int j = 0; j < 2; ++j) {
    const CVector v = es.vectors.col(j);
    const double s = es.values[j].imag() > 0 ? 1.0 : -1.0;
    // (1, +-1)/sqrt(2) up to an overall sign.
    const double r = 1.0 / std::sqrt(2.0);
    const bool match = std::abs(v[0] - r) + std::abs(v[1] - s * r) < 1e-12 ||
                       std::abs(v[0] + r) + std::abs(v[1] + s * r) < 1e-12;
    CHECK(match);
  }
}

TEST_CASE("triangular and companion matrices") {
  CMatrix u(3, 3);
  u << cplx(1, 1), 2.0, 3.0, 0.0, cplx(-2, 0.5), 4.0, 0.0, 0.0, cplx(0, 3);
  const CVector ev = linalg::eigenvalues(u);
  CHECK(set_distance(ev, u.diagonal()) < 1e-12);

  // Roots 1, 2i, -3 of (z - 1)(z - 2i)(z + 3) = z^3 + c2 z^2 + c1 z + c0.
  const cplx r1 = 1.0, r2 = cplx(0, 2), r3 = -3.0;
  const cplx c2 = -(r1 + r2 + r3), c1 = r1 * r2 + r1 * r3 + r2 * r3, c0 = -r1 * r2 * r3;
  CMatrix comp = CMatrix::Zero(3, 3);
  comp(0, 0) = -c2;
  comp(0, 1) = -c1;
  comp(0, 2) = -c0;
  comp(1, 0) = 1.0;
  comp(2, 1) = 1.0;
  CVector roots(3);
  roots << r1, r2, r3;
  const linalg::EigenSystem es = linalg::eigensystem(comp);
  CHECK(set_distance(es.values, roots) < 1e-12);
  for (int j = 0; j < 3; ++j)
    CHECK((comp * es.vectors.col(j) - es.values[j] * es.vectors.col(j)).norm() < 1e-12);
}

TEST_CASE("H(theta = 0) matches a real-symmetric oracle") {
  const GridPtr g = make_grid(256, 50.0);
  const ScaledHamiltonian h = build_hamiltonian(g, ScalingAngle(0.0), PotentialParams{});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(h.matrix.real());
  const CVector ours = linalg::eigenvalues(h.matrix);
  std::vector<double> re;
  for (auto z : ours) {
    CHECK(std::abs(z.imag()) < 1e-9);
    re.push_back(z.real());
  }
  std::sort(re.begin(), re.end());
  double worst = 0.0;
  for (int i = 0; i < 256; ++i) worst = std::max(worst, std::abs(re[static_cast<std::size_t>(i)] - oracle.eigenvalues()[i]));
  CHECK(worst < 1e-8);
}

TEST_CASE("random complex symmetric 6x6 matrices") {
  std::mt19937 rng(20240611);
  for (int trial = 0; trial < 50; ++trial) {
    CMatrix a = random_matrix(6, rng);
    a = (0.5 * (a + a.transpose())).eval();
    const MatrixEigenpairs es = eigendecompose(a);
    REQUIRE(es.c_normalized);
    CHECK(es.residuals.maxCoeff() < 1e-8);
    const CMatrix gram = es.vectors.transpose() * es.vectors;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        if (i == j) CHECK(std::abs(gram(i, i) - 1.0) < 1e-8);
        else CHECK(std::abs(gram(i, j)) < 1e-6);
      }
  }
}

TEST_CASE("general matrices: spectrum of H equals spectrum of H^T and an independent solver") {
  std::mt19937 rng(99);
  for (int n : {1, 2, 5, 17, 40}) {
    const CMatrix a = random_matrix(n, rng);
    const CVector ev = linalg::eigenvalues(a);
    const CVector evt = linalg::eigenvalues(a.transpose());
    CHECK(set_distance(ev, evt) < 1e-10 * (1.0 + a.norm()));
    Eigen::ComplexEigenSolver<CMatrix> oracle(a, false);
    CHECK(set_distance(ev, oracle.eigenvalues()) < 1e-10 * (1.0 + a.norm()));
    const MatrixEigenpairs es = eigendecompose(a);
    if (n > 1) CHECK_FALSE(es.c_normalized);
    CHECK(es.residuals.maxCoeff() < 1e-10 * (1.0 + a.norm()));
  }
}

TEST_CASE("degenerate symmetric eigenvalues get c-orthonormal vectors") {
  std::mt19937 rng(5);
  // Q diag(1, 1, 2, 3) Q^T with a complex orthogonal Q from a real rotation.
  Eigen::MatrixXd m = Eigen::MatrixXd::Random(4, 4);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd d(4);
  d << 1, 1, 2, 3;
  const CMatrix a = (q * d.asDiagonal() * q.transpose()).cast<cplx>();
  const MatrixEigenpairs es = eigendecompose(a);
  const CMatrix gram = es.vectors.transpose() * es.vectors;
  CHECK((gram - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(es.residuals.maxCoeff() < 1e-10);
}

TEST_CASE("Hessenberg reduction and balancing") {
  std::mt19937 rng(11);
  CMatrix a = random_matrix(12, rng);
  a.row(3) *= 1e4;
  a.col(7) *= 1e-3;
  const linalg::Balanced b = linalg::balance(a);
  const CMatrix back = b.scale.asDiagonal() * b.matrix * b.scale.cwiseInverse().asDiagonal();
  CHECK((back - a).cwiseAbs().maxCoeff() < 1e-12 * a.cwiseAbs().maxCoeff());

  const linalg::Hessenberg hs = linalg::hessenberg(a);
  CHECK((hs.q.adjoint() * hs.q - CMatrix::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((hs.q * hs.h * hs.q.adjoint() - a).cwiseAbs().maxCoeff() < 1e-10 * a.cwiseAbs().maxCoeff());
  for (int j = 0; j < 12; ++j)
    for (int i = j + 2; i < 12; ++i) CHECK(hs.h(i, j) == cplx(0.0));
}

TEST_CASE("deterministic output") {
  std::mt19937 rng(1);
  CMatrix a = random_matrix(30, rng);
  a = (a + a.transpose()).eval();
  const linalg::EigenSystem e1 = linalg::eigensystem(a);
  const linalg::EigenSystem e2 = linalg::eigensystem(a);
  CHECK(e1.values == e2.values);
  CHECK(e1.vectors == e2.vectors);
}

TEST_CASE("non-convergence is reported with an index") {
  std::mt19937 rng(2);
  const CMatrix a = random_matrix(10, rng);
  const linalg::Hessenberg hs = linalg::hessenberg(a);
  try {
    linalg::hessenberg_eigenvalues(hs.h, 0);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.index() == 9);
  }
}

TEST_CASE("invalid input") {
  CHECK_THROWS_AS(linalg::eigenvalues(CMatrix::Zero(2, 3)), InvalidArgument);
  CMatrix bad = CMatrix::Identity(2, 2);
  bad(0, 1) = cplx(NAN, 0.0);
  CHECK_THROWS_AS(linalg::eigensystem(bad), InvalidArgument);
}
