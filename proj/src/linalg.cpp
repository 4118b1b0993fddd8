#include "linalg.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "error.hpp"

namespace nhqm::linalg {
namespace {

using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

inline double abs1(cplx z) { return std::abs(z.real()) + std::abs(z.imag()); }

struct Givens {
  double c = 1.0;
  cplx s = 0.0;
  cplx r = 0.0;
};

// [c s; -conj(s) c] [a; b] = [r; 0]
Givens make_givens(cplx a, cplx b) {
  Givens g;
  if (b == cplx(0.0)) {
    g.r = a;
    return g;
  }
  const double na = std::abs(a);
  const double nb = std::abs(b);
  if (na == 0.0) {
    g.c = 0.0;
    g.s = std::conj(b) / nb;
    g.r = nb;
    return g;
  }
  const double norm = std::hypot(na, nb);
  const cplx phase = a / na;
  g.c = na / norm;
  g.s = phase * std::conj(b) / norm;
  g.r = phase * norm;
  return g;
}

// Shift from the trailing 2x2 block [[a, b], [c, d]] closest to d.
cplx wilkinson_shift(cplx a, cplx b, cplx c, cplx d) {
  cplx t = d;
  const cplx u = std::sqrt(b) * std::sqrt(c);
  double s = abs1(u);
  if (s == 0.0) return t;
  const cplx x = 0.5 * (a - d);
  const double sx = abs1(x);
  s = std::max(s, sx);
  cplx y = s * std::sqrt((x / s) * (x / s) + (u / s) * (u / s));
  if (sx > 0.0) {
    const cplx xs = x / sx;
    if (xs.real() * y.real() + xs.imag() * y.imag() < 0.0) y = -y;
  }
  return t - u * (u / (x + y));
}

}  // namespace

double max_abs(const CMatrix& a) { return a.cwiseAbs().maxCoeff(); }

Balanced balance(CMatrix a) {
  const Eigen::Index n = a.rows();
  RVector scale = RVector::Ones(n);
  constexpr double radix = 2.0;
  constexpr double radix2 = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += abs1(a(j, i));
        r += abs1(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix2;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix2;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        scale[i] *= f;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
  return {std::move(a), std::move(scale)};
}

Hessenberg hessenberg(CMatrix a) {
  const Eigen::Index n = a.rows();
  std::vector<CVector> reflectors;
  reflectors.reserve(static_cast<std::size_t>(std::max<Eigen::Index>(n - 2, 0)));
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    const Eigen::Index m = n - k - 1;
    CVector v = a.col(k).segment(k + 1, m);
    const double xnorm = v.norm();
    if (xnorm == 0.0) {
      reflectors.emplace_back(CVector::Zero(m));
      continue;
    }
    const cplx x0 = v[0];
    const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx(1.0);
    const cplx alpha = -phase * xnorm;
    v[0] -= alpha;
    v.normalize();

    auto left = a.block(k + 1, k, m, n - k);
    const Eigen::Matrix<cplx, 1, Eigen::Dynamic> w = v.adjoint() * left;
    left.noalias() -= 2.0 * v * w;
    auto right = a.block(0, k + 1, n, m);
    const CVector u = right * v;
    right.noalias() -= 2.0 * u * v.adjoint();

    a(k + 1, k) = alpha;
    a.col(k).segment(k + 2, m - 1).setZero();
    reflectors.push_back(std::move(v));
  }

  CMatrix q = CMatrix::Identity(n, n);
  for (Eigen::Index k = static_cast<Eigen::Index>(reflectors.size()) - 1; k >= 0; --k) {
    const CVector& v = reflectors[static_cast<std::size_t>(k)];
    const Eigen::Index m = v.size();
    auto block = q.block(k + 1, k + 1, m, m);
    const Eigen::Matrix<cplx, 1, Eigen::Dynamic> w = v.adjoint() * block;
    block.noalias() -= 2.0 * v * w;
  }
  return {std::move(a), std::move(q)};
}

CVector hessenberg_eigenvalues(CMatrix h, int max_iterations_per_value) {
  const Eigen::Index n = h.rows();
  CVector w(n);
  Eigen::Index hi = n - 1;
  int iter = 0;
  while (hi >= 0) {
    // Find the start of the active unreduced block.
    Eigen::Index lo = hi;
    for (; lo > 0; --lo) {
      double s = abs1(h(lo - 1, lo - 1)) + abs1(h(lo, lo));
      if (s == 0.0) {
        s = abs1(h(lo, lo - 1));
        if (lo + 1 <= hi) s += abs1(h(lo + 1, lo));
        if (lo >= 2) s += abs1(h(lo - 1, lo - 2));
      }
      if (abs1(h(lo, lo - 1)) <= kEps * s) {
        h(lo, lo - 1) = 0.0;
        break;
      }
    }
    if (lo == hi) {
      w[hi] = h(hi, hi);
      --hi;
      iter = 0;
      continue;
    }
    if (iter >= max_iterations_per_value)
      throw ConvergenceError(static_cast<std::size_t>(hi),
                             "QR iteration did not converge for eigenvalue index " + std::to_string(hi));

    cplx shift;
    if (iter == 10) {
      shift = h(lo, lo) + 0.75 * std::abs(h(lo + 1, lo).real());
    } else if (iter == 20) {
      shift = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1).real());
    } else {
      shift = wilkinson_shift(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
    }

    // One implicit bulge chase across [lo, hi]. Only the active window is
    // updated since the Schur vectors are not needed.
    cplx x = h(lo, lo) - shift;
    cplx y = h(lo + 1, lo);
    for (Eigen::Index k = lo; k < hi; ++k) {
      if (k > lo) {
        x = h(k, k - 1);
        y = h(k + 1, k - 1);
      }
      const Givens g = make_givens(x, y);
      if (k > lo) {
        h(k, k - 1) = g.r;
        h(k + 1, k - 1) = 0.0;
      }
      const cplx sc = std::conj(g.s);
      for (Eigen::Index j = k; j <= hi; ++j) {
        const cplx a = h(k, j);
        const cplx b = h(k + 1, j);
        h(k, j) = g.c * a + g.s * b;
        h(k + 1, j) = -sc * a + g.c * b;
      }
      const Eigen::Index last = std::min(k + 2, hi);
      for (Eigen::Index i = lo; i <= last; ++i) {
        const cplx a = h(i, k);
        const cplx b = h(i, k + 1);
        h(i, k) = g.c * a + sc * b;
        h(i, k + 1) = -g.s * a + g.c * b;
      }
    }
    ++iter;
  }
  return w;
}

CMatrix inverse_iteration(const CMatrix& h, const CVector& values) {
  const Eigen::Index n = h.rows();
  CMatrix vectors(n, values.size());
  if (n == 0) return vectors;

  double hnorm = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i <= std::min(j + 1, n - 1); ++i) col += abs1(h(i, j));
    hnorm = std::max(hnorm, col);
  }
  if (hnorm == 0.0) hnorm = 1.0;
  const double eps3 = kEps * hnorm;
  const double degenerate = 1e3 * eps3;

  const RowMatrix base = h;
  RowMatrix lu(n, n);
  std::vector<cplx> multipliers(static_cast<std::size_t>(n));
  std::vector<char> swapped(static_cast<std::size_t>(n));
  std::vector<cplx> used;
  used.reserve(static_cast<std::size_t>(values.size()));
  CVector b(n);
  CVector x(n);

  for (Eigen::Index idx = 0; idx < values.size(); ++idx) {
    // Separate numerically equal eigenvalues so each solve is distinct.
    cplx lambda = values[idx];
    for (bool clash = true; clash;) {
      clash = false;
      for (const cplx& prev : used) {
        if (abs1(prev - lambda) < eps3) {
          lambda += eps3;
          clash = true;
        }
      }
    }
    used.push_back(lambda);

    lu = base;
    for (Eigen::Index i = 0; i < n; ++i) lu(i, i) -= lambda;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      swapped[kk] = 0;
      if (abs1(lu(k + 1, k)) > abs1(lu(k, k))) {
        lu.row(k).segment(k, n - k).swap(lu.row(k + 1).segment(k, n - k));
        swapped[kk] = 1;
      }
      if (lu(k, k) == cplx(0.0)) lu(k, k) = eps3;
      const cplx m = lu(k + 1, k) / lu(k, k);
      multipliers[kk] = m;
      lu(k + 1, k) = 0.0;
      if (m != cplx(0.0)) lu.row(k + 1).segment(k + 1, n - k - 1) -= m * lu.row(k).segment(k + 1, n - k - 1);
    }
    if (lu(n - 1, n - 1) == cplx(0.0)) lu(n - 1, n - 1) = eps3;

    // Vectors already computed for numerically degenerate eigenvalues.
    std::vector<Eigen::Index> cluster;
    for (Eigen::Index j = 0; j < idx; ++j)
      if (abs1(used[static_cast<std::size_t>(j)] - lambda) < degenerate) cluster.push_back(j);

    b.setOnes();
    for (int it = 0; it < 3; ++it) {
      if (it > 0) {
        for (Eigen::Index k = 0; k + 1 < n; ++k) {
          const auto kk = static_cast<std::size_t>(k);
          if (swapped[kk]) std::swap(b[k], b[k + 1]);
          b[k + 1] -= multipliers[kk] * b[k];
        }
      }
      for (Eigen::Index i = n - 1; i >= 0; --i) {
        cplx s = b[i];
        if (i + 1 < n) s -= lu.row(i).segment(i + 1, n - i - 1).transpose().cwiseProduct(x.segment(i + 1, n - i - 1)).sum();
        x[i] = s / lu(i, i);
      }
      for (Eigen::Index j : cluster) {
        const auto vj = vectors.col(j);
        x -= vj * vj.dot(x);
      }
      const double nrm = x.norm();
      if (!(nrm > 0.0) || !std::isfinite(nrm))
        throw NumericalError("inverse iteration broke down for eigenvalue index " + std::to_string(idx));
      x /= nrm;
      b = x;
    }
    vectors.col(idx) = x;
  }
  return vectors;
}

CVector eigenvalues(const CMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("eigenvalues: matrix must be square");
  if (!a.allFinite()) throw InvalidArgument("eigenvalues: matrix has non-finite entries");
  Balanced bal = balance(a);
  Hessenberg hs = hessenberg(std::move(bal.matrix));
  return hessenberg_eigenvalues(std::move(hs.h));
}

EigenSystem eigensystem(const CMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("eigensystem: matrix must be square");
  if (!a.allFinite()) throw InvalidArgument("eigensystem: matrix has non-finite entries");
  Balanced bal = balance(a);
  Hessenberg hs = hessenberg(std::move(bal.matrix));
  CVector values = hessenberg_eigenvalues(hs.h);
  const CMatrix y = inverse_iteration(hs.h, values);
  CMatrix vectors = hs.q * y;
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    vectors.col(j) = bal.scale.asDiagonal() * vectors.col(j);
    vectors.col(j).normalize();
  }
  return {std::move(values), std::move(vectors)};
}

}  // namespace nhqm::linalg
