#pragma once

#include "types.hpp"

// Dense eigenvalue machinery for general complex matrices.
namespace nhqm::linalg {

/// Diagonal similarity D^{-1} A D with power-of-two entries that equalizes
/// row and column norms. Eigenvectors of A are D times those of the result.
struct Balanced {
  CMatrix matrix;
  RVector scale;
};
Balanced balance(CMatrix a);

/// Householder reduction a = q h q^H with h upper Hessenberg.
struct Hessenberg {
  CMatrix h;
  CMatrix q;
};
Hessenberg hessenberg(CMatrix a);

/// Eigenvalues of an upper Hessenberg matrix by implicit single-shift QR.
/// Throws ConvergenceError naming the row that failed to deflate.
CVector hessenberg_eigenvalues(CMatrix h, int max_iterations_per_value = 60);

/// Right eigenvectors of an upper Hessenberg matrix for the given eigenvalues
/// by inverse iteration. Columns are unit 2-norm, in h's coordinates.
CMatrix inverse_iteration(const CMatrix& h, const CVector& values);

struct EigenSystem {
  CVector values;
  CMatrix vectors;  // unit 2-norm right eigenvectors, column j pairs with values[j]
};

CVector eigenvalues(const CMatrix& a);
EigenSystem eigensystem(const CMatrix& a);

/// max |a_ij| over all entries.
double max_abs(const CMatrix& a);

}  // namespace nhqm::linalg
