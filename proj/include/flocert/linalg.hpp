#pragma once

#include "flocert/types.hpp"

namespace flocert::linalg {

struct EighResult {
  RealVector eigenvalues;    // ascending
  ComplexMatrix eigenvectors;  // columns, unitary
};

/// Hermitian eigendecomposition, H = V diag(lambda) V^dagger.
/// Throws NotHermitian if the input deviates from Hermiticity by more than
/// `tol` in max-abs sense.
EighResult eigh(const ComplexMatrix& h, double tol = 1e-10);

/// Hermitian PSD square root: returns B with B*B = A. Eigenvalues in
/// [-1e-8, 0) are clipped to zero, anything more negative throws NotPsd.
ComplexMatrix sqrt_psd(const ComplexMatrix& a);

struct TakagiResult {
  ComplexMatrix u;  // unitary
  RealVector d;     // non-increasing, nonnegative; singular values of S
};

/// Takagi factorisation of a complex symmetric matrix, S = U diag(d) U^T.
TakagiResult takagi(const ComplexMatrix& s, double tol = 1e-10);

/// exp(scale*h) for real antisymmetric h; the result is special orthogonal.
RealMatrix expm_antisym(const RealMatrix& h, double scale = 1.0);

/// Haar-like random special orthogonal matrix (QR of a Gaussian sample with
/// the usual sign fix, determinant forced to +1 by flipping one column).
RealMatrix random_orthogonal(int n, Rng& rng);

/// Max-abs-entry norm, the structural-check metric used throughout.
double max_abs(const ComplexMatrix& m);
double max_abs(const RealMatrix& m);

}  // namespace flocert::linalg
