#pragma once

#include <vector>

#include "flocert/types.hpp"

namespace flocert::fock {

/// Fock-space dimension 2^d. Basis ordering is little-endian: the occupation
/// of mode 1 is the least significant bit of the basis index.
inline int dim(int modes) { return 1 << modes; }

inline int occupation(int index, int mode) { return (index >> (mode - 1)) & 1; }
inline int excitation_count(int index) { return __builtin_popcount(index); }

/// Annihilation operator a_k (1-based mode index) in the Jordan-Wigner
/// convention: lowering block on mode k, diag(1,-1) parity factors on modes
/// j < k, identity above.
ComplexMatrix annihilation(int k, int d);

/// Majorana operator c_k, k in 1..2d, with c_{2k-1} = a_k + a_k^dagger and
/// c_{2k} = i(a_k - a_k^dagger). Returns a reference into a per-d cache.
const ComplexMatrix& majorana(int k, int d);

/// Parity operator Q = i^d c_1 ... c_{2d} = diag((-1)^N).
ComplexMatrix parity_q(int d);

/// Sector projector P_± = (I ± Q)/2.
ComplexMatrix parity_projector(int d, Sector sector);

/// Basis indices belonging to a parity sector, ascending.
std::vector<int> sector_indices(int d, Sector sector);

/// Restrict a full-space matrix to the 8x8 (for d=4) sector block. Throws
/// MixedSector if the matrix has support outside the sector.
ComplexMatrix restrict_to_sector(const ComplexMatrix& x, int d, Sector sector,
                                 double tol = 1e-10);

/// Embed a sector block (or sector vector) back into the full space.
ComplexMatrix embed_sector(const ComplexMatrix& block, int d, Sector sector);
ComplexVector embed_sector(const ComplexVector& vec, int d, Sector sector);
ComplexVector restrict_vector(const ComplexVector& psi, int d, Sector sector,
                              double tol = 1e-10);

/// Trace weight of psi or rho inside a sector.
double sector_weight(const ComplexMatrix& rho, int d, Sector sector);

/// Tilde conjugation of an even operator: expand X over the Majorana monomial
/// basis, conjugate every coefficient, reassemble. Involution on even
/// operators. Throws NotEven if X does not commute with Q.
ComplexMatrix tilde(const ComplexMatrix& x, int d, double tol = 1e-10);

/// The four-mode stabilizer state |a_8>: joint +1 eigenvector of
/// S1 = c1c2c3c4, S2 = c3c4c5c6, S3 = c1c3c5c7 and Q. Deterministic phase.
ComplexVector a8_state();

/// rho(p) = (1-p)|a8><a8| + p I/16.
ComplexMatrix depolarized_a8(double p);

/// Correlation matrix M_kl = (i/2) Tr(rho [c_k, c_l]). Throws NotEven when
/// the result fails to be real antisymmetric within tolerance.
RealMatrix correlation_from_state(const ComplexMatrix& rho, int d,
                                  double tol = 1e-10);
RealMatrix correlation_from_state(const ComplexVector& psi, int d,
                                  double tol = 1e-10);

/// Vacuum state |0...0> as a dense vector.
ComplexVector vacuum_state(int d);

}  // namespace flocert::fock
