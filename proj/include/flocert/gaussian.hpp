#pragma once

#include "flocert/types.hpp"

namespace flocert::gaussian {

/// Real antisymmetric 2d x 2d correlation matrix of quadratic Majorana
/// expectations; pure Gaussian iff orthogonal.
struct CorrelationMatrix {
  int modes = 0;
  RealMatrix m;
};

/// Validates antisymmetry and the singular-value bound, throws otherwise.
void validate(const CorrelationMatrix& cm, double tol = 1e-10);

/// Correlation matrix of the Fock vacuum: 2x2 blocks [[0,1],[-1,0]].
CorrelationMatrix vacuum_correlation(int d);

/// Correlation matrix of the Fock basis state with the given occupations
/// (bit k-1 of `index` is the occupation of mode k).
CorrelationMatrix fock_basis_correlation(int d, int index);

struct GaussianityCheck {
  bool pure = false;
  double residual = 0.0;  // max-abs of M M^T - I
};

GaussianityCheck is_gaussian_pure(const CorrelationMatrix& cm,
                                  double tol = 1e-8);

/// Heisenberg update M -> R M R^T with R = exp(4 h t) for the quadratic
/// Hamiltonian H = i sum h_kl c_k c_l (factor pinned by the dense oracle).
CorrelationMatrix evolve(const CorrelationMatrix& cm, const RealMatrix& h,
                         double t);

/// Same update restricted to the Majorana indices in `support` (0-based);
/// h_sub is the antisymmetric submatrix over those indices.
CorrelationMatrix evolve_support(const CorrelationMatrix& cm,
                                 const std::vector<int>& support,
                                 const RealMatrix& h_sub, double t);

struct MeasurementResult {
  int outcome = 0;
  double probability = 1.0;
  CorrelationMatrix state;
};

/// Occupation measurement of mode k on a pure Gaussian state. Samples the
/// outcome (n_k = (I - i c_{2k-1} c_{2k})/2, so prob(s) = (1 + (-1)^s
/// M_{2k-1,2k})/2) and applies the rank-2 update. Outcomes with probability
/// below 1e-12 are never sampled; the certain outcome is taken instead.
MeasurementResult measure_mode(const CorrelationMatrix& cm, int k, Rng& rng);

/// Deterministic variant for branch enumeration: forces `outcome` and reports
/// its probability. Throws DegenerateOutcome via probability 0 handling: a
/// forced outcome with probability < 1e-12 returns probability 0 and an
/// unspecified state.
MeasurementResult measure_mode_forced(const CorrelationMatrix& cm, int k,
                                      int outcome);

/// Random pure Gaussian state of the requested parity:
/// M = R M_ref R^T with R ~ random_orthogonal(2d).
CorrelationMatrix random_pure_gaussian(int d, Rng& rng,
                                       Sector parity = Sector::Even);

/// Lift a pure Gaussian correlation matrix back to a dense state vector by
/// factoring the orthogonal frame into Givens rotations and applying
/// exp(-(phi/2) c_i c_j) to the vacuum (or |1,0,...,0> for odd parity).
ComplexVector gaussian_state_vector(const CorrelationMatrix& cm,
                                    double tol = 1e-8);

}  // namespace flocert::gaussian
