#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "flocert/gaussian.hpp"
#include "flocert/types.hpp"

namespace flocert::certifier {

/// Sector antiunitary theta: theta(psi) = V conj(psi) on the 8-dimensional
/// sector basis of Fock(C^4). V is a real signed permutation implementing the
/// excitation-hole duality; it commutes with every quadratic c_i c_j and
/// squares to the identity.
struct ThetaMap {
  Sector sector;
  ComplexMatrix v;  // 8x8
  ComplexVector apply(const ComplexVector& sector_vec) const {
    return v * sector_vec.conjugate();
  }
};

ThetaMap theta(Sector sector);

/// Full-space 16x16 signed permutation T with theta(psi) = T conj(psi);
/// preserves both parity sectors.
const RealMatrix& theta_full();

ComplexVector theta_apply(const ComplexVector& psi16);
ComplexMatrix theta_conjugate(const ComplexMatrix& x16);  // theta X theta

/// |<psi|theta psi>| for a normalized definite-parity four-mode state.
double concurrence_pure(const ComplexVector& psi16, double tol = 1e-10);

struct MixedConcurrence {
  double c = 0.0;
  RealVector lambdas;  // non-increasing square roots of eig(sqrt(rho) rho~ sqrt(rho))
};

/// Generalized concurrence of a PSD operator supported on one parity sector
/// (8x8 sector block, possibly subnormalized).
MixedConcurrence concurrence_mixed(const ComplexMatrix& rho_sector,
                                   Sector sector);

struct GaussianComponent {
  double weight = 0.0;          // subnormalized: weights sum to tr(rho_sector)
  ComplexVector state;          // normalized 16-dim vector
  gaussian::CorrelationMatrix correlation;
  Sector sector = Sector::Even;
};

struct Decomposition {
  double concurrence = 0.0;  // max(0, lambda_1 - sum of the rest)
  RealVector lambdas;
  bool convex_gaussian = false;
  /// Gaussian components when convex_gaussian; otherwise the optimal
  /// equal-concurrence decomposition witnessing C > 0.
  std::vector<GaussianComponent> components;
};

/// Uhlmann-Wooters construction: eigendecomposition, Takagi of the theta
/// overlap matrix, phase balancing and Hadamard mixing. At most 8 components.
Decomposition optimal_decomposition(const ComplexMatrix& rho_sector,
                                    Sector sector,
                                    double verdict_tol = 1e-8);

struct CertificateReport {
  double c_plus = 0.0;
  double c_minus = 0.0;
  bool is_convex_gaussian = false;
  RealVector spectrum_plus;
  RealVector spectrum_minus;
  std::optional<double> f_gauss;
  std::optional<double> distance_lower;
  std::optional<double> distance_upper;
  std::optional<std::vector<GaussianComponent>> decomposition;
};

/// Exact convex-Gaussianity certificate for an even four-mode density
/// operator. Fidelity and distance bounds are reported only for states
/// supported in a single parity sector.
CertificateReport certify(const ComplexMatrix& rho16,
                          bool with_decomposition = false,
                          double verdict_tol = 1e-8);

/// F_Gauss(rho) = 1/2 + 1/2 sqrt(1 - C^2) for rho supported in Fock_+.
double fidelity_gauss(const ComplexMatrix& rho16);

/// Fuchs-van de Graaf bounds (1 - sqrt(F), sqrt(1 - F)).
std::pair<double, double> distance_bounds(const ComplexMatrix& rho16);

/// A convex-Gaussian state achieving F_Gauss(rho): component-wise nearest
/// Gaussian states of the optimal equal-concurrence decomposition.
ComplexMatrix nearest_convex_gaussian(const ComplexMatrix& rho16);

/// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2.
double uhlmann_fidelity(const ComplexMatrix& a, const ComplexMatrix& b);

struct SchmidtResult {
  double a = 0.0;       // in [0, 1/sqrt(2)]
  double p = 0.0;       // (sqrt(1-a^2) - a)/sqrt(2)
  ComplexVector psi1;   // theta-fixed, orthonormal pair
  ComplexVector psi2;
  ComplexVector psi_g;  // Gaussian; psi = sqrt(1-p^2) psi_g + p theta psi_g
};

/// Orbit / generalized Schmidt decomposition of an even pure state.
SchmidtResult schmidt_pure(const ComplexVector& psi16, double tol = 1e-10);

/// Precondition checks for a d=4 even density operator; throws on violation.
void validate_density(const ComplexMatrix& rho16, double tol = 1e-10);

}  // namespace flocert::certifier
