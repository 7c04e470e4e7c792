#include "flocert/gaussian.hpp"

#include <cmath>
#include <vector>

#include "flocert/errors.hpp"
#include "flocert/fock.hpp"
#include "flocert/linalg.hpp"

namespace flocert::gaussian {

namespace {

void check_antisymmetric(const RealMatrix& m, const char* who) {
  if (m.rows() != m.cols() || linalg::max_abs(RealMatrix(m + m.transpose())) > 1e-10)
    throw NotAntisymmetric(std::string(who) + ": matrix is not antisymmetric");
}

}  // namespace

void validate(const CorrelationMatrix& cm, double tol) {
  if (cm.m.rows() != 2 * cm.modes || cm.m.cols() != 2 * cm.modes)
    throw OutOfRange("correlation matrix has wrong dimensions");
  if (linalg::max_abs(RealMatrix(cm.m + cm.m.transpose())) > tol)
    throw NotAntisymmetric("correlation matrix is not antisymmetric");
  Eigen::JacobiSVD<RealMatrix> svd(cm.m);
  if (svd.singularValues().size() &&
      svd.singularValues().maxCoeff() > 1.0 + 1e-9)
    throw OutOfRange("correlation matrix has singular value above 1");
}

CorrelationMatrix vacuum_correlation(int d) {
  return fock_basis_correlation(d, 0);
}

CorrelationMatrix fock_basis_correlation(int d, int index) {
  if (d < 1) throw OutOfRange("mode count must be positive");
  CorrelationMatrix cm{d, RealMatrix::Zero(2 * d, 2 * d)};
  for (int k = 0; k < d; ++k) {
    double sign = ((index >> k) & 1) ? -1.0 : 1.0;
    cm.m(2 * k, 2 * k + 1) = sign;
    cm.m(2 * k + 1, 2 * k) = -sign;
  }
  return cm;
}

GaussianityCheck is_gaussian_pure(const CorrelationMatrix& cm, double tol) {
  const int n = 2 * cm.modes;
  double residual = linalg::max_abs(
      RealMatrix(cm.m * cm.m.transpose() - RealMatrix::Identity(n, n)));
  return {residual <= tol, residual};
}

CorrelationMatrix evolve(const CorrelationMatrix& cm, const RealMatrix& h,
                         double t) {
  check_antisymmetric(h, "evolve");
  if (h.rows() != 2 * cm.modes)
    throw OutOfRange("evolve: Hamiltonian dimension mismatch");
  RealMatrix r = linalg::expm_antisym(h, 4.0 * t);
  return {cm.modes, r * cm.m * r.transpose()};
}

CorrelationMatrix evolve_support(const CorrelationMatrix& cm,
                                 const std::vector<int>& support,
                                 const RealMatrix& h_sub, double t) {
  check_antisymmetric(h_sub, "evolve_support");
  const int s = static_cast<int>(support.size());
  if (h_sub.rows() != s)
    throw OutOfRange("evolve_support: submatrix dimension mismatch");
  for (int idx : support)
    if (idx < 0 || idx >= 2 * cm.modes)
      throw OutOfRange("evolve_support: Majorana index out of range");
  RealMatrix r = linalg::expm_antisym(h_sub, 4.0 * t);
  CorrelationMatrix out = cm;
  const int n = 2 * cm.modes;
  // Rows, then columns: M -> E M E^T where E is identity off the support.
  RealMatrix rows(s, n);
  for (int i = 0; i < s; ++i) rows.row(i) = cm.m.row(support[i]);
  rows = r * rows;
  for (int i = 0; i < s; ++i) out.m.row(support[i]) = rows.row(i);
  RealMatrix cols(n, s);
  for (int i = 0; i < s; ++i) cols.col(i) = out.m.col(support[i]);
  cols = cols * r.transpose();
  for (int i = 0; i < s; ++i) out.m.col(support[i]) = cols.col(i);
  return out;
}

namespace {

MeasurementResult apply_outcome(const CorrelationMatrix& cm, int k,
                                int outcome, double probability) {
  const int a = 2 * k - 2;
  const int b = 2 * k - 1;
  const double lambda = (outcome == 0) ? 1.0 : -1.0;
  const double denom = 1.0 + lambda * cm.m(a, b);
  MeasurementResult res;
  res.outcome = outcome;
  res.probability = probability;
  if (probability < 1e-12) {
    res.state = cm;  // unspecified; callers prune zero-probability branches
    return res;
  }
  const int n = 2 * cm.modes;
  RealVector col_a = cm.m.col(a);
  RealVector col_b = cm.m.col(b);
  RealMatrix updated =
      cm.m + (lambda / denom) * (col_b * col_a.transpose() -
                                 col_a * col_b.transpose());
  updated.row(a).setZero();
  updated.row(b).setZero();
  updated.col(a).setZero();
  updated.col(b).setZero();
  updated(a, b) = lambda;
  updated(b, a) = -lambda;
  res.state = {cm.modes, std::move(updated)};
  return res;
}

}  // namespace

MeasurementResult measure_mode(const CorrelationMatrix& cm, int k, Rng& rng) {
  if (k < 1 || k > cm.modes) throw IndexOutOfRange("measure_mode: bad mode");
  const double p0 =
      std::clamp(0.5 * (1.0 + cm.m(2 * k - 2, 2 * k - 1)), 0.0, 1.0);
  int outcome;
  if (p0 < 1e-12) {
    outcome = 1;
  } else if (1.0 - p0 < 1e-12) {
    outcome = 0;
  } else {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    outcome = (unif(rng) < p0) ? 0 : 1;
  }
  return apply_outcome(cm, k, outcome, outcome == 0 ? p0 : 1.0 - p0);
}

MeasurementResult measure_mode_forced(const CorrelationMatrix& cm, int k,
                                      int outcome) {
  if (k < 1 || k > cm.modes) throw IndexOutOfRange("measure_mode: bad mode");
  if (outcome != 0 && outcome != 1)
    throw OutOfRange("measure_mode_forced: outcome must be a bit");
  const double p0 =
      std::clamp(0.5 * (1.0 + cm.m(2 * k - 2, 2 * k - 1)), 0.0, 1.0);
  return apply_outcome(cm, k, outcome, outcome == 0 ? p0 : 1.0 - p0);
}

CorrelationMatrix random_pure_gaussian(int d, Rng& rng, Sector parity) {
  CorrelationMatrix ref = (parity == Sector::Even)
                              ? vacuum_correlation(d)
                              : fock_basis_correlation(d, 1);
  RealMatrix r = linalg::random_orthogonal(2 * d, rng);
  return {d, r * ref.m * r.transpose()};
}

namespace {

struct PlaneRotation {
  int p, q;      // 0-based Majorana indices, p < q
  double angle;  // A_pp = cos, A_pq = -sin, A_qp = sin, A_qq = cos
};

// Factor a special orthogonal matrix into plane rotations (leftmost first),
// so that r = A(rot[0]) * A(rot[1]) * ...
std::vector<PlaneRotation> givens_factor(RealMatrix r) {
  const int n = static_cast<int>(r.rows());
  std::vector<PlaneRotation> reduction;  // applied to r from the left
  for (int j = 0; j < n - 1; ++j) {
    for (int i = j + 1; i < n; ++i) {
      double x = r(j, j), y = r(i, j);
      double norm = std::hypot(x, y);
      if (norm < 1e-15 || std::abs(y) < 1e-15) continue;
      double c = x / norm, s = y / norm;
      // Rotate rows (j, i): row_j' = c row_j + s row_i; this is A(j,i,phi)
      // with cos(phi) = c, -sin(phi) = s.
      RealVector row_j = r.row(j);
      RealVector row_i = r.row(i);
      r.row(j) = (c * row_j + s * row_i).transpose();
      r.row(i) = (-s * row_j + c * row_i).transpose();
      reduction.push_back({j, i, std::atan2(-s, c)});
    }
  }
  // Orthogonal upper triangular is diagonal with entries +-1; det +1 means
  // an even number of -1, fixed up in pairs by pi rotations.
  std::vector<int> flipped;
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0) flipped.push_back(i);
  for (size_t i = 0; i + 1 < flipped.size(); i += 2)
    reduction.push_back({flipped[i], flipped[i + 1], kPi});
  // product of reductions * r_input = I  =>  r_input = product of inverses
  // in the same order with negated angles.
  std::vector<PlaneRotation> out;
  out.reserve(reduction.size());
  for (const PlaneRotation& g : reduction) out.push_back({g.p, g.q, -g.angle});
  return out;
}

}  // namespace

ComplexVector gaussian_state_vector(const CorrelationMatrix& cm, double tol) {
  const int d = cm.modes;
  if (d > 6) throw TooManyModes("gaussian_state_vector: d must be <= 6");
  auto check = is_gaussian_pure(cm, tol);
  if (!check.pure)
    throw NotGaussian("gaussian_state_vector: correlation matrix is not pure "
                      "Gaussian (residual " + std::to_string(check.residual) + ")");

  // Eigenvectors of the Hermitian iM at eigenvalue +1 give the orthogonal
  // frame: M x = y and M y = -x per mode plane, columns (x, -y).
  const int n = 2 * d;
  ComplexMatrix im = Complex(0, 1) * cm.m.cast<Complex>();
  auto [vals, vecs] = linalg::eigh(im, 1e-8);
  RealMatrix r(n, n);
  int pair = 0;
  for (int i = 0; i < n; ++i) {
    if (vals(i) < 0) continue;
    ComplexVector w = vecs.col(i) * std::sqrt(2.0);
    r.col(2 * pair) = w.real();
    r.col(2 * pair + 1) = -w.imag();
    ++pair;
  }
  if (pair != d) throw NotGaussian("gaussian_state_vector: bad spectrum of iM");

  int ref_index = 0;
  if (r.determinant() < 0) {
    // Odd-parity state: negate one frame column and start from |1,0,...,0>.
    r.col(0) = -r.col(0);
    ref_index = 1;
  }

  std::vector<PlaneRotation> rotations = givens_factor(r);
  ComplexVector psi = ComplexVector::Zero(fock::dim(d));
  psi(ref_index) = 1.0;
  // psi = U(A_1) ... U(A_N) |ref>, rightmost factor applied first; each
  // plane rotation by phi lifts to exp(-(phi/2) c_p c_q).
  for (auto it = rotations.rbegin(); it != rotations.rend(); ++it) {
    const ComplexMatrix& cp = fock::majorana(it->p + 1, d);
    const ComplexMatrix& cq = fock::majorana(it->q + 1, d);
    psi = std::cos(it->angle / 2) * psi -
          std::sin(it->angle / 2) * (cp * (cq * psi));
  }
  return psi;
}

}  // namespace flocert::gaussian
