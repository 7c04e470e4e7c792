#include "flocert/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "flocert/errors.hpp"

namespace flocert::linalg {

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double max_abs(const RealMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

EighResult eigh(const ComplexMatrix& h, double tol) {
  if (h.rows() != h.cols()) throw NotHermitian("eigh: matrix is not square");
  if (max_abs(ComplexMatrix(h - h.adjoint())) > tol)
    throw NotHermitian("eigh: matrix is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
      (h + h.adjoint()) / 2.0);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix sqrt_psd(const ComplexMatrix& a) {
  auto [vals, vecs] = eigh(a);
  if (vals.size() > 0 && vals.minCoeff() < -1e-8)
    throw NotPsd("sqrt_psd: eigenvalue below -1e-8");
  // Clip eigenvalues at the round-off floor: sqrt turns O(eps) noise on an
  // exactly-zero eigenvalue into O(sqrt(eps)) entries otherwise.
  const double floor =
      vals.size() > 0 ? 1e-14 * std::max(vals.maxCoeff(), 0.0) : 0.0;
  RealVector roots =
      (vals.array() < floor)
          .select(RealVector::Zero(vals.size()), vals)
          .cwiseMax(0.0)
          .cwiseSqrt();
  return vecs * roots.asDiagonal() * vecs.adjoint();
}

TakagiResult takagi(const ComplexMatrix& s, double tol) {
  const Eigen::Index n = s.rows();
  if (s.cols() != n) throw NotSymmetric("takagi: matrix is not square");
  if (max_abs(ComplexMatrix(s - s.transpose())) > tol)
    throw NotSymmetric("takagi: matrix is not symmetric within tolerance");

  // Real symmetric embedding: with S = P + iQ, the eigenpairs of
  // B = [[P, Q], [Q, -P]] at eigenvalue sigma are exactly the con-eigenpairs
  // S conj(u) = sigma u with u = x + iy.
  RealMatrix b(2 * n, 2 * n);
  b.topLeftCorner(n, n) = s.real();
  b.topRightCorner(n, n) = s.imag();
  b.bottomLeftCorner(n, n) = s.imag();
  b.bottomRightCorner(n, n) = -s.real();
  b = (b + RealMatrix(b.transpose())) / 2.0;
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(b);
  const RealVector& evals = solver.eigenvalues();
  const RealMatrix& evecs = solver.eigenvectors();

  const double sigma_max = evals.size() ? evals.cwiseAbs().maxCoeff() : 0.0;
  const double zero_tol = std::max(1e-13, 1e-12 * sigma_max);

  struct Pair {
    double sigma;
    ComplexVector u;
  };
  std::vector<Pair> positive;
  std::vector<ComplexVector> zero_candidates;
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    ComplexVector u =
        evecs.col(i).head(n) + Complex(0, 1) * evecs.col(i).tail(n);
    if (evals(i) > zero_tol) {
      positive.push_back({evals(i), u});
    } else if (std::abs(evals(i)) <= zero_tol) {
      zero_candidates.push_back(u);
    }
  }
  std::sort(positive.begin(), positive.end(),
            [](const Pair& a, const Pair& b) { return a.sigma > b.sigma; });

  TakagiResult out;
  out.u.resize(n, n);
  out.d.resize(n);
  Eigen::Index col = 0;
  for (const Pair& p : positive) {
    out.u.col(col) = p.u;
    out.d(col) = p.sigma;
    ++col;
  }
  // The con-kernel is closed under complex linear combinations, so a plain
  // Gram-Schmidt over the 2k real candidates yields the k missing columns.
  for (const ComplexVector& cand : zero_candidates) {
    if (col >= n) break;
    ComplexVector u = cand;
    for (Eigen::Index j = 0; j < col; ++j)
      u -= out.u.col(j) * (out.u.col(j).adjoint() * u)(0);
    double norm = u.norm();
    if (norm > 1e-7) {
      out.u.col(col) = u / norm;
      out.d(col) = 0.0;
      ++col;
    }
  }
  if (col != n) throw Error("takagi: failed to assemble a unitary factor");
  return out;
}

RealMatrix expm_antisym(const RealMatrix& h, double scale) {
  const Eigen::Index n = h.rows();
  if (h.cols() != n)
    throw NotAntisymmetric("expm_antisym: matrix is not square");
  if (max_abs(RealMatrix(h + h.transpose())) > 1e-12)
    throw NotAntisymmetric("expm_antisym: matrix is not antisymmetric");
  // i*h is Hermitian, so exp(scale*h) = V exp(-i*scale*lambda) V^dagger.
  ComplexMatrix ih = Complex(0, 1) * h.cast<Complex>();
  auto [vals, vecs] = eigh(ih, 1e-9);
  ComplexVector phases(n);
  for (Eigen::Index i = 0; i < n; ++i)
    phases(i) = std::exp(Complex(0, -scale * vals(i)));
  ComplexMatrix r = vecs * phases.asDiagonal() * vecs.adjoint();
  return r.real();
}

RealMatrix random_orthogonal(int n, Rng& rng) {
  if (n <= 0) throw OutOfRange("random_orthogonal: n must be positive");
  std::normal_distribution<double> gauss(0.0, 1.0);
  RealMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<RealMatrix> qr(g);
  RealMatrix q = qr.householderQ();
  RealVector diag = qr.matrixQR().diagonal();
  for (int i = 0; i < n; ++i)
    if (diag(i) < 0) q.col(i) = -q.col(i);
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

}  // namespace flocert::linalg
