#include "flocert/fock.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "flocert/errors.hpp"
#include "flocert/linalg.hpp"

namespace flocert::fock {

namespace {

// Signed-permutation form of a Majorana operator: |j> -> phase[j] |perm[j]>.
// Every Majorana monomial stays in this form, which keeps the tilde expansion
// over 4^d monomials cheap.
struct SparseOp {
  std::vector<int> perm;
  std::vector<Complex> phase;
};

SparseOp sparse_majorana(int k, int d) {
  const int n = dim(d);
  const int mode = (k + 1) / 2;
  const bool real_part = (k % 2 == 1);  // c_{2m-1} vs c_{2m}
  SparseOp op;
  op.perm.resize(n);
  op.phase.resize(n);
  for (int j = 0; j < n; ++j) {
    int lower = j & ((1 << (mode - 1)) - 1);
    double string_sign = (__builtin_popcount(lower) % 2 == 0) ? 1.0 : -1.0;
    op.perm[j] = j ^ (1 << (mode - 1));
    if (real_part) {
      op.phase[j] = string_sign;
    } else {
      // i(a - a^dagger): +i on occupied, -i on empty.
      op.phase[j] = occupation(j, mode) ? Complex(0, string_sign)
                                        : Complex(0, -string_sign);
    }
  }
  return op;
}

ComplexMatrix dense_from_sparse(const SparseOp& op) {
  const int n = static_cast<int>(op.perm.size());
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) m(op.perm[j], j) = op.phase[j];
  return m;
}

struct ModeCache {
  std::vector<SparseOp> sparse;       // 2d entries
  std::vector<ComplexMatrix> dense;   // 2d entries
};

const ModeCache& cache_for(int d) {
  static std::map<int, ModeCache> caches;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = caches.find(d);
  if (it == caches.end()) {
    ModeCache c;
    for (int k = 1; k <= 2 * d; ++k) {
      c.sparse.push_back(sparse_majorana(k, d));
      c.dense.push_back(dense_from_sparse(c.sparse.back()));
    }
    it = caches.emplace(d, std::move(c)).first;
  }
  return it->second;
}

void check_mode_count(int d) {
  if (d < 1 || d > 8) throw IndexOutOfRange("mode count must be in 1..8");
}

}  // namespace

ComplexMatrix annihilation(int k, int d) {
  check_mode_count(d);
  if (k < 1 || k > d) throw IndexOutOfRange("annihilation: bad mode index");
  const auto& c = cache_for(d);
  // c_{2k-1} = a + a^dagger, c_{2k} = i(a - a^dagger)  =>  a = (c1 - i c2)/2.
  return (c.dense[2 * k - 2] - Complex(0, 1) * c.dense[2 * k - 1]) / 2.0;
}

const ComplexMatrix& majorana(int k, int d) {
  check_mode_count(d);
  if (k < 1 || k > 2 * d)
    throw IndexOutOfRange("majorana: index must be in 1..2d");
  return cache_for(d).dense[k - 1];
}

ComplexMatrix parity_q(int d) {
  check_mode_count(d);
  const int n = dim(d);
  ComplexMatrix q = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j)
    q(j, j) = (excitation_count(j) % 2 == 0) ? 1.0 : -1.0;
  return q;
}

ComplexMatrix parity_projector(int d, Sector sector) {
  const double sign = (sector == Sector::Even) ? 1.0 : -1.0;
  const int n = dim(d);
  return (ComplexMatrix::Identity(n, n) + sign * parity_q(d)) / 2.0;
}

std::vector<int> sector_indices(int d, Sector sector) {
  std::vector<int> idx;
  const int want = (sector == Sector::Even) ? 0 : 1;
  for (int j = 0; j < dim(d); ++j)
    if (excitation_count(j) % 2 == want) idx.push_back(j);
  return idx;
}

ComplexMatrix restrict_to_sector(const ComplexMatrix& x, int d, Sector sector,
                                 double tol) {
  const auto idx = sector_indices(d, sector);
  const auto other = sector_indices(
      d, sector == Sector::Even ? Sector::Odd : Sector::Even);
  double leak = 0.0;
  for (int a : other)
    for (int b = 0; b < dim(d); ++b)
      leak = std::max({leak, std::abs(x(a, b)), std::abs(x(b, a))});
  if (leak > tol)
    throw MixedSector("operator has support outside the requested sector");
  ComplexMatrix block(idx.size(), idx.size());
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = 0; j < idx.size(); ++j) block(i, j) = x(idx[i], idx[j]);
  return block;
}

ComplexMatrix embed_sector(const ComplexMatrix& block, int d, Sector sector) {
  const auto idx = sector_indices(d, sector);
  ComplexMatrix full = ComplexMatrix::Zero(dim(d), dim(d));
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = 0; j < idx.size(); ++j) full(idx[i], idx[j]) = block(i, j);
  return full;
}

ComplexVector embed_sector(const ComplexVector& vec, int d, Sector sector) {
  const auto idx = sector_indices(d, sector);
  ComplexVector full = ComplexVector::Zero(dim(d));
  for (size_t i = 0; i < idx.size(); ++i) full(idx[i]) = vec(i);
  return full;
}

ComplexVector restrict_vector(const ComplexVector& psi, int d, Sector sector,
                              double tol) {
  const auto other = sector_indices(
      d, sector == Sector::Even ? Sector::Odd : Sector::Even);
  for (int a : other)
    if (std::abs(psi(a)) > tol)
      throw MixedSector("state has support outside the requested sector");
  const auto idx = sector_indices(d, sector);
  ComplexVector out(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) out(i) = psi(idx[i]);
  return out;
}

double sector_weight(const ComplexMatrix& rho, int d, Sector sector) {
  double w = 0.0;
  for (int j : sector_indices(d, sector)) w += rho(j, j).real();
  return w;
}

ComplexMatrix tilde(const ComplexMatrix& x, int d, double tol) {
  check_mode_count(d);
  const int n = dim(d);
  if (x.rows() != n || x.cols() != n)
    throw IndexOutOfRange("tilde: matrix dimension does not match mode count");
  {
    ComplexMatrix q = parity_q(d);
    if (linalg::max_abs(ComplexMatrix(x * q - q * x)) > tol)
      throw NotEven("tilde: operator does not commute with the parity Q");
  }
  const auto& cache = cache_for(d);
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  std::vector<int> perm(n);
  std::vector<Complex> phase(n);
  const unsigned masks = 1u << (2 * d);
  for (unsigned mask = 0; mask < masks; ++mask) {
    for (int j = 0; j < n; ++j) {
      perm[j] = j;
      phase[j] = 1.0;
    }
    // c_S = c_{s1}...c_{sm} with ascending indices; rightmost acts first.
    for (int k = 2 * d; k >= 1; --k) {
      if (!(mask & (1u << (k - 1)))) continue;
      const SparseOp& op = cache.sparse[k - 1];
      for (int j = 0; j < n; ++j) {
        phase[j] *= op.phase[perm[j]];
        perm[j] = op.perm[perm[j]];
      }
    }
    Complex coeff = 0.0;  // Tr(c_S^dagger X) / 2^d
    for (int j = 0; j < n; ++j) coeff += std::conj(phase[j]) * x(perm[j], j);
    coeff /= static_cast<double>(n);
    if (std::abs(coeff) == 0.0) continue;
    const Complex conj_coeff = std::conj(coeff);
    for (int j = 0; j < n; ++j) out(perm[j], j) += conj_coeff * phase[j];
  }
  return out;
}

ComplexVector a8_state() {
  const int d = 4;
  const int n = dim(d);
  auto c = [&](int k) -> const ComplexMatrix& { return majorana(k, d); };
  ComplexMatrix s1 = c(1) * c(2) * c(3) * c(4);
  ComplexMatrix s2 = c(3) * c(4) * c(5) * c(6);
  ComplexMatrix s3 = c(1) * c(3) * c(5) * c(7);
  ComplexMatrix id = ComplexMatrix::Identity(n, n);
  ComplexMatrix proj =
      (id + s1) * (id + s2) * (id + s3) * (id + parity_q(d)) / 16.0;
  auto [vals, vecs] = linalg::eigh(proj, 1e-9);
  ComplexVector psi = vecs.col(n - 1);
  if (std::abs(vals(n - 1) - 1.0) > 1e-9)
    throw Error("a8_state: stabilizer projector is not rank one");
  // Deterministic phase: largest-magnitude amplitude made real positive.
  int imax = 0;
  for (int j = 1; j < n; ++j)
    if (std::abs(psi(j)) > std::abs(psi(imax))) imax = j;
  psi *= std::conj(psi(imax)) / std::abs(psi(imax));
  return psi;
}

ComplexMatrix depolarized_a8(double p) {
  if (p < 0.0 || p > 1.0) throw OutOfRange("depolarized_a8: p must be in [0,1]");
  ComplexVector a8 = a8_state();
  const int n = dim(4);
  return (1.0 - p) * (a8 * a8.adjoint()) +
         (p / n) * ComplexMatrix::Identity(n, n);
}

RealMatrix correlation_from_state(const ComplexMatrix& rho, int d,
                                  double tol) {
  check_mode_count(d);
  const auto& cache = cache_for(d);
  RealMatrix m = RealMatrix::Zero(2 * d, 2 * d);
  for (int a = 1; a <= 2 * d; ++a) {
    for (int b = a + 1; b <= 2 * d; ++b) {
      // [c_a, c_b] = 2 c_a c_b for a != b.
      ComplexMatrix prod = cache.dense[a - 1] * cache.dense[b - 1];
      Complex value = Complex(0, 1) * (prod.transpose().cwiseProduct(rho)).sum();
      if (std::abs(value.imag()) > tol)
        throw NotEven("correlation_from_state: complex correlation entry");
      m(a - 1, b - 1) = value.real();
      m(b - 1, a - 1) = -value.real();
    }
  }
  return m;
}

RealMatrix correlation_from_state(const ComplexVector& psi, int d,
                                  double tol) {
  check_mode_count(d);
  const auto& cache = cache_for(d);
  RealMatrix m = RealMatrix::Zero(2 * d, 2 * d);
  std::vector<ComplexVector> applied(2 * d);
  for (int k = 0; k < 2 * d; ++k) applied[k] = cache.dense[k] * psi;
  for (int a = 0; a < 2 * d; ++a) {
    for (int b = a + 1; b < 2 * d; ++b) {
      Complex value = Complex(0, 1) * (applied[a].adjoint() * applied[b])(0);
      // c_a^dagger = c_a, so <psi|c_a c_b|psi> = (c_a psi)^dagger (c_b psi).
      if (std::abs(value.imag()) > tol)
        throw NotEven("correlation_from_state: complex correlation entry");
      m(a, b) = value.real();
      m(b, a) = -value.real();
    }
  }
  return m;
}

ComplexVector vacuum_state(int d) {
  check_mode_count(d);
  ComplexVector psi = ComplexVector::Zero(dim(d));
  psi(0) = 1.0;
  return psi;
}

}  // namespace flocert::fock
