#include "flocert/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flocert/errors.hpp"
#include "flocert/fock.hpp"
#include "flocert/linalg.hpp"

namespace flocert::certifier {

namespace {

constexpr int kModes = 4;
constexpr int kDim = 16;
constexpr int kSectorDim = 8;

Sector other(Sector s) { return s == Sector::Even ? Sector::Odd : Sector::Even; }

}  // namespace

const RealMatrix& theta_full() {
  // theta |n1 n2 n3 n4> = (-1)^(n2+n4) |complement(n)>. The sign follows from
  // theta|0> = |1111> and the pairwise relation a_k a_l theta = theta
  // a_k^dagger a_l^dagger; it makes theta commute with every c_i c_j.
  static const RealMatrix t = [] {
    RealMatrix m = RealMatrix::Zero(kDim, kDim);
    for (int j = 0; j < kDim; ++j) {
      int sign_bits = ((j >> 1) & 1) + ((j >> 3) & 1);
      m(j ^ 0xF, j) = (sign_bits % 2 == 0) ? 1.0 : -1.0;
    }
    return m;
  }();
  return t;
}

ComplexVector theta_apply(const ComplexVector& psi16) {
  return theta_full().cast<Complex>() * psi16.conjugate();
}

ComplexMatrix theta_conjugate(const ComplexMatrix& x16) {
  const RealMatrix& t = theta_full();
  return t.cast<Complex>() * x16.conjugate() * t.cast<Complex>();
}

ThetaMap theta(Sector sector) {
  const auto idx = fock::sector_indices(kModes, sector);
  ComplexMatrix v(kSectorDim, kSectorDim);
  const RealMatrix& t = theta_full();
  for (int i = 0; i < kSectorDim; ++i)
    for (int j = 0; j < kSectorDim; ++j) v(i, j) = t(idx[i], idx[j]);
  return {sector, v};
}

double concurrence_pure(const ComplexVector& psi16, double tol) {
  if (psi16.size() != kDim)
    throw WrongModeCount("concurrence_pure: expected a 16-dim state");
  double even = 0.0, odd = 0.0;
  for (int j = 0; j < kDim; ++j) {
    double w = std::norm(psi16(j));
    (fock::excitation_count(j) % 2 == 0 ? even : odd) += w;
  }
  if (even > tol && odd > tol)
    throw MixedParity("concurrence_pure: state has no definite parity");
  return std::abs((psi16.adjoint() * theta_apply(psi16))(0));
}

namespace {

ComplexMatrix sector_tilde(const ComplexMatrix& rho_sector, Sector sector) {
  const ComplexMatrix& v = theta(sector).v;
  return v * rho_sector.conjugate() * v.adjoint();
}

void check_sector_operator(const ComplexMatrix& rho_sector) {
  if (rho_sector.rows() != kSectorDim || rho_sector.cols() != kSectorDim)
    throw WrongModeCount("expected an 8x8 sector operator");
  if (linalg::max_abs(ComplexMatrix(rho_sector - rho_sector.adjoint())) > 1e-9)
    throw NotHermitian("sector operator is not Hermitian");
}

}  // namespace

MixedConcurrence concurrence_mixed(const ComplexMatrix& rho_sector,
                                   Sector sector) {
  check_sector_operator(rho_sector);
  ComplexMatrix sq = linalg::sqrt_psd(rho_sector);  // throws NotPsd
  ComplexMatrix core = sq * sector_tilde(rho_sector, sector) * sq;
  auto [vals, vecs] = linalg::eigh(core, 1e-8);
  // Clip eigenvalues at the round-off floor so exactly-zero singular values
  // of the core do not leak sqrt(eps)-sized contributions into the tail sum.
  // The trace of rho sets the absolute scale (the core is O(trace^2)), which
  // also covers cores that are pure round-off noise.
  const double scale = rho_sector.trace().real();
  const double floor =
      1e-13 * std::max({vals.maxCoeff(), scale * scale, 0.0});
  MixedConcurrence out;
  out.lambdas = (vals.array() < floor).select(RealVector::Zero(vals.size()),
                                              vals)
                    .cwiseMax(0.0)
                    .cwiseSqrt()
                    .reverse();
  double tail = out.lambdas.size() > 1
                    ? out.lambdas.tail(out.lambdas.size() - 1).sum()
                    : 0.0;
  out.c = std::max(0.0, out.lambdas(0) - tail);
  return out;
}

namespace {

// Split lengths into three groups whose sums satisfy the triangle
// inequality (requires d_1 <= sum of the rest): add each length, largest
// first, to the currently smallest bin.
std::array<double, 3> greedy_bins(const RealVector& d, std::vector<int>* bin_of) {
  std::array<double, 3> sums{0.0, 0.0, 0.0};
  bin_of->assign(d.size(), 0);
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    int smallest = 0;
    for (int b = 1; b < 3; ++b)
      if (sums[b] < sums[smallest]) smallest = b;
    sums[smallest] += d(j);
    (*bin_of)[j] = smallest;
  }
  return sums;
}

// Angles for three vectors of the given lengths summing to zero.
std::array<double, 3> triangle_angles(const std::array<double, 3>& len) {
  std::array<double, 3> angle{0.0, 0.0, 0.0};
  const double l1 = len[0], l2 = len[1], l3 = len[2];
  if (l1 < 1e-15) return angle;
  if (l2 < 1e-15) {
    angle[2] = kPi;  // closure needs l3 = l1
    return angle;
  }
  double cos_delta = std::clamp((l3 * l3 - l1 * l1 - l2 * l2) / (2 * l1 * l2),
                                -1.0, 1.0);
  angle[1] = std::acos(cos_delta);
  Complex rest = -(l1 + l2 * std::exp(Complex(0, angle[1])));
  angle[2] = (std::abs(rest) < 1e-14) ? 0.0 : std::arg(rest);
  return angle;
}

// Smallest Sylvester-Hadamard order in {1,2,4,8} holding `r` columns.
int hadamard_order(int r) {
  int m = 1;
  while (m < r) m *= 2;
  return m;
}

double sylvester_entry(int i, int j) {
  return (__builtin_popcount(i & j) % 2 == 0) ? 1.0 : -1.0;
}

GaussianComponent make_component(const ComplexVector& sector_vec,
                                 Sector sector) {
  GaussianComponent comp;
  comp.weight = sector_vec.squaredNorm();
  ComplexVector normalized = sector_vec / sector_vec.norm();
  comp.state = fock::embed_sector(normalized, kModes, sector);
  comp.correlation = {kModes,
                      fock::correlation_from_state(comp.state, kModes)};
  comp.sector = sector;
  return comp;
}

}  // namespace

Decomposition optimal_decomposition(const ComplexMatrix& rho_sector,
                                    Sector sector, double verdict_tol) {
  check_sector_operator(rho_sector);
  auto [vals, vecs] = linalg::eigh(rho_sector, 1e-9);
  if (vals.minCoeff() < -1e-8)
    throw NotPsd("optimal_decomposition: sector operator is not PSD");

  const double trace = vals.cwiseMax(0.0).sum();
  Decomposition out;
  if (trace < 1e-14) {
    out.lambdas = RealVector::Zero(1);
    out.convex_gaussian = true;
    return out;
  }
  const double cutoff = 1e-12 * vals.maxCoeff();
  std::vector<ComplexVector> w;  // subnormalized eigenvectors, descending
  for (Eigen::Index i = vals.size() - 1; i >= 0; --i)
    if (vals(i) > cutoff) w.push_back(std::sqrt(vals(i)) * vecs.col(i));
  const int r = static_cast<int>(w.size());

  const ThetaMap th = theta(sector);
  ComplexMatrix tau(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      tau(i, j) = (w[i].adjoint() * th.apply(w[j]))(0);
  tau = (tau + ComplexMatrix(tau.transpose())) / 2.0;
  auto tak = linalg::takagi(tau, 1e-8);

  // Tilde-orthogonal basis: <x_i|theta x_j> = delta_ij d_i.
  std::vector<ComplexVector> x(r, ComplexVector::Zero(kSectorDim));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) x[i] += tak.u(j, i) * w[j];

  out.lambdas = tak.d;
  double tail = r > 1 ? tak.d.tail(r - 1).sum() : 0.0;
  const double c_raw = tak.d(0) - tail;
  out.concurrence = std::max(0.0, c_raw);
  out.convex_gaussian = out.concurrence <= verdict_tol;

  if (out.convex_gaussian) {
    // Phase balancing: angles psi_j with sum d_j e^{i psi_j} = 0, then mix
    // through a Hadamard so every component is theta-isotropic (Gaussian).
    std::vector<int> bin_of;
    auto sums = greedy_bins(tak.d, &bin_of);
    auto angles = triangle_angles(sums);
    std::vector<ComplexVector> y(r);
    for (int j = 0; j < r; ++j)
      y[j] = std::exp(Complex(0, angles[bin_of[j]] / 2.0)) * x[j];
    const int m = hadamard_order(r);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (int k = 0; k < m; ++k) {
      ComplexVector z = ComplexVector::Zero(kSectorDim);
      for (int j = 0; j < r; ++j) z += scale * sylvester_entry(k, j) * y[j];
      if (z.squaredNorm() < 1e-14) continue;
      out.components.push_back(make_component(z, sector));
    }
    return out;
  }

  // C > 0: equal-concurrence optimal decomposition. Start from the phased
  // tilde-orthogonal set (theta overlaps real: d_1, -d_2, ..., -d_r) and
  // equalize the per-component ratio <z|theta z>/<z|z> with real plane
  // rotations; each rotation pins one component at the target exactly.
  std::vector<ComplexVector> z = x;
  for (int j = 1; j < r; ++j) z[j] = Complex(0, 1) * x[j];
  const double target = c_raw / trace;
  std::vector<int> active(r);
  std::iota(active.begin(), active.end(), 0);
  while (active.size() > 1) {
    auto overlap_t = [&](int i, int j) {
      return ((z[i].adjoint() * th.apply(z[j]))(0)).real();
    };
    auto overlap_g = [&](int i, int j) {
      return ((z[i].adjoint() * z[j])(0)).real();
    };
    int ia = active[0], ib = active[0];
    double fa = -1e300, fb = 1e300;
    for (int idx : active) {
      double f = overlap_t(idx, idx) - target * z[idx].squaredNorm();
      if (f > fa) { fa = f; ia = idx; }
      if (f < fb) { fb = f; ib = idx; }
    }
    if (fa <= 1e-13 && fb >= -1e-13) break;  // already equalized
    const double a = fa;
    const double b = fb;
    const double dcross = overlap_t(ia, ib) - target * overlap_g(ia, ib);
    const double radius = std::hypot((a - b) / 2.0, dcross);
    const double phase = std::atan2(dcross, (a - b) / 2.0);
    const double alpha =
        (phase + std::acos(std::clamp(-(a + b) / (2.0 * radius), -1.0, 1.0))) /
        2.0;
    ComplexVector za = z[ia], zb = z[ib];
    z[ia] = std::cos(alpha) * za + std::sin(alpha) * zb;
    z[ib] = -std::sin(alpha) * za + std::cos(alpha) * zb;
    active.erase(std::find(active.begin(), active.end(), ia));
  }
  for (int j = 0; j < r; ++j) {
    if (z[j].squaredNorm() < 1e-14) continue;
    out.components.push_back(make_component(z[j], sector));
  }
  return out;
}

void validate_density(const ComplexMatrix& rho16, double tol) {
  if (rho16.rows() != kDim || rho16.cols() != kDim)
    throw WrongModeCount("expected a 16x16 four-mode density operator");
  if (linalg::max_abs(ComplexMatrix(rho16 - rho16.adjoint())) > tol)
    throw NotHermitian("density operator is not Hermitian");
  if (std::abs(rho16.trace().real() - 1.0) > tol ||
      std::abs(rho16.trace().imag()) > tol)
    throw OutOfRange("density operator does not have unit trace");
  ComplexMatrix q = fock::parity_q(kModes);
  if (linalg::max_abs(ComplexMatrix(rho16 * q - q * rho16)) > tol)
    throw NotEven("density operator is not even");
  auto [vals, vecs] = linalg::eigh(rho16, tol);
  if (vals.minCoeff() < -1e-8)
    throw NotPsd("density operator has a negative eigenvalue");
}

CertificateReport certify(const ComplexMatrix& rho16, bool with_decomposition,
                          double verdict_tol) {
  validate_density(rho16);
  CertificateReport report;
  std::optional<Decomposition> dec_plus, dec_minus;
  for (Sector s : {Sector::Even, Sector::Odd}) {
    ComplexMatrix block(kSectorDim, kSectorDim);
    const auto idx = fock::sector_indices(kModes, s);
    for (int i = 0; i < kSectorDim; ++i)
      for (int j = 0; j < kSectorDim; ++j) block(i, j) = rho16(idx[i], idx[j]);
    auto conc = concurrence_mixed(block, s);
    if (s == Sector::Even) {
      report.c_plus = conc.c;
      report.spectrum_plus = conc.lambdas;
    } else {
      report.c_minus = conc.c;
      report.spectrum_minus = conc.lambdas;
    }
    if (with_decomposition) {
      auto dec = optimal_decomposition(block, s, verdict_tol);
      (s == Sector::Even ? dec_plus : dec_minus) = std::move(dec);
    }
  }
  report.is_convex_gaussian =
      std::max(report.c_plus, report.c_minus) <= verdict_tol;

  const double w_even = fock::sector_weight(rho16, kModes, Sector::Even);
  const double w_odd = fock::sector_weight(rho16, kModes, Sector::Odd);
  if (w_odd <= 1e-10 || w_even <= 1e-10) {
    const double c = (w_odd <= 1e-10) ? report.c_plus : report.c_minus;
    // Snap to the C = 1 endpoint: sqrt(1 - C^2) amplifies round-off in C by
    // 1/sqrt(eps) there, so eps-level noise would shift F by ~1e-8.
    const double cc = (c > 1.0 - 1e-13) ? 1.0 : c;
    double f = 0.5 + 0.5 * std::sqrt(std::max(0.0, 1.0 - cc * cc));
    report.f_gauss = f;
    report.distance_lower = 1.0 - std::sqrt(f);
    report.distance_upper = std::sqrt(std::max(0.0, 1.0 - f));
  }
  if (with_decomposition) {
    std::vector<GaussianComponent> comps;
    for (auto* dec : {&dec_plus, &dec_minus})
      if (dec->has_value())
        for (auto& c : (**dec).components) comps.push_back(std::move(c));
    report.decomposition = std::move(comps);
  }
  return report;
}

namespace {

ComplexMatrix even_restriction(const ComplexMatrix& rho16) {
  if (rho16.rows() != kDim || rho16.cols() != kDim)
    throw WrongModeCount("expected a 16x16 four-mode operator");
  if (fock::sector_weight(rho16, kModes, Sector::Odd) > 1e-10)
    throw WrongSector("operator must be supported in the even sector");
  return fock::restrict_to_sector(rho16, kModes, Sector::Even, 1e-8);
}

}  // namespace

double fidelity_gauss(const ComplexMatrix& rho16) {
  ComplexMatrix block = even_restriction(rho16);
  double c = concurrence_mixed(block, Sector::Even).c;
  if (c > 1.0 - 1e-13) c = 1.0;  // see certify(): sqrt noise amplification
  return 0.5 + 0.5 * std::sqrt(std::max(0.0, 1.0 - c * c));
}

std::pair<double, double> distance_bounds(const ComplexMatrix& rho16) {
  double f = fidelity_gauss(rho16);
  return {1.0 - std::sqrt(f), std::sqrt(std::max(0.0, 1.0 - f))};
}

double uhlmann_fidelity(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix sq = linalg::sqrt_psd(a);
  ComplexMatrix inner = linalg::sqrt_psd(sq * b * sq);
  return std::pow(inner.trace().real(), 2);
}

ComplexMatrix nearest_convex_gaussian(const ComplexMatrix& rho16) {
  ComplexMatrix block = even_restriction(rho16);
  auto dec = optimal_decomposition(block, Sector::Even);
  if (dec.convex_gaussian) return rho16;
  ComplexMatrix sigma = ComplexMatrix::Zero(kDim, kDim);
  double total = 0.0;
  for (const auto& comp : dec.components) {
    auto schmidt = schmidt_pure(comp.state);
    sigma += comp.weight * (schmidt.psi_g * schmidt.psi_g.adjoint());
    total += comp.weight;
  }
  return sigma / total;
}

SchmidtResult schmidt_pure(const ComplexVector& psi16, double tol) {
  if (psi16.size() != kDim)
    throw WrongModeCount("schmidt_pure: expected a 16-dim state");
  for (int j : fock::sector_indices(kModes, Sector::Odd))
    if (std::abs(psi16(j)) > 1e-8)
      throw WrongSector("schmidt_pure: state must lie in the even sector");

  Complex overlap = (psi16.adjoint() * theta_apply(psi16))(0);
  const double c = std::abs(overlap);
  const double phi = (c < 1e-14) ? 0.0 : std::arg(overlap);
  // <psi'|theta psi'> = e^{-2 i alpha} <psi|theta psi> for psi' = e^{i alpha} psi.
  ComplexVector psi = std::exp(Complex(0, phi / 2.0)) * psi16;
  ComplexVector tpsi = theta_apply(psi);
  ComplexVector u = (psi + tpsi) / 2.0;
  ComplexVector v = (psi - tpsi) / Complex(0, 2.0);

  SchmidtResult out;
  out.a = std::min(v.norm(), 1.0 / std::sqrt(2.0) + 1e-12);
  out.psi1 = u / u.norm();
  if (v.norm() > 1e-9) {
    out.psi2 = v / v.norm();
  } else {
    // Degenerate direction: any theta-fixed unit vector orthogonal to psi1.
    for (int j : fock::sector_indices(kModes, Sector::Even)) {
      ComplexVector e = ComplexVector::Zero(kDim);
      e(j) = 1.0;
      ComplexVector cand = e + theta_apply(e);
      cand -= out.psi1 * (out.psi1.adjoint() * cand)(0);
      if (cand.norm() > 0.5) {
        out.psi2 = cand / cand.norm();
        break;
      }
    }
  }
  out.p = (std::sqrt(1.0 - out.a * out.a) - out.a) / std::sqrt(2.0);
  out.psi_g = (out.psi1 + Complex(0, 1) * out.psi2) / std::sqrt(2.0);
  return out;
}

}  // namespace flocert::certifier
