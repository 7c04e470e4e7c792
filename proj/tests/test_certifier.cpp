#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flocert/certifier.hpp"
#include "flocert/errors.hpp"
#include "flocert/fock.hpp"
#include "flocert/gaussian.hpp"
#include "flocert/linalg.hpp"
#include "helpers.hpp"

using namespace flocert;
using namespace testutil;

namespace {

ComplexVector basis16(int j) {
  ComplexVector e = ComplexVector::Zero(16);
  e(j) = 1.0;
  return e;
}

ComplexMatrix sector_block(const ComplexMatrix& rho16, Sector s) {
  const auto idx = fock::sector_indices(4, s);
  ComplexMatrix block(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) block(i, j) = rho16(idx[i], idx[j]);
  return block;
}

}  // namespace

TEST_CASE("duality map structure") {
  const RealMatrix& t = certifier::theta_full();
  // Signed permutation onto the complementary occupation pattern.
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i)
      CHECK(std::abs(t(i, j)) == ((i == (j ^ 0xF)) ? 1.0 : 0.0));
  // Involution: theta^2 = T conj(T) = T T = I (T is real).
  CHECK(linalg::max_abs(RealMatrix(t * t - RealMatrix::Identity(16, 16))) <=
        1e-12);
  // Phase fixing on the vacuum.
  ComplexVector tv = certifier::theta_apply(basis16(0));
  CHECK(std::abs(tv(15) - Complex(1, 0)) <= 1e-12);

  for (Sector s : {Sector::Even, Sector::Odd}) {
    auto th = certifier::theta(s);
    CHECK(linalg::max_abs(ComplexMatrix(th.v * th.v.conjugate() -
                                        ComplexMatrix::Identity(8, 8))) <=
          1e-12);
  }
}

TEST_CASE("duality map commutes with every quadratic monomial") {
  // theta c_i c_j = c_i c_j theta, i.e. (c_i c_j) T = T conj(c_i c_j).
  for (int i = 1; i <= 8; ++i)
    for (int j = i + 1; j <= 8; ++j) {
      ComplexMatrix cij = fock::majorana(i, 4) * fock::majorana(j, 4);
      ComplexMatrix lhs = cij * certifier::theta_full().cast<Complex>();
      ComplexMatrix rhs = certifier::theta_full().cast<Complex>() * cij.conjugate();
      CHECK(linalg::max_abs(ComplexMatrix(lhs - rhs)) <= 1e-12);
    }
}

TEST_CASE("duality sign is forced by the commutation requirement") {
  // Flipping the sign on the two basis states where our action differs from
  // a naive "(-1)^floor(N/2)" duality breaks commutation with c1 c3: the
  // naive sign rule is inconsistent with the map's defining property.
  RealMatrix naive = RealMatrix::Zero(16, 16);
  for (int j = 0; j < 16; ++j) {
    int big_n = fock::excitation_count(j);
    naive(j ^ 0xF, j) = ((big_n / 2) % 2 == 0) ? 1.0 : -1.0;
  }
  ComplexMatrix c13 = fock::majorana(1, 4) * fock::majorana(3, 4);
  ComplexMatrix lhs = c13 * naive.cast<Complex>();
  ComplexMatrix rhs = naive.cast<Complex>() * c13.conjugate();
  CHECK(linalg::max_abs(ComplexMatrix(lhs - rhs)) > 0.5);
  // Where the two sign rules agree, they agree exactly.
  const RealMatrix& t = certifier::theta_full();
  int disagreements = 0;
  for (int j = 0; j < 16; ++j)
    if (t(j ^ 0xF, j) != naive(j ^ 0xF, j)) ++disagreements;
  // |0100>, |0001>, |1010>, |0101>, |1101>, |0111> carry the opposite sign.
  CHECK(disagreements == 6);
}

TEST_CASE("duality conjugation equals tilde on sector-supported operators") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    Sector s = (trial % 2 == 0) ? Sector::Even : Sector::Odd;
    ComplexMatrix rho = random_sector_density(s, rng);
    CHECK(linalg::max_abs(ComplexMatrix(certifier::theta_conjugate(rho) -
                                        fock::tilde(rho, 4))) <= 1e-10);
  }
}

TEST_CASE("pure-state concurrence") {
  CHECK(certifier::concurrence_pure(fock::vacuum_state(4)) <= 1e-12);
  CHECK(std::abs(certifier::concurrence_pure(fock::a8_state()) - 1.0) <=
        1e-12);
  Rng rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    Sector parity = (trial % 2 == 0) ? Sector::Even : Sector::Odd;
    ComplexVector psi = gaussian::gaussian_state_vector(
        gaussian::random_pure_gaussian(4, rng, parity));
    CHECK(certifier::concurrence_pure(psi) <= 1e-9);
  }
  ComplexVector mixed = (basis16(0) + basis16(1)) / std::sqrt(2.0);
  CHECK_THROWS_AS(certifier::concurrence_pure(mixed), MixedParity);
}

TEST_CASE("mixed concurrence closed form on the depolarized family") {
  for (double p : {0.0, 0.2, 0.4, 8.0 / 11.0, 0.8, 1.0}) {
    ComplexMatrix block =
        sector_block(fock::depolarized_a8(p), Sector::Even);
    auto conc = certifier::concurrence_mixed(block, Sector::Even);
    CHECK(std::abs(conc.c - std::max(0.0, 1.0 - 11.0 * p / 8.0)) <= 1e-10);
    for (int i = 1; i < 8; ++i) CHECK(conc.lambdas(i) <= conc.lambdas(i - 1));
  }
  // Pure Gaussian projector and the maximally mixed sector state vanish.
  Rng rng(23);
  ComplexVector psi = gaussian::gaussian_state_vector(
      gaussian::random_pure_gaussian(4, rng));
  CHECK(certifier::concurrence_mixed(
            sector_block(ComplexMatrix(psi * psi.adjoint()), Sector::Even),
            Sector::Even)
            .c <= 1e-9);
  CHECK(certifier::concurrence_mixed(
            ComplexMatrix(ComplexMatrix::Identity(8, 8) / 8.0), Sector::Even)
            .c == 0.0);
}

TEST_CASE("certify verdicts") {
  auto at_cr = certifier::certify(fock::depolarized_a8(8.0 / 11.0));
  CHECK(at_cr.c_plus <= 1e-10);
  CHECK(at_cr.c_minus == 0.0);
  CHECK(at_cr.is_convex_gaussian);

  auto below = certifier::certify(fock::depolarized_a8(0.5));
  CHECK(std::abs(below.c_plus - 0.3125) <= 1e-10);
  CHECK_FALSE(below.is_convex_gaussian);

  ComplexVector vac = fock::vacuum_state(4);
  auto vacuum = certifier::certify(ComplexMatrix(vac * vac.adjoint()));
  CHECK(vacuum.is_convex_gaussian);
  CHECK(vacuum.c_plus <= 1e-12);
  CHECK(vacuum.c_minus <= 1e-12);
  CHECK(vacuum.f_gauss.has_value());  // single-sector support

  CHECK_THROWS_AS(certifier::certify(ComplexMatrix::Identity(4, 4) / 4.0),
                  WrongModeCount);
}

TEST_CASE("soundness: Gaussian mixtures certify convex-Gaussian") {
  Rng rng(24);
  for (int trial = 0; trial < 100; ++trial) {
    int k = 1 + static_cast<int>(rng() % 8);
    auto report = certifier::certify(random_gaussian_mixture(k, rng));
    CHECK(report.c_plus <= 1e-8);
    CHECK(report.c_minus <= 1e-8);
    CHECK(report.is_convex_gaussian);
  }
}

TEST_CASE("completeness at the pure level") {
  Rng rng(25);
  for (int trial = 0; trial < 100; ++trial) {
    ComplexVector psi = random_even_pure(rng);
    double c = certifier::concurrence_pure(psi);
    RealMatrix m = fock::correlation_from_state(psi, 4);
    bool gaussian = gaussian::is_gaussian_pure({4, m}, 1e-8).pure;
    if (c <= 1e-8) CHECK(gaussian);
    if (gaussian) CHECK(c <= 1e-8);
  }
}

TEST_CASE("convex-roof upper bound") {
  Rng rng(26);
  for (int trial = 0; trial < 50; ++trial) {
    int k = 2 + static_cast<int>(rng() % 4);
    std::vector<ComplexVector> states;
    std::vector<double> weights(k);
    double total = 0.0;
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    ComplexMatrix rho = ComplexMatrix::Zero(16, 16);
    for (int c = 0; c < k; ++c) {
      states.push_back(random_even_pure(rng));
      total += (weights[c] = unif(rng));
    }
    double bound = 0.0;
    for (int c = 0; c < k; ++c) {
      rho += (weights[c] / total) * (states[c] * states[c].adjoint());
      bound += (weights[c] / total) * certifier::concurrence_pure(states[c]);
    }
    double mixed = certifier::concurrence_mixed(sector_block(rho, Sector::Even),
                                                Sector::Even)
                       .c;
    CHECK(bound >= mixed - 1e-9);
  }
}

TEST_CASE("monotonic noise response") {
  double prev = 2.0;
  for (int i = 0; i <= 200; ++i) {
    double p = i / 200.0;
    double c = certifier::concurrence_mixed(
                   sector_block(fock::depolarized_a8(p), Sector::Even),
                   Sector::Even)
                   .c;
    CHECK(c <= prev + 1e-12);
    prev = c;
  }
}

TEST_CASE("Gaussian fidelity and distance bounds") {
  ComplexVector a8 = fock::a8_state();
  ComplexMatrix rho_a8 = a8 * a8.adjoint();
  CHECK(std::abs(certifier::fidelity_gauss(rho_a8) - 0.5) <= 1e-10);
  auto [lo, hi] = certifier::distance_bounds(rho_a8);
  CHECK(std::abs(lo - (1.0 - std::sqrt(0.5))) <= 1e-10);
  CHECK(std::abs(hi - std::sqrt(0.5)) <= 1e-10);

  Rng rng(27);
  ComplexVector g = gaussian::gaussian_state_vector(
      gaussian::random_pure_gaussian(4, rng));
  CHECK(std::abs(certifier::fidelity_gauss(ComplexMatrix(g * g.adjoint())) -
                 1.0) <= 1e-8);

  // Pure inputs: the constructed Gaussian state achieves the fidelity value.
  for (int trial = 0; trial < 20; ++trial) {
    ComplexVector psi = random_even_pure(rng);
    double f = certifier::fidelity_gauss(ComplexMatrix(psi * psi.adjoint()));
    auto schmidt = certifier::schmidt_pure(psi);
    double direct = std::norm((schmidt.psi_g.adjoint() * psi)(0));
    CHECK(std::abs(f - direct) <= 1e-9);
    CHECK(std::abs(f - (1.0 - schmidt.p * schmidt.p)) <= 1e-9);
  }

  // Monte-Carlo: no sampled convex-Gaussian state beats the formula.
  ComplexVector psi = random_even_pure(rng);
  ComplexMatrix rho = psi * psi.adjoint();
  double f_formula = certifier::fidelity_gauss(rho);
  for (int trial = 0; trial < 1000; ++trial) {
    ComplexMatrix sigma = random_gaussian_mixture(1 + rng() % 8, rng);
    CHECK(certifier::uhlmann_fidelity(rho, sigma) <= f_formula + 1e-9);
  }

  CHECK_THROWS_AS(certifier::fidelity_gauss(fock::depolarized_a8(0.5)),
                  WrongSector);
}

TEST_CASE("nearest convex-Gaussian state achieves the fidelity bound") {
  Rng rng(28);
  for (int trial = 0; trial < 10; ++trial) {
    // Even-sector mixture with nonzero concurrence.
    ComplexVector a8 = fock::a8_state();
    ComplexVector psi = random_even_pure(rng);
    ComplexMatrix rho = 0.7 * (a8 * a8.adjoint()) + 0.3 * (psi * psi.adjoint());
    double f_formula = certifier::fidelity_gauss(rho);
    ComplexMatrix sigma = certifier::nearest_convex_gaussian(rho);
    auto sigma_report = certifier::certify(sigma);
    CHECK(sigma_report.is_convex_gaussian);
    CHECK(std::abs(certifier::uhlmann_fidelity(rho, sigma) - f_formula) <=
          1e-8);
  }
}

TEST_CASE("optimal decomposition: convex-Gaussian branch") {
  Rng rng(29);
  // Pure Gaussian projector: a single component.
  ComplexVector g = gaussian::gaussian_state_vector(
      gaussian::random_pure_gaussian(4, rng));
  auto single = certifier::optimal_decomposition(
      sector_block(ComplexMatrix(g * g.adjoint()), Sector::Even),
      Sector::Even);
  CHECK(single.convex_gaussian);
  REQUIRE(single.components.size() == 1);
  CHECK(single.components[0].weight == doctest::Approx(1.0));

  auto verify = [&](const ComplexMatrix& rho16, Sector s) {
    ComplexMatrix block = sector_block(rho16, s);
    auto dec = certifier::optimal_decomposition(block, s);
    REQUIRE(dec.convex_gaussian);
    CHECK(dec.components.size() <= 8);
    ComplexMatrix rebuilt = ComplexMatrix::Zero(16, 16);
    for (const auto& comp : dec.components) {
      CHECK(gaussian::is_gaussian_pure(comp.correlation, 1e-8).pure);
      CHECK(certifier::concurrence_pure(comp.state) <= 1e-7);
      rebuilt += comp.weight * (comp.state * comp.state.adjoint());
    }
    CHECK(linalg::max_abs(ComplexMatrix(sector_block(rebuilt, s) - block)) <=
          1e-8);
  };

  verify(fock::depolarized_a8(0.75), Sector::Even);
  verify(fock::depolarized_a8(0.75), Sector::Odd);
  for (int trial = 0; trial < 20; ++trial)
    for (Sector s : {Sector::Even, Sector::Odd}) {
      ComplexMatrix rho = random_gaussian_mixture(5, rng);
      if (fock::sector_weight(rho, 4, s) < 0.05) continue;
      verify(rho, s);
    }
}

TEST_CASE("optimal decomposition: equal-concurrence branch") {
  Rng rng(30);
  for (int trial = 0; trial < 20; ++trial) {
    ComplexMatrix rho;
    if (trial < 5) {
      rho = fock::depolarized_a8(0.1 * trial);
    } else {
      rho = random_sector_density(Sector::Even, rng);
    }
    ComplexMatrix block = sector_block(rho, Sector::Even);
    auto conc = certifier::concurrence_mixed(block, Sector::Even);
    auto dec = certifier::optimal_decomposition(block, Sector::Even);
    if (conc.c <= 1e-8) continue;
    CHECK_FALSE(dec.convex_gaussian);
    CHECK(std::abs(dec.concurrence - conc.c) <= 1e-10);
    double trace = block.trace().real();
    ComplexMatrix rebuilt = ComplexMatrix::Zero(16, 16);
    double weighted_c = 0.0;
    for (const auto& comp : dec.components) {
      double cc = certifier::concurrence_pure(comp.state);
      // Every component carries the same concurrence C(rho)/tr(rho).
      CHECK(std::abs(cc - conc.c / trace) <= 1e-8);
      weighted_c += comp.weight * cc;
      rebuilt += comp.weight * (comp.state * comp.state.adjoint());
    }
    CHECK(linalg::max_abs(ComplexMatrix(
              sector_block(rebuilt, Sector::Even) - block)) <= 1e-8);
    CHECK(std::abs(weighted_c - conc.c) <= 1e-7);
  }
}

TEST_CASE("generalized Schmidt decomposition of even pure states") {
  Rng rng(31);
  // Gaussian input: a = 1/sqrt(2), p = 0, psi_g = psi up to phase.
  ComplexVector g = gaussian::gaussian_state_vector(
      gaussian::random_pure_gaussian(4, rng));
  auto sg = certifier::schmidt_pure(g);
  CHECK(std::abs(sg.a - 1.0 / std::sqrt(2.0)) <= 1e-6);
  CHECK(std::abs(sg.p) <= 1e-6);
  CHECK(std::abs(std::abs((sg.psi_g.adjoint() * g)(0)) - 1.0) <= 1e-6);

  // a8 input: a = 0, p = 1/sqrt(2).
  auto sa = certifier::schmidt_pure(fock::a8_state());
  CHECK(std::abs(sa.a) <= 1e-9);
  CHECK(std::abs(sa.p - 1.0 / std::sqrt(2.0)) <= 1e-9);

  for (int trial = 0; trial < 200; ++trial) {
    ComplexVector psi = random_even_pure(rng);
    double c = certifier::concurrence_pure(psi);
    auto s = certifier::schmidt_pure(psi);
    CHECK(std::abs((s.psi1.adjoint() * s.psi2)(0)) <= 1e-10);
    CHECK(linalg::max_abs(ComplexMatrix(certifier::theta_apply(s.psi1) -
                                        s.psi1)) <= 1e-9);
    CHECK(linalg::max_abs(ComplexMatrix(certifier::theta_apply(s.psi2) -
                                        s.psi2)) <= 1e-9);
    CHECK(s.a >= 0.0);
    CHECK(s.a <= 1.0 / std::sqrt(2.0) + 1e-12);
    CHECK(std::abs(c - (1.0 - 2.0 * s.a * s.a)) <= 1e-9);
    CHECK(certifier::concurrence_pure(s.psi_g) <= 1e-8);
    CHECK(gaussian::is_gaussian_pure(
              {4, fock::correlation_from_state(s.psi_g, 4)}, 1e-8)
              .pure);
    // Reconstruction up to the removed global phase.
    Complex overlap = (psi.adjoint() * certifier::theta_apply(psi))(0);
    double phi = (std::abs(overlap) < 1e-14) ? 0.0 : std::arg(overlap);
    ComplexVector aligned = std::exp(Complex(0, phi / 2.0)) * psi;
    ComplexVector rebuilt = std::sqrt(1.0 - s.p * s.p) * s.psi_g +
                            s.p * certifier::theta_apply(s.psi_g);
    CHECK((aligned - rebuilt).norm() <= 1e-9);
  }

  CHECK_THROWS_AS(certifier::schmidt_pure(ComplexVector(basis16(1))),
                  WrongSector);
}
