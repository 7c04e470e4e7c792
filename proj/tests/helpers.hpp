#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "flocert/fock.hpp"
#include "flocert/gaussian.hpp"
#include "flocert/simulator.hpp"
#include "flocert/types.hpp"

namespace testutil {

using namespace flocert;

inline ComplexVector random_even_pure(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector psi = ComplexVector::Zero(16);
  for (int j : fock::sector_indices(4, Sector::Even))
    psi(j) = Complex(normal(rng), normal(rng));
  return psi / psi.norm();
}

inline ComplexMatrix random_hermitian(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  return (a + a.adjoint()) / 2.0;
}

inline ComplexMatrix random_psd(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  return a * a.adjoint();
}

inline RealMatrix random_antisymmetric(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RealMatrix h = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      h(i, j) = normal(rng);
      h(j, i) = -h(i, j);
    }
  return h;
}

/// Random even operator on d modes: even part of a random Hermitian.
inline ComplexMatrix random_even_operator(int d, Rng& rng) {
  ComplexMatrix x = random_hermitian(fock::dim(d), rng);
  ComplexMatrix q = fock::parity_q(d);
  return (x + q * x * q) / 2.0;
}

/// Random density operator supported in one sector of 4 modes (16x16).
inline ComplexMatrix random_sector_density(Sector sector, Rng& rng) {
  ComplexMatrix block = random_psd(8, rng);
  block /= block.trace().real();
  return fock::embed_sector(block, 4, sector);
}

/// Mixture of `k` random pure Gaussian states (even/odd mixed at random).
inline ComplexMatrix random_gaussian_mixture(int k, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  std::vector<double> w(k);
  double total = 0.0;
  for (double& x : w) total += (x = unif(rng));
  ComplexMatrix rho = ComplexMatrix::Zero(16, 16);
  for (int c = 0; c < k; ++c) {
    Sector parity = (rng() % 2 == 0) ? Sector::Even : Sector::Odd;
    ComplexVector psi = gaussian::gaussian_state_vector(
        gaussian::random_pure_gaussian(4, rng, parity));
    rho += (w[c] / total) * (psi * psi.adjoint());
  }
  return rho;
}

/// Random adaptive circuit: alternating local evolutions and measurements,
/// some instructions guarded on earlier outcomes.
inline simulator::Circuit random_circuit(int d, int ops, Rng& rng) {
  simulator::Circuit circuit;
  circuit.d_comp = d;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int measures = 0;
  for (int i = 0; i < ops; ++i) {
    std::optional<simulator::Guard> guard;
    if (measures > 0 && unif(rng) < 0.3)
      guard = simulator::Guard{static_cast<int>(rng() % measures),
                               static_cast<int>(rng() % 2)};
    if (unif(rng) < 0.5) {
      simulator::Evolve ev;
      int s = 2 + 2 * static_cast<int>(rng() % std::min(d, 3));
      std::vector<int> all(2 * d);
      for (int j = 0; j < 2 * d; ++j) all[j] = j;
      for (int j = 0; j < s; ++j)
        std::swap(all[j], all[j + rng() % (all.size() - j)]);
      all.resize(s);
      std::sort(all.begin(), all.end());
      ev.support = all;
      ev.h_sub = random_antisymmetric(s, rng);
      ev.t = unif(rng);
      ev.guard = guard;
      circuit.ops.emplace_back(std::move(ev));
    } else {
      simulator::Measure ms;
      ms.mode = 1 + static_cast<int>(rng() % d);
      ms.guard = guard;
      circuit.ops.emplace_back(ms);
      ++measures;
    }
  }
  return circuit;
}

inline double max_table_diff(const std::map<std::string, double>& a,
                             const std::map<std::string, double>& b) {
  double diff = 0.0;
  auto probe = [&](const std::map<std::string, double>& x,
                   const std::map<std::string, double>& y) {
    for (const auto& [key, value] : x) {
      auto it = y.find(key);
      double other = (it == y.end()) ? 0.0 : it->second;
      diff = std::max(diff, std::abs(value - other));
    }
  };
  probe(a, b);
  probe(b, a);
  return diff;
}

}  // namespace testutil
