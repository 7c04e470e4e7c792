#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>

namespace flocert {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Rng = std::mt19937_64;

enum class Sector { Even, Odd };

/// Global tolerance knobs. Structural checks gate preconditions,
/// reconstruction bounds postconditions, and the verdict tolerance is the
/// single threshold separating "convex-Gaussian" from "not".
struct Tolerances {
  double structural = 1e-10;
  double reconstruction = 1e-9;
  double verdict = 1e-8;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tols{};
  return tols;
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace flocert
