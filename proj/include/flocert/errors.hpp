#pragma once

#include <stdexcept>
#include <string>

namespace flocert {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotHermitian : Error { using Error::Error; };
struct NotPsd : Error { using Error::Error; };
struct NotSymmetric : Error { using Error::Error; };
struct NotAntisymmetric : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct NotEven : Error { using Error::Error; };
struct NotGaussian : Error { using Error::Error; };
struct MixedParity : Error { using Error::Error; };
struct MixedSector : Error { using Error::Error; };
struct WrongSector : Error { using Error::Error; };
struct WrongModeCount : Error { using Error::Error; };
struct WrongAncillaModes : Error { using Error::Error; };
struct TooManyModes : Error { using Error::Error; };
struct TooManyBranches : Error { using Error::Error; };
struct InvalidGuard : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

struct NotConvexGaussian : Error {
  NotConvexGaussian(const std::string& msg, double cp, double cm)
      : Error(msg), c_plus(cp), c_minus(cm) {}
  double c_plus;
  double c_minus;
};

}  // namespace flocert
