#ifndef EFIE_TYPES_HPP_
#define EFIE_TYPES_HPP_

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace efie {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec3c = Eigen::Vector3cd;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using Complex = std::complex<double>;

/// Invalid argument (bad index, value out of domain).
class argument_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed configuration or input file.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Defective geometry: degenerate parametrization, ambiguous or broken
/// topology, missing interface partners.
class geometry_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure (solver non-convergence, singular evaluation).
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace efie

#endif  // EFIE_TYPES_HPP_
