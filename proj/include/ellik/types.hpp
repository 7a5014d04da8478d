// SPDX-License-Identifier: Apache-2.0

#ifndef ELLIK_TYPES_HPP
#define ELLIK_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ellik {

using Real = double;
using Complex = std::complex<double>;

using Vec3 = Eigen::Vector3d;
using Vec3i = Eigen::Vector3i;
using Mat3 = Eigen::Matrix3d;

using VectorXc = Eigen::VectorXcd;
using VectorXr = Eigen::VectorXd;
using MatrixXc = Eigen::MatrixXcd;

/// Error thrown on violated preconditions or failed construction.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr int kSpaceDim = 3;
inline constexpr Real kPi = 3.14159265358979323846;

}  // namespace ellik

#endif  // ELLIK_TYPES_HPP
