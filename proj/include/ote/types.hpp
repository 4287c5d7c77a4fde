#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace ote {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

namespace phys {
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double k_B = 1.380649e-23;      // J / K
inline constexpr double c = 299792458.0;         // m / s
inline constexpr double eV = 1.602176634e-19;    // J
inline constexpr double pi = std::numbers::pi;
}  // namespace phys

}  // namespace ote
