// types.hpp: scalar and matrix aliases

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace quapi {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

}  // namespace quapi
