#pragma once

#include <complex>

#include <Eigen/Dense>

namespace lismimo {

using Complex = std::complex<double>;

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

}  // namespace lismimo
