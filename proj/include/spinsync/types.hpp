#pragma once

#include <complex>

#include <Eigen/Dense>

namespace spinsync {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;

enum class ExecMode { Serial, OpenMP };

}  // namespace spinsync
