#pragma once

#include <Eigen/Dense>

namespace pdmp {

/// Matrix exponential by scaling and squaring with the diagonal [6/6] Pade
/// approximant. The matrix is scaled so that its infinity norm is at most
/// 1/2 before the approximant is applied.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

}  // namespace pdmp
