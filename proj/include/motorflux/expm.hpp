#pragma once

#include <Eigen/Core>

namespace motorflux {

/// Dense matrix exponential by scaling and squaring with a diagonal Pade
/// approximant of degree 3, 5, 7, 9 or 13 chosen from the 1-norm.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

}  // namespace motorflux
