#pragma once

#include <Eigen/Dense>

namespace ifm::linalg {

/// Matrix exponential by scaling and squaring with a degree-13 diagonal Padé
/// approximant (Higham 2005). The backward error is below unit roundoff for
/// every input norm.
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

/// Largest absolute entry.
double max_norm(const Eigen::MatrixXcd& m);

}  // namespace ifm::linalg
