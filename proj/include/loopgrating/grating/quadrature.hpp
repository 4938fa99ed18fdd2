#pragma once

#include <Eigen/Dense>

namespace loopgrating::grating {

/// Trapezoid weights with Gregory end corrections through fifth differences
/// for n equal intervals on an interval of the given length. The weights
/// are mirror-symmetric, integrate polynomials of degree ≤ 5 exactly and
/// need n ≥ 10.
Eigen::VectorXd gregory_weights(int n, double length = 1.0);

}  // namespace loopgrating::grating
