#include "loopgrating/grating/quadrature.hpp"

#include <array>

#include "loopgrating/error.hpp"

namespace loopgrating::grating {

Eigen::VectorXd gregory_weights(int n, double length) {
  constexpr int order = 5;
  if (n < 2 * order) throw Error(ErrorCode::GridTooCoarse, "Gregory quadrature needs at least 10 intervals");
  constexpr std::array<double, order + 1> c{0.0, 1.0 / 12.0, 1.0 / 24.0, 19.0 / 720.0, 3.0 / 160.0, 863.0 / 60480.0};
  const double h = length / n;
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n + 1, h);
  w(0) = w(n) = 0.5 * h;
  // ∫ ≈ T − h Σ_k c_k [∇^k f_n + (−1)^k Δ^k f_0]
  for (int k = 1; k <= order; ++k) {
    double binom = 1.0;  // C(k, j)
    for (int j = 0; j <= k; ++j) {
      const double sign_back = (j % 2 == 0) ? 1.0 : -1.0;            // ∇^k f_n = Σ (−1)^j C f_{n−j}
      const double sign_fwd = ((k - j) % 2 == 0) ? 1.0 : -1.0;       // Δ^k f_0 = Σ (−1)^{k−j} C f_j
      const double parity = (k % 2 == 0) ? 1.0 : -1.0;
      w(n - j) -= h * c[k] * sign_back * binom;
      w(j) -= h * c[k] * parity * sign_fwd * binom;
      binom = binom * (k - j) / (j + 1);
    }
  }
  return w;
}

}  // namespace loopgrating::grating
