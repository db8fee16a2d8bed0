#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "vhi/space.hpp"

namespace vhi {

struct QpResult {
  Vec x;
  /// Multipliers per constraint row (zero for inactive rows).
  Vec multipliers;
  int iterations = 0;
};

/// Minimizes 1/2 x^T H x + q^T x subject to C x <= g, with H SPD.
///
/// Primal active-set method with a Schur-complement KKT solve; terminates
/// finitely for linearly independent working sets and skips numerically
/// dependent rows. `x0` must be feasible. `hchol` is the cached Cholesky
/// factorization of H.
QpResult solve_qp_active_set(const Mat& H, const Eigen::LLT<Mat>& hchol, const Vec& q,
                             const Mat& C, const Vec& g, const Vec& x0);

}  // namespace vhi
