#include "vhi/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "vhi/errors.hpp"

namespace vhi {
namespace {

// Solves the equality-constrained subproblem restricted to the working set:
//   min 1/2 x^T H x + q^T x  s.t.  C_W x = g_W
// returning the minimizer and multipliers. Rows that make the Schur
// complement numerically singular are flagged in `dependent`.
struct EqSolve {
  Vec x;
  Vec lambda;
  bool singular = false;
};

EqSolve solve_equality(const Eigen::LLT<Mat>& hchol, const Vec& q, const Mat& C, const Vec& g,
                       const std::vector<int>& work) {
  EqSolve out;
  const Vec y0 = hchol.solve(-q);
  if (work.empty()) {
    out.x = y0;
    out.lambda = Vec();
    return out;
  }
  const int m = static_cast<int>(work.size());
  Mat cw(m, C.cols());
  Vec gw(m);
  for (int k = 0; k < m; ++k) {
    cw.row(k) = C.row(work[k]);
    gw[k] = g[work[k]];
  }
  const Mat hinv_cwt = hchol.solve(cw.transpose());
  const Mat schur = cw * hinv_cwt;
  Eigen::LDLT<Mat> ldlt(schur);
  out.lambda = ldlt.solve(cw * y0 - gw);
  const double res = (schur * out.lambda - (cw * y0 - gw)).cwiseAbs().maxCoeff();
  const double scale = 1.0 + gw.cwiseAbs().maxCoeff() + (cw * y0).cwiseAbs().maxCoeff();
  if (!out.lambda.allFinite() || res > 1e-8 * scale) {
    out.singular = true;
    return out;
  }
  out.x = y0 - hinv_cwt * out.lambda;
  return out;
}

}  // namespace

QpResult solve_qp_active_set(const Mat& H, const Eigen::LLT<Mat>& hchol, const Vec& q,
                             const Mat& C, const Vec& g, const Vec& x0) {
  const int n = static_cast<int>(H.rows());
  const int m = static_cast<int>(C.rows());
  QpResult out;
  out.x = x0;
  out.multipliers = Vec::Zero(m);
  if (m == 0) {
    out.x = hchol.solve(-q);
    return out;
  }

  const double feas_tol = 1e-11 * (1.0 + g.cwiseAbs().maxCoeff());
  std::vector<int> work;
  for (int i = 0; i < m; ++i) {
    if (C.row(i).dot(out.x) >= g[i] - feas_tol) work.push_back(i);
  }

  const int max_iter = 60 + 12 * (m + n);
  for (int iter = 0; iter < max_iter; ++iter) {
    EqSolve eq = solve_equality(hchol, q, C, g, work);
    if (eq.singular) {
      // Dependent working set: drop the most recently added row and retry.
      if (work.empty()) throw NonconvergenceError("QP working set degenerate");
      work.pop_back();
      continue;
    }
    const Vec p = eq.x - out.x;
    const double step_scale = 1.0 + out.x.cwiseAbs().maxCoeff();
    if (p.cwiseAbs().maxCoeff() <= 1e-13 * step_scale) {
      // Stationary on the working set; check multiplier signs.
      int drop = -1;
      double worst = -1e-11 * (1.0 + (eq.lambda.size() ? eq.lambda.cwiseAbs().maxCoeff() : 0.0));
      for (int k = 0; k < static_cast<int>(work.size()); ++k) {
        if (eq.lambda[k] < worst) {
          worst = eq.lambda[k];
          drop = k;
        }
      }
      if (drop < 0) {
        out.iterations = iter + 1;
        for (int k = 0; k < static_cast<int>(work.size()); ++k) {
          out.multipliers[work[k]] = std::max(0.0, eq.lambda[k]);
        }
        return out;
      }
      work.erase(work.begin() + drop);
      continue;
    }
    // Step toward eq.x, stopping at the first blocking constraint.
    double alpha = 1.0;
    int blocking = -1;
    for (int i = 0; i < m; ++i) {
      if (std::find(work.begin(), work.end(), i) != work.end()) continue;
      const double ci_p = C.row(i).dot(p);
      if (ci_p <= 1e-14 * (1.0 + C.row(i).cwiseAbs().maxCoeff() * p.cwiseAbs().maxCoeff())) continue;
      const double slack = g[i] - C.row(i).dot(out.x);
      const double a = std::max(0.0, slack) / ci_p;
      if (a < alpha) {
        alpha = a;
        blocking = i;
      }
    }
    out.x += alpha * p;
    if (blocking >= 0) work.push_back(blocking);
  }
  throw NonconvergenceError("QP active-set iteration limit exceeded");
}

}  // namespace vhi
