#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "vhi/errors.hpp"

namespace vhi {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Finite-dimensional real inner-product space V given by an SPD Gram matrix.
///
/// Primal elements are coefficient vectors v with <u,v>_V = u^T G v. Dual
/// elements (functionals) are coefficient vectors g acting by <g,v> = g^T v,
/// so the dual norm is ||g||_{V*} = sqrt(g^T G^{-1} g) and the Riesz map is
/// G^{-1}.
class InnerProductSpace {
public:
  /// Validates symmetry (relative 1e-12) and positive definiteness via
  /// Cholesky; the factorization is cached for all later solves.
  explicit InnerProductSpace(Mat gram);

  /// dim-dimensional space with identity Gram.
  static InnerProductSpace euclidean(int dim);

  int dim() const { return static_cast<int>(gram_.rows()); }
  const Mat& gram() const { return gram_; }
  const Eigen::LLT<Mat>& chol() const { return chol_; }

  double inner(const Vec& u, const Vec& v) const { return u.dot(gram_ * v); }
  double norm(const Vec& v) const;
  double dist(const Vec& u, const Vec& v) const { return norm(u - v); }

  Vec apply_gram(const Vec& v) const { return gram_ * v; }
  /// Riesz representative of a dual vector: G^{-1} g.
  Vec riesz(const Vec& g) const { return chol_.solve(g); }
  double dual_norm(const Vec& g) const;
  double dual_dist(const Vec& g, const Vec& h) const { return dual_norm(g - h); }

private:
  Mat gram_;
  Eigen::LLT<Mat> chol_;
};

/// Uniform partition of [0,T] with N steps (N+1 nodes t_n = n*T/N).
struct TimeGrid {
  double horizon = 1.0;
  int steps = 1;

  TimeGrid() = default;
  TimeGrid(double T, int N);

  double dt() const { return horizon / steps; }
  double node(int n) const { return horizon * n / steps; }
  int node_count() const { return steps + 1; }
};

}  // namespace vhi
