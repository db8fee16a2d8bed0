#include "vhi/space.hpp"

#include <cmath>

namespace vhi {

InnerProductSpace::InnerProductSpace(Mat gram) : gram_(std::move(gram)) {
  if (gram_.rows() == 0 || gram_.rows() != gram_.cols()) {
    throw ConfigError("Gram matrix must be square and non-empty", "gram");
  }
  const double scale = gram_.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || !gram_.allFinite()) {
    throw ConfigError("Gram matrix must be finite and nonzero", "gram");
  }
  const double asym = (gram_ - gram_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw ConfigError("Gram matrix must be symmetric", "gram");
  }
  gram_ = 0.5 * (gram_ + gram_.transpose().eval());
  chol_.compute(gram_);
  if (chol_.info() != Eigen::Success) {
    throw ConfigError("Gram matrix must be positive definite", "gram");
  }
}

InnerProductSpace InnerProductSpace::euclidean(int dim) {
  return InnerProductSpace(Mat::Identity(dim, dim));
}

double InnerProductSpace::norm(const Vec& v) const {
  // Clamp tiny negative round-off before the square root.
  return std::sqrt(std::max(0.0, v.dot(gram_ * v)));
}

double InnerProductSpace::dual_norm(const Vec& g) const {
  return std::sqrt(std::max(0.0, g.dot(chol_.solve(g))));
}

TimeGrid::TimeGrid(double T, int N) : horizon(T), steps(N) {
  if (!(T > 0.0)) throw ConfigError("time horizon must be positive", "horizon");
  if (N < 1) throw ConfigError("step count must be a positive integer", "steps");
}

}  // namespace vhi
