#include "vhi/constraint.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "vhi/errors.hpp"
#include "vhi/qp.hpp"

namespace vhi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec clip_to_box(const Vec& v, const Vec& lo, const Vec& up) {
  return v.cwiseMax(lo).cwiseMin(up);
}

// Finite box bounds as halfspace rows  +-e_i^T v <= bound.
void box_rows(const Vec& lo, const Vec& up, Mat& rows, Vec& offsets) {
  std::vector<std::pair<int, double>> entries;  // (signed coordinate, offset)
  for (int i = 0; i < lo.size(); ++i) {
    if (std::isfinite(up[i])) entries.push_back({i + 1, up[i]});
    if (std::isfinite(lo[i])) entries.push_back({-(i + 1), -lo[i]});
  }
  rows = Mat::Zero(static_cast<int>(entries.size()), lo.size());
  offsets = Vec::Zero(static_cast<int>(entries.size()));
  for (int k = 0; k < static_cast<int>(entries.size()); ++k) {
    const int coord = std::abs(entries[k].first) - 1;
    rows(k, coord) = entries[k].first > 0 ? 1.0 : -1.0;
    offsets[k] = entries[k].second;
  }
}

bool gram_is_diagonal(const Mat& g) {
  const double scale = g.cwiseAbs().maxCoeff();
  for (int i = 0; i < g.rows(); ++i) {
    for (int j = 0; j < g.cols(); ++j) {
      if (i != j && std::abs(g(i, j)) > 1e-14 * scale) return false;
    }
  }
  return true;
}

}  // namespace

ConstraintSet ConstraintSet::whole_space(int dim) {
  ConstraintSet k;
  k.kind_ = Kind::whole_space;
  k.dim_ = dim;
  k.feasible_ = Vec::Zero(dim);
  return k;
}

ConstraintSet ConstraintSet::box(Vec lower, Vec upper) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw ConfigError("box bounds must be non-empty and of equal size", "bounds");
  }
  for (int i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i])) {
      throw ConfigError("box has empty coordinate range", "bounds");
    }
  }
  ConstraintSet k;
  k.kind_ = Kind::box;
  k.dim_ = static_cast<int>(lower.size());
  k.lower_ = std::move(lower);
  k.upper_ = std::move(upper);
  k.feasible_ = clip_to_box(Vec::Zero(k.dim_), k.lower_, k.upper_);
  box_rows(k.lower_, k.upper_, k.rows_, k.offsets_);
  return k;
}

ConstraintSet ConstraintSet::halfspaces(Mat c, Vec g, Vec feasible) {
  if (c.rows() != g.size() || c.rows() == 0) {
    throw ConfigError("halfspace rows and offsets must match", "constraints");
  }
  if (feasible.size() != c.cols()) {
    throw ConfigError("feasible point has wrong dimension", "constraints");
  }
  const double viol = (c * feasible - g).maxCoeff();
  if (viol > 1e-10 * (1.0 + g.cwiseAbs().maxCoeff())) {
    throw ConfigError("declared feasible point violates the constraints", "constraints");
  }
  ConstraintSet k;
  k.kind_ = Kind::halfspaces;
  k.dim_ = static_cast<int>(c.cols());
  k.rows_ = std::move(c);
  k.offsets_ = std::move(g);
  k.feasible_ = std::move(feasible);
  return k;
}

ConstraintSet ConstraintSet::custom(int dim, ProjectionOracle oracle, Vec feasible) {
  if (!oracle) throw ConfigError("custom constraint set requires a projection oracle", "oracle");
  ConstraintSet k;
  k.kind_ = Kind::custom;
  k.dim_ = dim;
  k.oracle_ = std::move(oracle);
  k.feasible_ = std::move(feasible);
  return k;
}

double ConstraintSet::violation(const InnerProductSpace& space, const Vec& v) const {
  switch (kind_) {
    case Kind::whole_space:
      return 0.0;
    case Kind::box: {
      double worst = 0.0;
      for (int i = 0; i < dim_; ++i) {
        worst = std::max(worst, lower_[i] - v[i]);
        worst = std::max(worst, v[i] - upper_[i]);
      }
      return worst;
    }
    case Kind::halfspaces:
      return std::max(0.0, (rows_ * v - offsets_).maxCoeff());
    case Kind::custom:
      return space.dist(oracle_(space, v), v);
  }
  return 0.0;
}

bool ConstraintSet::contains(const InnerProductSpace& space, const Vec& v, double tol) const {
  return violation(space, v) <= tol;
}

Vec project(const ConstraintSet& K, const Vec& v, const InnerProductSpace& space) {
  if (v.size() != K.dim()) throw ConfigError("projection argument has wrong dimension");
  switch (K.kind()) {
    case ConstraintSet::Kind::whole_space:
      return v;
    case ConstraintSet::Kind::box:
      if (gram_is_diagonal(space.gram())) {
        // Diagonal Gram decouples the coordinates, so clipping is exact.
        return v.cwiseMax(K.lower()).cwiseMin(K.upper());
      }
      [[fallthrough]];
    case ConstraintSet::Kind::halfspaces: {
      if (K.rows().rows() == 0) return v;  // box with no finite bounds
      const Vec q = -(space.gram() * v);
      Vec start = K.kind() == ConstraintSet::Kind::box
                      ? Vec(v.cwiseMax(K.lower()).cwiseMin(K.upper()))
                      : K.feasible_point();
      if ((K.rows() * start - K.offsets()).maxCoeff() > 0.0) start = K.feasible_point();
      return solve_qp_active_set(space.gram(), space.chol(), q, K.rows(), K.offsets(), start).x;
    }
    case ConstraintSet::Kind::custom: {
      Vec p = K.oracle_(space, v);
      const double scale = 1.0 + space.norm(p);
      for (int iter = 0; iter < 100; ++iter) {
        const Vec p2 = K.oracle_(space, p);
        if (space.dist(p2, p) <= 1e-12 * scale) return p2;
        p = p2;
      }
      throw NonconvergenceError("custom projection oracle failed to reach a fixed point");
    }
  }
  throw ConfigError("unknown constraint kind");
}

}  // namespace vhi
