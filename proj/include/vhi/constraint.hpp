#pragma once

#include <functional>
#include <optional>

#include "vhi/space.hpp"

namespace vhi {

/// Nonempty closed convex admissible set K in V.
///
/// Kinds: the whole space, a coordinate box (infinite bounds allowed), a
/// finite intersection of halfspaces {v : C v <= g}, or a user-supplied
/// projection oracle. Every set stores a feasible point.
class ConstraintSet {
public:
  enum class Kind { whole_space, box, halfspaces, custom };

  using ProjectionOracle = std::function<Vec(const InnerProductSpace&, const Vec&)>;

  static ConstraintSet whole_space(int dim);
  /// Bounds may contain +-infinity; feasible defaults to the clipped origin.
  static ConstraintSet box(Vec lower, Vec upper);
  static ConstraintSet halfspaces(Mat c, Vec g, Vec feasible);
  static ConstraintSet custom(int dim, ProjectionOracle oracle, Vec feasible);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Vec& feasible_point() const { return feasible_; }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }

  /// Rows/offsets of the halfspace description. Boxes are exposed in the
  /// same form (finite bounds only); whole_space yields zero rows.
  const Mat& rows() const { return rows_; }
  const Vec& offsets() const { return offsets_; }

  /// Worst constraint violation at v: 0 means feasible. For custom sets the
  /// violation is the V-distance moved by the projection oracle.
  double violation(const InnerProductSpace& space, const Vec& v) const;
  bool contains(const InnerProductSpace& space, const Vec& v, double tol = 1e-10) const;

  bool is_whole_space() const { return kind_ == Kind::whole_space; }

private:
  Kind kind_ = Kind::whole_space;
  int dim_ = 0;
  Vec lower_, upper_;    // box only
  Mat rows_;             // halfspace normal rows (also derived for boxes)
  Vec offsets_;
  Vec feasible_;
  ProjectionOracle oracle_;

  friend Vec project(const ConstraintSet&, const Vec&, const InnerProductSpace&);
};

/// Gram-norm projection onto K: the unique minimizer of ||.-v||_V over K.
/// Boxes with diagonal Gram reduce to clipping; general boxes and halfspace
/// sets are solved as a strictly convex QP; custom oracles are applied and
/// re-applied until idempotent (iteration-limit error on divergence).
Vec project(const ConstraintSet& K, const Vec& v, const InnerProductSpace& space);

}  // namespace vhi
