#pragma once

#include <functional>
#include <span>
#include <vector>

#include "vhi/space.hpp"

namespace vhi {

enum class Quadrature { left_rectangle, trapezoid };

/// Discrete trajectory: one V-coefficient vector per grid node.
struct Trajectory {
  TimeGrid grid;
  std::vector<Vec> values;
};

/// History-dependent (Volterra-type) operator S mapping trajectories to
/// dual-valued trajectories, with discrete Lipschitz constant L_S:
///   ||(S u1)(t_n) - (S u2)(t_n)||_{V*} <= L_S * sum_{m<=n} dt ||u1_m - u2_m||_V.
///
/// Causality is enforced structurally: apply() receives only the prefix of
/// the trajectory it is allowed to read (nodes 0..n-1 for left-rectangle
/// quadrature, 0..n for trapezoid).
class HistoryOperator {
public:
  enum class Kind { zero, volterra, sum, custom };

  using KernelFn = std::function<Vec(double t, double s, const Vec& u_s)>;
  using CustomFn =
      std::function<Vec(const TimeGrid&, std::span<const Vec> prefix, int n, Quadrature)>;

  HistoryOperator() = default;

  static HistoryOperator zero();
  static HistoryOperator volterra(KernelFn kernel, double lipschitz,
                                  Quadrature q = Quadrature::left_rectangle);
  static HistoryOperator custom(CustomFn fn, double lipschitz,
                                Quadrature q = Quadrature::left_rectangle);
  static HistoryOperator sum(std::vector<HistoryOperator> parts);

  Kind kind() const { return kind_; }
  double lipschitz() const { return lipschitz_; }
  Quadrature quadrature() const { return quad_; }
  /// Switches the quadrature rule (recursively for sums); the stepper uses
  /// left-rectangle when marching and trapezoid in fixed-point sweeps.
  void set_quadrature(Quadrature q);

  bool is_zero() const { return kind_ == Kind::zero; }

  /// (S u)(t_n) as a V* coefficient vector. `prefix` must hold at least n
  /// nodes (left-rectangle) or n+1 nodes (trapezoid); dual_dim fixes the
  /// output size, needed when the sum is empty.
  Vec apply(const TimeGrid& grid, std::span<const Vec> prefix, int n, int dual_dim) const;

private:
  Kind kind_ = Kind::zero;
  double lipschitz_ = 0.0;
  Quadrature quad_ = Quadrature::left_rectangle;
  KernelFn kernel_;
  CustomFn custom_;
  std::vector<HistoryOperator> parts_;
};

/// Value of (S u)(t_n) using the operator's own quadrature rule. n = 0
/// yields the zero functional (empty integral).
Vec volterra_apply(const HistoryOperator& s, const Trajectory& u, int n);

/// Pointwise sum with L = L_a + L_b.
HistoryOperator history_sum(HistoryOperator a, HistoryOperator b);

}  // namespace vhi
