#pragma once

#include <string>
#include <vector>

#include "vhi/constraint.hpp"
#include "vhi/history.hpp"
#include "vhi/operators.hpp"
#include "vhi/space.hpp"

namespace vhi {

/// Outcome of the well-posedness (smallness) gate.
struct WellPosednessReport {
  bool pass = false;
  bool contraction_ok = false;  // m_A > alpha_phi + m_J ||M||^2
  bool coercivity_ok = false;   // alpha_A > 2 m_J ||M||^2
  double m_A = 0.0;
  double alpha_A = 0.0;
  double alpha_phi = 0.0;
  double m_J = 0.0;
  double m_norm = 0.0;  // computed ||M||
  /// Successive-approximation contraction rate (alpha_phi + m_J ||M||^2)/m_A.
  double q = 0.0;
  /// Continuous-dependence constant 1/(m_A - alpha_phi - m_J ||M||^2);
  /// +inf when the gate fails.
  double c = 0.0;
  /// Human-readable name of the first violated inequality, empty on pass.
  std::string failing;
};

/// Discrete history-dependent variational-hemivariational inequality: find a
/// trajectory u with u(t) in K and, for all v in K,
///   <A(t,u), v-u> + phi~((Su)(t), u, v) - phi~((Su)(t), u, u)
///     + J0(t, Mu; Mv - Mu) >= <f(t), v-u>.
struct VHIProblem {
  InnerProductSpace space;   // V
  InnerProductSpace spaceX;  // X
  TimeGrid grid;
  ConstraintSet K;
  MonotoneOperatorA A;
  ConvexBifunction phi;
  NonsmoothFunctional J;
  CompactMap M;
  HistoryOperator S;
  std::vector<Vec> f;  // one dual vector per grid node

  /// Structural validation: dimensions, f sampled on every node, feasible
  /// point admissible, required constants present. Throws ConfigError naming
  /// the offending field.
  void validate() const;
};

/// Evaluates the two smallness inequalities with the computed ||M||:
///   (a) m_A > alpha_phi + m_J ||M||^2   (contraction)
///   (b) alpha_A > 2 m_J ||M||^2         (coercivity)
WellPosednessReport check_smallness(const VHIProblem& problem);

/// Same gate from raw constants (||M|| already known).
WellPosednessReport check_smallness_constants(double m_a, double alpha_a, double alpha_phi,
                                              double m_j, double m_norm);

}  // namespace vhi
