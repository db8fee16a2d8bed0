#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "vhi/problem.hpp"

namespace vhi {

/// Raised when the well-posedness gate fails; carries the full report.
class SmallnessError : public std::runtime_error {
public:
  explicit SmallnessError(WellPosednessReport report)
      : std::runtime_error("smallness condition violated: " + report.failing),
        report_(std::move(report)) {}
  const WellPosednessReport& report() const { return report_; }

private:
  WellPosednessReport report_;
};

/// One frozen-time instance of the inequality: find u in K with
///   <A(t,u), v-u> + phi~(z, u, v) - phi~(z, u, u) + J0(t, Mu; Mv-Mu)
///     >= <f, v-u>  for all v in K.
/// Holds pointers into an enclosing problem (which must outlive it) plus
/// per-instance caches for ||M||, the gate, and step-size data.
struct StaticInstance {
  const InnerProductSpace* space = nullptr;
  const InnerProductSpace* space_x = nullptr;
  const ConstraintSet* K = nullptr;
  const MonotoneOperatorA* A = nullptr;
  const ConvexBifunction* phi = nullptr;
  const NonsmoothFunctional* J = nullptr;
  const CompactMap* M = nullptr;
  double t = 0.0;
  Vec z;  // frozen history slot
  Vec f;

  static StaticInstance at_node(const VHIProblem& problem, int n, Vec z);
  static StaticInstance make(const InnerProductSpace& space, const InnerProductSpace& space_x,
                             const ConstraintSet& k, const MonotoneOperatorA& a,
                             const ConvexBifunction& phi, const NonsmoothFunctional& j,
                             const CompactMap& m, double t, Vec z, Vec f);

  double m_norm() const;
  const WellPosednessReport& gate() const;
  double lipschitz_A() const;

private:
  mutable std::optional<WellPosednessReport> cached_gate_;
  mutable std::optional<double> cached_lipschitz_;
};

struct ConvexVIResult {
  Vec u;
  int iterations = 0;
  bool direct = false;  // solved by factorization or active-set QP, not iteration
  double step = 0.0;    // last fixed-point step norm (0 for direct solves)
};

/// Solves the convex inner problem obtained by freezing the bifunction state
/// slot at u_bar and replacing the Clarke term with the fixed subgradient
/// zeta: find u in K with
///   <A(t,u) + M^T zeta, v-u> + phi~(z, u_bar, v) - phi~(z, u_bar, u) >= <f, v-u>.
///
/// Affine A with whole-space K and v-linear phi is solved directly; affine
/// symmetric A over a polyhedral K is solved exactly as a strictly convex QP
/// by the active-set method; otherwise the projected fixed-point iteration
///   u <- P_K(u - rho G^{-1} (A(t,u) + M^T zeta + g_phi - f)),  rho = m_A/L_A^2
/// converges geometrically (a prox substep replaces g_phi when a prox oracle
/// exists and K is the whole space).
ConvexVIResult solve_convex_vi(const StaticInstance& inst, const Vec& u_bar, const Vec& zeta,
                               const Vec& guess, double tol, long max_iter = 400000);

struct SolveOptions {
  double inner_tol = -1.0;  // < 0: tol * 1e-2
  int max_outer = 0;        // 0: 10 * ceil(log tol / log q), clamped
  long max_inner = 400000;
};

struct SolveReport {
  Vec u;
  bool converged = false;
  int outer_iterations = 0;
  long inner_iterations = 0;
  double final_step = 0.0;
  std::vector<double> step_norms;
  std::vector<double> contraction_estimates;  // step_norms[k] / step_norms[k-1]
  WellPosednessReport gate;
};

/// Successive approximation for the frozen-time problem: given u^k, freeze
/// the bifunction state slot and the minimal-norm subgradient
/// zeta^k in dJ(t, M u^k), solve the convex inner problem for u^{k+1}, stop
/// when ||u^{k+1} - u^k||_V <= tol. A convex norm-type J on the direct QP
/// path is instead handled exactly inside each inner solve by projected dual
/// ascent on its ball multipliers (a fixed subgradient would oscillate when
/// the solution sticks at the kink). Refuses (SmallnessError) when the gate
/// fails; NonconvergenceError past the iteration cap carries recent iterates.
SolveReport solve_static(const StaticInstance& inst, const Vec& guess, double tol,
                         const SolveOptions& options = {});

struct BruteForceResult {
  Vec u;
  double violation = 0.0;  // worst inequality violation at u over the probe set
  long lattice_points = 0;
};

/// Independent lattice oracle (dim <= 3): returns the lattice point u
/// minimizing the worst inequality violation
///   max_v [ <f - A u, v-u> - phi~(z,u,v) + phi~(z,u,u) - J0(t, Mu; Mv-Mu) ]
/// where v ranges over the lattice plus box vertices and local offsets.
/// Candidates are scanned lexicographically with an early-exit bound, so the
/// reported minimizer is exact for the probe set and ties resolve to the
/// lexicographically smallest lattice point. K must be a bounded box, or
/// `bounding_box` (lower, upper) must be supplied.
BruteForceResult brute_force_static(const StaticInstance& inst, double grid_step,
                                    std::optional<std::pair<Vec, Vec>> bounding_box = {});

struct ResidualReport {
  double worst = 0.0;  // min over probes of LHS - RHS (negative = violated)
  int argmin = -1;
  int probe_count = 0;
};

/// Verifies the inequality at u against probe directions. Empty `probes`
/// requests the default set: 1e3 Halton points projected onto K plus
/// constraint-active directions. A supplied probe outside K is rejected
/// (ConfigError naming its index).
ResidualReport residual_static(const StaticInstance& inst, const Vec& u,
                               const std::vector<Vec>& probes = {});

}  // namespace vhi
