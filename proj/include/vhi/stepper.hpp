#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "vhi/static_solver.hpp"

namespace vhi {

enum class SteppingMode { marching, fixed_point };

/// Diagnostics from a trajectory solve. In fixed-point mode sweep_distances
/// holds sup_n ||eta^{(k+1)}_n - eta^{(k)}_n||_{V*} per sweep (the stopping
/// quantity) and sweep_l2_distances the discrete L2-in-time norm of the same
/// increments; after the first sweep the distances are non-increasing up to
/// 5% slack for every instance passing the gate.
struct SteppingReport {
  SteppingMode mode = SteppingMode::marching;
  std::vector<SolveReport> node_reports;  // final static solve at each node
  std::vector<double> sweep_distances;
  std::vector<double> sweep_l2_distances;
  int sweeps = 0;            // 0 in marching mode
  double fitted_rate = 0.0;  // geometric rate of sweep_distances, 0 if inestimable
  WellPosednessReport gate;
};

struct StepperOptions {
  int max_sweeps = 200;
  SolveOptions static_options;
  /// Fixed-point mode seed: one dual vector per grid node. Defaults to S
  /// applied to the trajectory frozen at the feasible point.
  std::optional<std::vector<Vec>> initial_eta;
};

/// Gate for the time stepping: the per-node frozen-history solves contract
/// through the bifunction's u slot only, so this uses alpha_state() in place
/// of the joint four-point constant.
WellPosednessReport stepping_gate(const VHIProblem& problem);

/// Solves the history-dependent inequality on the problem's grid.
///
/// marching: left-rectangle history, so node n's state eta_n is determined
/// by u_0..u_{n-1} and the nodes are solved once, in order (causal).
///
/// fixed_point: trapezoid history; starting from eta^(0) (see StepperOptions)
/// repeat [solve every node with the current eta; eta <- S u] until the
/// sup-node dual distance between consecutive eta iterates is <= tol.
///
/// Both modes refuse (SmallnessError) when stepping_gate fails. A static
/// solve failure or an exhausted sweep budget raises NonconvergenceError
/// carrying the partial trajectory.
std::pair<Trajectory, SteppingReport> solve_trajectory(const VHIProblem& problem,
                                                       SteppingMode mode, double tol,
                                                       const StepperOptions& options = {});

struct ContractionDiagnostics {
  double rate = 0.0;
  bool geometric = false;          // rate < 1 and no ratio after the first exceeds 1.05
  std::vector<double> distances;   // copy of the per-sweep table
  std::vector<double> ratios;      // distances[k+1] / distances[k]
};

/// Least-squares geometric rate of the recorded sweep distances. Exact
/// convergence (final distance 0) reports rate 0 regardless of sweep count;
/// otherwise at least 3 sweeps are required (ConfigError). A report with no
/// sweeps recorded (marching mode) is rejected the same way.
ContractionDiagnostics contraction_diagnostics(const SteppingReport& report);

struct GronwallReport {
  bool pass = false;
  double max_pairwise = 0.0;  // sup-node V-distance over all run pairs
  double tolerance = 0.0;     // the 10 * tol acceptance bound
  int runs = 0;
};

/// Uniqueness probe: runs the fixed-point mode from 5 distinct eta seeds
/// (the default plus 4 deterministic perturbations) and checks that all
/// trajectories agree pairwise within 10 * tol. Refuses (SmallnessError)
/// before running anything when the gate fails.
GronwallReport gronwall_uniqueness_check(const VHIProblem& problem, double tol,
                                         const StepperOptions& options = {});

}  // namespace vhi
