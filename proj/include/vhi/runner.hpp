#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "vhi/config.hpp"

namespace vhi {

/// Exit codes of the batch driver. Configuration and I/O errors surface as
/// ConfigError and map to exit code 1 in the command-line tool.
inline constexpr int exit_ok = 0;
inline constexpr int exit_gate_failure = 2;
inline constexpr int exit_nonconvergence = 3;

struct RunOptions {
  std::string out_dir;  // empty: the config's output directory
  std::optional<int> steps_override;
  std::optional<SteppingMode> mode_override;
  bool quiet = false;
};

/// Command-line overrides folded into the scenario; the result is what a run
/// actually executes and what scenario.cfg echoes.
ScenarioConfig effective_config(ScenarioConfig config, const RunOptions& options);

/// Both well-posedness gates of an assembled problem. The theorem gate uses
/// the joint bifunction constant (the uniqueness inequality); the stepping
/// gate uses the frozen-state constant the per-node solves contract with.
/// Contact runs enforce both. Abstract runs enforce only the stepping gate:
/// the pairing slot is absorbed by the history Gronwall argument, so the
/// scalar memory model (m_A = alpha_phi = 1) is solvable despite sitting on
/// the theorem boundary.
struct GateOutcome {
  WellPosednessReport theorem;
  WellPosednessReport stepping;
  bool enforce_theorem = false;

  bool pass() const;
  /// Names the first violated enforced inequality; empty on pass.
  std::string failing() const;
};

GateOutcome evaluate_gates(const VHIProblem& problem, ScenarioConfig::Mode mode);

/// Full run: writes scenario.cfg, wellposedness.json, trajectory.csv,
/// diagnostics.json, and in contact mode gamma3_trace.csv plus the VTK
/// series. Returns exit_ok, exit_gate_failure, or exit_nonconvergence.
int run_solve(const ScenarioConfig& config, const RunOptions& options, std::ostream& log);

/// Gate only: writes scenario.cfg and wellposedness.json.
int run_check(const ScenarioConfig& config, const RunOptions& options, std::ostream& log);

/// Brute-force trajectory (abstract mode, dim <= 3, bounded box K): every
/// node is solved by the lattice oracle instead of the iterative solver.
/// Writes trajectory.csv and diagnostics.json with the per-node violations.
int run_oracle(const ScenarioConfig& config, const RunOptions& options, std::ostream& log);

}  // namespace vhi
