#include "vhi/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "json.hpp"
#include "vhi/io.hpp"
#include "vhi/static_solver.hpp"

namespace vhi {

namespace {

using json = nlohmann::ordered_json;

/// JSON has no infinities; keep them readable instead of nlohmann's null.
json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

json gate_json(const WellPosednessReport& r) {
  return json{{"pass", r.pass},
              {"contraction_ok", r.contraction_ok},
              {"coercivity_ok", r.coercivity_ok},
              {"m_A", r.m_A},
              {"alpha_A", r.alpha_A},
              {"alpha_phi", r.alpha_phi},
              {"m_J", r.m_J},
              {"m_norm", r.m_norm},
              {"q", r.q},
              {"c", finite_or_string(r.c)},
              {"failing", r.failing}};
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path, path);
  out << j.dump(2) << "\n";
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path, path);
  out << text;
}

/// The echoed scenario keeps the config's own output directory: --out moves
/// the tree, it does not change the scenario, and determinism tests compare
/// trees written to different places.
void write_scenario_echo(const ScenarioConfig& effective, const ScenarioConfig& original,
                         const std::string& dir) {
  ScenarioConfig echo = effective;
  echo.out_dir = original.out_dir;
  write_text(serialize_config(echo), dir + "/scenario.cfg");
}

std::string ensure_out_dir(const ScenarioConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + cfg.out_dir, "output.directory");
  return cfg.out_dir;
}

void write_gate_report(const GateOutcome& gates, const std::string& dir) {
  json j{{"pass", gates.pass()},
         {"failing", gates.failing()},
         {"enforced", gates.enforce_theorem ? json::array({"theorem", "stepping"})
                                            : json::array({"stepping"})},
         {"theorem_gate", gate_json(gates.theorem)},
         {"stepping_gate", gate_json(gates.stepping)}};
  write_json(j, dir + "/wellposedness.json");
}

json stepping_json(const SteppingReport& report) {
  long outer = 0, inner = 0;
  for (const SolveReport& r : report.node_reports) {
    outer += r.outer_iterations;
    inner += r.inner_iterations;
  }
  return json{{"mode", report.mode == SteppingMode::marching ? "marching" : "fixed-point"},
              {"sweeps", report.sweeps},
              {"sweep_distances", report.sweep_distances},
              {"fitted_rate", report.fitted_rate},
              {"outer_iterations", outer},
              {"inner_iterations", inner}};
}

json problem_json(const ScenarioConfig& cfg, int dofs) {
  return json{{"mode", cfg.mode == ScenarioConfig::Mode::abstract ? "abstract" : "contact"},
              {"dofs", dofs},
              {"horizon", cfg.grid.horizon},
              {"steps", cfg.grid.steps},
              {"stepping_mode",
               cfg.solver_mode == SteppingMode::marching ? "marching" : "fixed-point"},
              {"tolerance", cfg.tolerance},
              {"max_sweeps", cfg.max_sweeps}};
}

/// Worst-case contact-law residuals over all rows; sliding rows are those
/// with tangential speed above 1e-8.
json contact_summary_json(const ContactSolution& sol, double friction_bound) {
  double violation = 0.0, complementarity = 0.0, friction = 0.0, alignment = 0.0;
  double traction_scale = 0.0, divergence = 0.0;
  int rows = 0, active = 0, sliding = 0;
  for (const auto& at_node : sol.residuals)
    for (const ContactResidualRow& r : at_node) {
      ++rows;
      violation = std::max(violation, r.w_nu - r.gap);
      complementarity = std::max(complementarity, r.complementarity);
      friction = std::max(friction, r.sigma_tau_norm);
      traction_scale =
          std::max(traction_scale, std::abs(r.sigma_nu) + r.p_term + std::abs(r.memory_term));
      if (std::isfinite(r.gap) && r.gap - r.w_nu <= 1e-8) ++active;
      const double speed = r.w_tau.norm();
      if (speed > 1e-8) {
        ++sliding;
        alignment =
            std::max(alignment, std::abs(r.sigma_tau.dot(r.w_tau) + friction_bound * speed));
      }
    }
  for (double d : sol.divergence) divergence = std::max(divergence, d);
  return json{{"rows", rows},
              {"max_constraint_violation", std::max(0.0, violation)},
              {"max_complementarity", complementarity},
              {"max_friction_norm", friction},
              {"friction_bound", friction_bound},
              {"sliding_rows", sliding},
              {"bound_active_rows", active},
              {"max_alignment_residual", alignment},
              {"traction_scale", traction_scale},
              {"max_divergence_residual", divergence}};
}

void log_gates(const GateOutcome& gates, std::ostream& log, bool quiet) {
  if (quiet) return;
  log << "gate: " << (gates.pass() ? "pass" : "FAIL") << " (stepping m_A = "
      << format_number(gates.stepping.m_A)
      << ", alpha = " << format_number(gates.stepping.alpha_phi)
      << "; theorem alpha = " << format_number(gates.theorem.alpha_phi) << ")\n";
  if (!gates.pass()) log << "violated: " << gates.failing() << "\n";
}

}  // namespace

ScenarioConfig effective_config(ScenarioConfig config, const RunOptions& options) {
  if (options.steps_override) config.grid = TimeGrid(config.grid.horizon, *options.steps_override);
  if (options.mode_override) config.solver_mode = *options.mode_override;
  if (!options.out_dir.empty()) config.out_dir = options.out_dir;
  return config;
}

bool GateOutcome::pass() const {
  return stepping.pass && (!enforce_theorem || theorem.pass);
}

std::string GateOutcome::failing() const {
  if (enforce_theorem && !theorem.pass) return "theorem gate: " + theorem.failing;
  if (!stepping.pass) return "stepping gate: " + stepping.failing;
  return {};
}

GateOutcome evaluate_gates(const VHIProblem& problem, ScenarioConfig::Mode mode) {
  GateOutcome out;
  out.theorem = check_smallness(problem);
  out.stepping = stepping_gate(problem);
  out.enforce_theorem = mode == ScenarioConfig::Mode::contact;
  return out;
}

int run_check(const ScenarioConfig& config, const RunOptions& options, std::ostream& log) {
  const ScenarioConfig cfg = effective_config(config, options);
  const bool contact_mode = cfg.mode == ScenarioConfig::Mode::contact;

  GateOutcome gates;
  if (contact_mode) {
    const ContactSystem system = build_contact(cfg);
    if (system.assembly->contact_empty())
      log << "warning: empty contact boundary, model degenerates to unconstrained "
             "viscoelasticity\n";
    gates = evaluate_gates(system.problem, cfg.mode);
  } else {
    const VHIProblem problem = build_abstract(cfg);
    gates = evaluate_gates(problem, cfg.mode);
  }

  const std::string dir = ensure_out_dir(cfg);
  write_scenario_echo(cfg, config, dir);
  write_gate_report(gates, dir);
  log_gates(gates, log, options.quiet);
  if (!options.quiet) log << "wrote " << dir << "/wellposedness.json\n";
  return gates.pass() ? exit_ok : exit_gate_failure;
}

int run_solve(const ScenarioConfig& config, const RunOptions& options, std::ostream& log) {
  const ScenarioConfig cfg = effective_config(config, options);
  const std::string dir = ensure_out_dir(cfg);
  write_scenario_echo(cfg, config, dir);

  StepperOptions stepper_options;
  stepper_options.max_sweeps = cfg.max_sweeps;

  if (cfg.mode == ScenarioConfig::Mode::abstract) {
    const VHIProblem problem = build_abstract(cfg);
    const GateOutcome gates = evaluate_gates(problem, cfg.mode);
    write_gate_report(gates, dir);
    log_gates(gates, log, options.quiet);
    if (!gates.pass()) return exit_gate_failure;

    json diag{{"verb", "solve"}, {"problem", problem_json(cfg, cfg.abstract.dim)}};
    try {
      auto [trajectory, report] = solve_trajectory(problem, cfg.solver_mode, cfg.tolerance,
                                                   stepper_options);
      export_trajectory_csv(trajectory, dir + "/trajectory.csv");
      diag["status"] = "converged";
      diag["stepping"] = stepping_json(report);
      write_json(diag, dir + "/diagnostics.json");
    } catch (const NonconvergenceError& e) {
      diag["status"] = "nonconverged";
      diag["error"] = e.what();
      write_json(diag, dir + "/diagnostics.json");
      log << "nonconvergence: " << e.what() << "\n";
      return exit_nonconvergence;
    }
    if (!options.quiet)
      log << "solved " << cfg.grid.node_count() << " nodes, wrote " << dir << "\n";
    return exit_ok;
  }

  const ContactSystem system = build_contact(cfg);
  if (system.assembly->contact_empty())
    log << "warning: empty contact boundary, model degenerates to unconstrained "
           "viscoelasticity\n";
  const GateOutcome gates = evaluate_gates(system.problem, cfg.mode);
  write_gate_report(gates, dir);
  log_gates(gates, log, options.quiet);
  if (!gates.pass()) return exit_gate_failure;

  json diag{{"verb", "solve"}, {"problem", problem_json(cfg, system.assembly->dof_count())}};
  try {
    const ContactSolution sol = solve_contact(system, cfg.solver_mode, cfg.tolerance,
                                              stepper_options);
    export_trajectory_csv(sol.w, dir + "/trajectory.csv");
    if (cfg.write_trace) export_contact_trace_csv(sol.residuals, dir + "/gamma3_trace.csv");
    if (cfg.write_fields) export_fields(sol, *system.assembly, dir);
    diag["status"] = "converged";
    diag["stepping"] = stepping_json(sol.report);
    diag["contact"] = contact_summary_json(sol, system.assembly->contact().friction_bound);
    write_json(diag, dir + "/diagnostics.json");
    if (!options.quiet) {
      const json& c = diag["contact"];
      log << "solved " << cfg.grid.node_count() << " nodes, "
          << system.assembly->dof_count() << " dofs\n";
      log << "contact: violation " << format_number(c["max_constraint_violation"].get<double>())
          << ", complementarity " << format_number(c["max_complementarity"].get<double>())
          << ", max |sigma_tau| " << format_number(c["max_friction_norm"].get<double>()) << "\n";
      log << "wrote " << dir << "\n";
    }
  } catch (const NonconvergenceError& e) {
    diag["status"] = "nonconverged";
    diag["error"] = e.what();
    write_json(diag, dir + "/diagnostics.json");
    log << "nonconvergence: " << e.what() << "\n";
    return exit_nonconvergence;
  }
  return exit_ok;
}

int run_oracle(const ScenarioConfig& config, const RunOptions& options, std::ostream& log) {
  const ScenarioConfig cfg = effective_config(config, options);
  if (cfg.mode != ScenarioConfig::Mode::abstract)
    throw ConfigError("oracle runs require mode = abstract", "problem.mode");
  if (cfg.abstract.dim > 3)
    throw ConfigError("oracle runs require dim <= 3", "abstract.dim");
  if (!cfg.abstract.box_lower)
    throw ConfigError("oracle runs require a bounded box (box_lower/box_upper)", "abstract.box_lower");
  double extent = 0.0;
  for (int i = 0; i < cfg.abstract.dim; ++i) {
    const double side = (*cfg.abstract.box_upper)[i] - (*cfg.abstract.box_lower)[i];
    if (!std::isfinite(side)) throw ConfigError("oracle box must be finite", "abstract.box_upper");
    extent = std::max(extent, side);
  }

  const VHIProblem problem = build_abstract(cfg);
  const GateOutcome gates = evaluate_gates(problem, cfg.mode);
  const std::string dir = ensure_out_dir(cfg);
  write_scenario_echo(cfg, config, dir);
  write_gate_report(gates, dir);
  log_gates(gates, log, options.quiet);
  if (!gates.pass()) return exit_gate_failure;

  // Lattice resolution by dimension; the scan cost grows with its power.
  const int divisions = cfg.abstract.dim == 1 ? 256 : cfg.abstract.dim == 2 ? 64 : 16;
  const double grid_step = extent > 0.0 ? extent / divisions : 1e-3;

  HistoryOperator S = problem.S;
  S.set_quadrature(Quadrature::left_rectangle);

  Trajectory trajectory;
  trajectory.grid = cfg.grid;
  std::vector<double> violations;
  long lattice_total = 0;
  for (int n = 0; n < cfg.grid.node_count(); ++n) {
    const Vec z = S.apply(cfg.grid, std::span<const Vec>(trajectory.values), n,
                          problem.space.dim());
    const StaticInstance inst = StaticInstance::at_node(problem, n, z);
    const BruteForceResult r = brute_force_static(inst, grid_step);
    trajectory.values.push_back(r.u);
    violations.push_back(r.violation);
    lattice_total += r.lattice_points;
  }

  export_trajectory_csv(trajectory, dir + "/trajectory.csv");
  double worst = 0.0;
  for (double v : violations) worst = std::max(worst, v);
  json diag{{"verb", "oracle"},
            {"problem", problem_json(cfg, cfg.abstract.dim)},
            {"status", "converged"},
            {"oracle", json{{"grid_step", grid_step},
                            {"lattice_points", lattice_total},
                            {"max_violation", worst},
                            {"violations", violations}}}};
  write_json(diag, dir + "/diagnostics.json");
  if (!options.quiet)
    log << "oracle solved " << cfg.grid.node_count() << " nodes at grid step "
        << format_number(grid_step) << ", wrote " << dir << "\n";
  return exit_ok;
}

}  // namespace vhi
