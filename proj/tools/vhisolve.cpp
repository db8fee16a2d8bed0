// Batch driver: reads a scenario config, runs the gate / solve / brute-force
// oracle, and writes trajectories, fields, and diagnostics.
//
// Exit codes: 0 success, 1 configuration or I/O error, 2 well-posedness gate
// failure, 3 solver nonconvergence. VHI_THREADS caps the oracle's scan
// threads; everything else is single-threaded and deterministic.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vhi/config.hpp"
#include "vhi/runner.hpp"
#include "vhi/static_solver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"history-dependent variational-hemivariational inequality solver"};
  app.require_subcommand(1);

  std::string config_path, out_dir, mode;
  int steps = 0;
  bool quiet = false;

  const auto add_common = [&](CLI::App* cmd, bool with_mode) {
    cmd->add_option("config", config_path, "scenario config file")->required();
    cmd->add_option("--out", out_dir, "output directory (overrides the config)");
    cmd->add_option("--steps", steps, "override the number of time steps")
        ->check(CLI::PositiveNumber);
    if (with_mode)
      cmd->add_option("--mode", mode, "stepping mode")
          ->check(CLI::IsMember({"marching", "fixed-point"}));
    cmd->add_flag("--quiet", quiet, "suppress progress output");
  };

  CLI::App* solve = app.add_subcommand("solve", "run the scenario and write all outputs");
  add_common(solve, true);
  CLI::App* check = app.add_subcommand("check", "evaluate the well-posedness gate only");
  add_common(check, false);
  CLI::App* oracle =
      app.add_subcommand("oracle", "brute-force trajectory (dim <= 3, bounded box)");
  add_common(oracle, false);

  CLI11_PARSE(app, argc, argv);

  vhi::RunOptions options;
  options.out_dir = out_dir;
  if (steps > 0) options.steps_override = steps;
  if (!mode.empty())
    options.mode_override =
        mode == "marching" ? vhi::SteppingMode::marching : vhi::SteppingMode::fixed_point;
  options.quiet = quiet;

  try {
    const vhi::ScenarioConfig config = vhi::load_config(config_path);
    if (solve->parsed()) return vhi::run_solve(config, options, std::cout);
    if (check->parsed()) return vhi::run_check(config, options, std::cout);
    return vhi::run_oracle(config, options, std::cout);
  } catch (const vhi::SmallnessError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return vhi::exit_gate_failure;
  } catch (const vhi::NonconvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return vhi::exit_nonconvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
