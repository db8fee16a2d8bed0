#include "vhi/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <string>

#include "vhi/errors.hpp"

namespace vhi {

namespace {

// Geometric rate of a positive decay sequence by least squares on log d_k.
// Returns 0 when no rate is estimable (fewer than two positive entries or
// exact convergence).
double fit_geometric_rate(const std::vector<double>& d) {
  if (d.empty() || d.back() == 0.0) return 0.0;
  std::vector<double> logs;
  logs.reserve(d.size());
  for (double x : d)
    if (x > 0.0) logs.push_back(std::log(x));
  const int n = static_cast<int>(logs.size());
  if (n < 2) return 0.0;
  if (n == 2) return std::exp(logs[1] - logs[0]);
  double kbar = 0.0, ybar = 0.0;
  for (int k = 0; k < n; ++k) {
    kbar += k;
    ybar += logs[k];
  }
  kbar /= n;
  ybar /= n;
  double num = 0.0, den = 0.0;
  for (int k = 0; k < n; ++k) {
    num += (k - kbar) * (logs[k] - ybar);
    den += (k - kbar) * (k - kbar);
  }
  return std::exp(num / den);
}

// eta^(0): S applied to the trajectory frozen at the feasible point.
std::vector<Vec> default_initial_eta(const VHIProblem& problem, const HistoryOperator& s) {
  const int nodes = problem.grid.node_count();
  const int dim = problem.space.dim();
  const std::vector<Vec> frozen(nodes, problem.K.feasible_point());
  std::vector<Vec> eta(nodes);
  for (int n = 0; n < nodes; ++n)
    eta[n] = s.apply(problem.grid, std::span<const Vec>(frozen.data(), frozen.size()), n, dim);
  return eta;
}

// Discrete L2-in-time norm of per-node dual distances (trapezoid weights).
double l2_in_time(const InnerProductSpace& space, const TimeGrid& grid,
                  const std::vector<Vec>& a, const std::vector<Vec>& b) {
  const int nodes = grid.node_count();
  double acc = 0.0;
  for (int n = 0; n < nodes; ++n) {
    const double w = (n == 0 || n == nodes - 1) ? 0.5 * grid.dt() : grid.dt();
    const double d = space.dual_dist(a[n], b[n]);
    acc += w * d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

WellPosednessReport stepping_gate(const VHIProblem& problem) {
  const double m_norm = problem.M.norm(problem.space, problem.spaceX).norm;
  return check_smallness_constants(problem.A.m_A(), problem.A.alpha_A(),
                                   problem.phi.alpha_state(), problem.J.m_J(), m_norm);
}

std::pair<Trajectory, SteppingReport> solve_trajectory(const VHIProblem& problem,
                                                       SteppingMode mode, double tol,
                                                       const StepperOptions& options) {
  problem.validate();
  SteppingReport report;
  report.mode = mode;
  report.gate = stepping_gate(problem);
  if (!report.gate.pass) throw SmallnessError(report.gate);
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive", "tol");
  const int nodes = problem.grid.node_count();
  const int dim = problem.space.dim();

  Trajectory traj;
  traj.grid = problem.grid;

  if (mode == SteppingMode::marching) {
    HistoryOperator s = problem.S;
    s.set_quadrature(Quadrature::left_rectangle);
    traj.values.reserve(nodes);
    report.node_reports.reserve(nodes);
    for (int n = 0; n < nodes; ++n) {
      const Vec eta_n =
          s.apply(problem.grid, std::span<const Vec>(traj.values.data(), traj.values.size()),
                  n, dim);
      const StaticInstance inst = StaticInstance::at_node(problem, n, eta_n);
      const Vec& guess = (n == 0) ? problem.K.feasible_point() : traj.values.back();
      try {
        report.node_reports.push_back(solve_static(inst, guess, tol, options.static_options));
      } catch (const NonconvergenceError& e) {
        throw NonconvergenceError(
            "static solve failed at node " + std::to_string(n) + ": " + e.what(),
            traj.values);
      }
      traj.values.push_back(report.node_reports.back().u);
    }
    return {std::move(traj), std::move(report)};
  }

  // fixed-point mode
  HistoryOperator s = problem.S;
  s.set_quadrature(Quadrature::trapezoid);
  std::vector<Vec> eta;
  if (options.initial_eta) {
    eta = *options.initial_eta;
    if (static_cast<int>(eta.size()) != nodes)
      throw ConfigError("initial_eta must hold one vector per grid node", "initial_eta");
    for (const Vec& e : eta)
      if (e.size() != dim)
        throw ConfigError("initial_eta entry has wrong dimension", "initial_eta");
  } else {
    eta = default_initial_eta(problem, s);
  }

  std::vector<Vec> u(nodes, problem.K.feasible_point());
  std::vector<Vec> eta_next(nodes);
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    report.node_reports.clear();
    report.node_reports.reserve(nodes);
    for (int n = 0; n < nodes; ++n) {
      const StaticInstance inst = StaticInstance::at_node(problem, n, eta[n]);
      try {
        report.node_reports.push_back(solve_static(inst, u[n], tol, options.static_options));
      } catch (const NonconvergenceError& e) {
        throw NonconvergenceError("static solve failed at node " + std::to_string(n) +
                                      " in sweep " + std::to_string(sweep) + ": " + e.what(),
                                  u);
      }
      u[n] = report.node_reports.back().u;
    }
    for (int n = 0; n < nodes; ++n)
      eta_next[n] = s.apply(problem.grid, std::span<const Vec>(u.data(), u.size()), n, dim);
    double sup = 0.0;
    for (int n = 0; n < nodes; ++n)
      sup = std::max(sup, problem.space.dual_dist(eta_next[n], eta[n]));
    report.sweep_distances.push_back(sup);
    report.sweep_l2_distances.push_back(l2_in_time(problem.space, problem.grid, eta_next, eta));
    report.sweeps = sweep + 1;
    eta.swap(eta_next);
    if (sup <= tol) {
      report.fitted_rate = fit_geometric_rate(report.sweep_distances);
      traj.values = std::move(u);
      return {std::move(traj), std::move(report)};
    }
  }
  throw NonconvergenceError("fixed-point sweep budget (" + std::to_string(options.max_sweeps) +
                                ") exhausted before the eta increments reached tolerance",
                            u);
}

ContractionDiagnostics contraction_diagnostics(const SteppingReport& report) {
  const auto& d = report.sweep_distances;
  if (d.empty())
    throw ConfigError("no fixed-point sweeps recorded (marching reports carry none)",
                      "sweep_distances");
  ContractionDiagnostics out;
  out.distances = d;
  for (std::size_t k = 0; k + 1 < d.size(); ++k)
    out.ratios.push_back(d[k] > 0.0 ? d[k + 1] / d[k] : 0.0);
  if (d.back() == 0.0) {
    // exact convergence (e.g. S = zero in one sweep): nothing left to fit
    out.rate = 0.0;
    out.geometric = true;
    return out;
  }
  if (d.size() < 3)
    throw ConfigError("need at least 3 sweeps to fit a geometric rate", "sweep_distances");
  out.rate = fit_geometric_rate(d);
  out.geometric = out.rate < 1.0;
  // the first increment may overshoot; afterwards decay must be monotone
  // up to 5% slack
  for (std::size_t k = 1; k < out.ratios.size(); ++k)
    if (out.ratios[k] > 1.05) out.geometric = false;
  return out;
}

GronwallReport gronwall_uniqueness_check(const VHIProblem& problem, double tol,
                                         const StepperOptions& options) {
  const WellPosednessReport gate = stepping_gate(problem);
  if (!gate.pass) throw SmallnessError(gate);

  HistoryOperator s = problem.S;
  s.set_quadrature(Quadrature::trapezoid);
  const std::vector<Vec> base = default_initial_eta(problem, s);
  const int nodes = problem.grid.node_count();
  const int dim = problem.space.dim();

  GronwallReport rep;
  rep.runs = 5;
  rep.tolerance = 10.0 * tol;
  std::vector<Trajectory> trajectories;
  trajectories.reserve(rep.runs);
  for (int r = 0; r < rep.runs; ++r) {
    StepperOptions opt = options;
    if (r > 0) {
      std::mt19937 rng(777 + r);
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::vector<Vec> eta = base;
      for (Vec& e : eta) {
        Vec noise(dim);
        for (int i = 0; i < dim; ++i) noise[i] = gauss(rng);
        const double nn = problem.space.dual_norm(noise);
        if (nn > 0.0) e += (0.5 / nn) * noise;
      }
      opt.initial_eta = std::move(eta);
    }
    trajectories.push_back(
        solve_trajectory(problem, SteppingMode::fixed_point, tol, opt).first);
  }
  for (int a = 0; a < rep.runs; ++a)
    for (int b = a + 1; b < rep.runs; ++b)
      for (int n = 0; n < nodes; ++n)
        rep.max_pairwise = std::max(
            rep.max_pairwise,
            problem.space.dist(trajectories[a].values[n], trajectories[b].values[n]));
  rep.pass = rep.max_pairwise <= rep.tolerance;
  return rep;
}

}  // namespace vhi
