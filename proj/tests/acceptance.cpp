// Acceptance gate: ten criteria, one [PASS]/[FAIL] line each, exit code =
// number of failures. Every tolerance and budget is pinned here on purpose;
// a red line means the library broke its contract, not that a knob moved.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/contact_oracles.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"
#include "vhi/config.hpp"
#include "vhi/contact.hpp"
#include "vhi/errors.hpp"
#include "vhi/runner.hpp"
#include "vhi/static_solver.hpp"
#include "vhi/stepper.hpp"

namespace fs = std::filesystem;
using vhi::Mat;
using vhi::StaticInstance;
using vhi::Vec;
using vhi::VHIProblem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool ok = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

// ---------------------------------------------------------------- criterion 1

// Instance whose gate outcome is known by construction: the operator
// constants are declared, J carries m_J = mu exactly, and M is scaled to a
// target norm; margins of at least 1e-3 on both inequalities keep the
// measured ||M|| (accurate to ~1e-10) from ever flipping a label.
struct LabeledInstance {
  VHIProblem problem;
  bool expected = false;
};

LabeledInstance labeled_instance(int i) {
  std::mt19937 rng(900u + static_cast<unsigned>(i));
  const int dim = 1 + i % 3;
  const Mat g = oracles::random_spd(dim, rng, 5.0);
  const Mat gx = oracles::random_spd(dim, rng, 3.0);
  const vhi::InnerProductSpace space(g);
  const vhi::InnerProductSpace space_x(gx);
  const bool want_pass = (i % 2 == 0);

  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double m_a = 0, alpha_a = 0, alpha_phi = 0, mu = 0, n_t = 0;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    m_a = 0.3 + 2.7 * u01(rng);
    alpha_a = 0.1 + 2.9 * u01(rng);
    alpha_phi = 2.0 * u01(rng);
    mu = 0.8 * u01(rng);
    n_t = 0.4 + 1.0 * u01(rng);
    const double contraction = m_a - (alpha_phi + mu * n_t * n_t);
    const double coercivity = alpha_a - 2.0 * mu * n_t * n_t;
    if (std::abs(contraction) < 1e-3 || std::abs(coercivity) < 1e-3) continue;
    if ((contraction > 0.0 && coercivity > 0.0) == want_pass) break;
  }

  auto a = vhi::MonotoneOperatorA::from_eval(
      [g](double, const Vec& u) { return Vec(g * u); },
      vhi::MonotoneOperatorA::Constants{m_a, alpha_a, 1.0, nullptr});
  auto phi = vhi::ConvexBifunction::from_oracle(
      [](const Vec&, const Vec&, const Vec&) { return 0.0; },
      [dim](const Vec&, const Vec&, const Vec&) { return Vec(Vec::Zero(dim)); }, alpha_phi,
      true);
  auto j = vhi::NonsmoothFunctional::concave_quadratic(mu, gx);

  const Mat m_raw = oracles::random_vec(dim * dim, rng, 1.0).reshaped(dim, dim);
  const double raw_norm = vhi::operator_norm(m_raw, space, space_x).norm;
  vhi::CompactMap m((n_t / raw_norm) * m_raw);

  const vhi::TimeGrid grid(1.0, 1);
  std::vector<Vec> f(static_cast<size_t>(grid.node_count()), Vec::Zero(dim));
  auto s = vhi::HistoryOperator::volterra(
      [](double, double, const Vec& u_s) { return Vec(Vec::Zero(u_s.size())); }, 0.0);

  VHIProblem problem{space,        space_x, grid, vhi::ConstraintSet::whole_space(dim),
                     std::move(a), std::move(phi), std::move(j), std::move(m), std::move(s),
                     std::move(f)};
  return LabeledInstance{std::move(problem), want_pass};
}

Outcome criterion1() {
  int matched = 0;
  for (int i = 0; i < 50; ++i) {
    const LabeledInstance li = labeled_instance(i);
    const auto rep = vhi::check_smallness(li.problem);
    if (rep.pass == li.expected) ++matched;
  }
  return {matched == 50, fmt("%.0f/50 labels matched", static_cast<double>(matched))};
}

// ---------------------------------------------------------------- criterion 2

// Random well-posed instance with every hypothesis active and a box small
// enough (half width 0.45) that the dim-2 lattice at step 1e-3 stays within
// the brute-force budget. Mirrors the recipe of instances::random_wellposed.
VHIProblem boxed_instance(unsigned seed, int dim, double half) {
  std::mt19937 rng(seed);
  const Mat g = oracles::random_spd(dim, rng, 4.0);
  const Mat gx = oracles::random_spd(dim, rng, 3.0);
  const vhi::InnerProductSpace space(g);
  const vhi::InnerProductSpace space_x(gx);
  const vhi::TimeGrid grid(1.0, 4);

  const Vec s0 = oracles::random_vec(dim, rng, 0.2);
  auto a = vhi::MonotoneOperatorA::affine(space, 2.0 * g,
                                          [s0](double t) { return Vec(std::cos(t) * s0); });

  const Mat g_inv = g.llt().solve(Mat::Identity(dim, dim));
  const vhi::InnerProductSpace dual_space(0.5 * (g_inv + g_inv.transpose()));
  const Mat p_raw = oracles::random_vec(dim * dim, rng, 1.0).reshaped(dim, dim);
  const double p_norm = vhi::operator_norm(p_raw, space, dual_space).norm;
  const Mat p_mat = (0.3 / p_norm) * p_raw;
  vhi::ConvexBifunction::POperator pop;
  pop.apply = [p_mat](const Vec& u) { return Vec(p_mat * u); };
  pop.lipschitz = 0.3;

  const Mat m_raw = oracles::random_vec(dim * dim, rng, 1.0).reshaped(dim, dim);
  const double m_norm = vhi::operator_norm(m_raw, space, space_x).norm;

  auto s = vhi::HistoryOperator::volterra(
      [g](double t, double s_, const Vec& u_s) {
        return Vec(0.5 * std::exp(s_ - t) * g * u_s);
      },
      0.5);

  const Vec f0 = g * oracles::random_vec(dim, rng, 0.5);
  const Vec f1 = g * oracles::random_vec(dim, rng, 0.3);
  std::vector<Vec> f(static_cast<size_t>(grid.node_count()));
  for (int n = 0; n < grid.node_count(); ++n) f[n] = f0 + std::sin(2.0 * grid.node(n)) * f1;

  return VHIProblem{space,
                    space_x,
                    grid,
                    vhi::ConstraintSet::box(Vec::Constant(dim, -half), Vec::Constant(dim, half)),
                    std::move(a),
                    vhi::ConvexBifunction::pairing_with(pop),
                    vhi::NonsmoothFunctional::concave_quadratic(0.2, gx),
                    vhi::CompactMap((0.8 / m_norm) * m_raw),
                    std::move(s),
                    std::move(f)};
}

Outcome criterion2() {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int dim = 1 + i % 2;
    const VHIProblem p = boxed_instance(40u + static_cast<unsigned>(i), dim, 0.45);
    std::mt19937 rng(1000u + static_cast<unsigned>(i));
    const Vec z = oracles::random_vec(p.spaceX.dim(), rng, 0.3);
    const StaticInstance inst = StaticInstance::at_node(p, 2, z);
    const auto solved = vhi::solve_static(inst, Vec::Zero(dim), 1e-11);
    const auto bf = vhi::brute_force_static(inst, 1e-3);
    worst = std::max(worst, p.space.dist(solved.u, bf.u));
  }
  return {worst <= 5e-3, fmt("worst |solve - brute force|_V = %.3e (bound 5e-3)", worst)};
}

// ---------------------------------------------------------------- criterion 3

// Least-squares geometric rate of the outer step norms, using the clean
// decay range above the roundoff floor. Too-short histories return 0 (the
// iteration converged faster than the rate can be sampled).
double fitted_step_rate(const std::vector<double>& steps) {
  std::vector<double> logs;
  for (double s : steps) {
    if (s <= 1e-12) break;
    logs.push_back(std::log(s));
  }
  const int n = static_cast<int>(logs.size());
  if (n < 3) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < n; ++k) {
    sx += k;
    sy += logs[k];
    sxx += static_cast<double>(k) * k;
    sxy += k * logs[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return std::exp(slope);
}

Outcome criterion3() {
  double worst_spread = 0.0;
  double worst_excess = -kInf;
  for (int j = 0; j < 10; ++j) {
    const int dim = 1 + j % 3;
    const VHIProblem p = instances::random_wellposed(100u + static_cast<unsigned>(j), dim, 1.0, 4);
    const double q = vhi::check_smallness(p).q;
    std::mt19937 rng(2000u + static_cast<unsigned>(j));
    const Vec z = oracles::random_vec(p.spaceX.dim(), rng, 0.3);
    const StaticInstance inst = StaticInstance::at_node(p, 1, z);

    std::vector<Vec> solutions;
    for (int s = 0; s < 20; ++s) {
      const Vec start = oracles::random_vec(dim, rng, 1.2);
      const auto rep = vhi::solve_static(inst, start, 1e-10);
      solutions.push_back(rep.u);
      worst_excess = std::max(worst_excess, fitted_step_rate(rep.step_norms) - q);
    }
    for (size_t a = 0; a < solutions.size(); ++a)
      for (size_t b = a + 1; b < solutions.size(); ++b)
        worst_spread = std::max(worst_spread, p.space.dist(solutions[a], solutions[b]));
  }
  const bool ok = worst_spread <= 1e-8 && worst_excess <= 0.05;
  return {ok, fmt("start spread %.3e (bound 1e-8), rate - q at most %+.3f (bound +0.05)",
                  worst_spread, worst_excess)};
}

// ---------------------------------------------------------------- criterion 4

Outcome criterion4() {
  double worst = 0.0;  // ratio / c
  for (int j = 0; j < 10; ++j) {
    const int dim = 1 + j % 3;
    const VHIProblem p = instances::random_wellposed(200u + static_cast<unsigned>(j), dim, 1.0, 4);
    const double c = vhi::check_smallness(p).c;
    std::mt19937 rng(3000u + static_cast<unsigned>(j));
    const Vec z = oracles::random_vec(p.spaceX.dim(), rng, 0.3);
    for (int pair = 0; pair < 2; ++pair) {
      const Vec f1 = p.space.apply_gram(oracles::random_vec(dim, rng, 0.6));
      const Vec f2 = p.space.apply_gram(oracles::random_vec(dim, rng, 0.6));
      const double df = p.space.dual_dist(f1, f2);
      if (df <= 1e-8) continue;
      const StaticInstance i1 = StaticInstance::make(p.space, p.spaceX, p.K, p.A, p.phi, p.J,
                                                     p.M, 0.25, z, f1);
      const StaticInstance i2 = StaticInstance::make(p.space, p.spaceX, p.K, p.A, p.phi, p.J,
                                                     p.M, 0.25, z, f2);
      const Vec u1 = vhi::solve_static(i1, Vec::Zero(dim), 1e-11).u;
      const Vec u2 = vhi::solve_static(i2, Vec::Zero(dim), 1e-11).u;
      worst = std::max(worst, p.space.dist(u1, u2) / df / c);
    }
  }
  return {worst <= 1.0 + 1e-3,
          fmt("worst ratio / c = %.6f (bound 1 + 1e-3)", worst)};
}

// ---------------------------------------------------------------- criterion 5

Outcome criterion5() {
  std::vector<double> errs;
  for (const int n : {50, 100, 200}) {
    const VHIProblem p = instances::scalar_memory(2.0, n);
    const auto [traj, rep] = vhi::solve_trajectory(p, vhi::SteppingMode::marching, 1e-12);
    double sup = 0.0;
    for (int k = 0; k < p.grid.node_count(); ++k)
      sup = std::max(sup, std::abs(traj.values[k][0] - instances::scalar_memory_solution(
                                                           p.grid.node(k))));
    if (sup > 2.0 * p.grid.dt()) {
      return {false, fmt("N,%.0f: sup error %.3e exceeds 2 dt = %.3e",
                         static_cast<double>(n), sup, 2.0 * p.grid.dt())};
    }
    errs.push_back(sup);
  }
  const double r1 = errs[1] / errs[0];
  const double r2 = errs[2] / errs[1];
  const bool halves = r1 >= 0.425 && r1 <= 0.575 && r2 >= 0.425 && r2 <= 0.575;
  return {halves, fmt("sup errors within 2 dt; halving factors %.3f, %.3f (bound 0.5 +-15%%)",
                      r1, r2)};
}

// ---------------------------------------------------------------- criterion 6

Outcome criterion6() {
  double worst_rel = 0.0;   // distance / bound
  double worst_rate = 0.0;  // fitted sweep rate
  const double tol = 1e-10;

  const auto compare = [&](const VHIProblem& p) {
    const auto [march, rep_m] = vhi::solve_trajectory(p, vhi::SteppingMode::marching, tol);
    const auto [fixed, rep_f] = vhi::solve_trajectory(p, vhi::SteppingMode::fixed_point, tol);
    double sup = 0.0;
    for (int k = 0; k < p.grid.node_count(); ++k)
      sup = std::max(sup, p.space.dist(march.values[k], fixed.values[k]));
    worst_rel = std::max(worst_rel, sup / (5.0 * (p.grid.dt() + tol)));
    worst_rate = std::max(worst_rate, rep_f.fitted_rate);
  };

  compare(instances::scalar_memory(1.0, 40));
  for (int j = 0; j < 5; ++j)
    compare(instances::random_wellposed(300u + static_cast<unsigned>(j), 1 + j % 3, 1.0, 32));

  const bool ok = worst_rel <= 1.0 && worst_rate < 1.0;
  return {ok, fmt("worst distance / 5(dt+tol) = %.3f, worst fitted sweep rate %.3f",
                  worst_rel, worst_rate)};
}

// ---------------------------------------------------------------- criterion 7

Outcome criterion7() {
  const auto setup = instances::contact_small(8, 4, 40);
  const vhi::ContactSystem sys =
      vhi::assemble_problem(setup.mesh, setup.material, setup.contact, setup.grid);
  if (!vhi::check_smallness(sys.problem).pass) return {false, "scenario fails the smallness gate"};

  const vhi::ContactSolution sol = vhi::solve_contact(sys, vhi::SteppingMode::marching, 1e-10);
  const double fb = setup.contact.friction_bound;

  double traction_scale = 1.0;
  for (const auto& rows : sol.residuals)
    for (const auto& row : rows) traction_scale = std::max(traction_scale, std::abs(row.sigma_nu));

  double max_violation = -kInf, max_comp = 0.0, max_tau = 0.0, max_align = 0.0;
  int sliding = 0, total = 0;
  for (const auto& rows : sol.residuals) {
    for (const auto& row : rows) {
      ++total;
      max_violation = std::max(max_violation, row.w_nu - row.gap);
      max_comp = std::max(max_comp, row.complementarity);
      max_tau = std::max(max_tau, row.sigma_tau_norm);
      if (row.w_tau.norm() > 1e-6) {
        ++sliding;
        max_align = std::max(max_align,
                             std::abs(row.sigma_tau.dot(row.w_tau) + fb * row.w_tau.norm()));
      }
    }
  }

  const bool ok = max_violation <= 1e-8 && max_comp <= 1e-4 * traction_scale &&
                  max_tau <= fb * (1.0 + 1e-6) && max_align <= 1e-4 && sliding > 0;
  std::string detail =
      fmt("violation %.2e, complementarity %.2e (scale %.2f", max_violation, max_comp,
          traction_scale) +
      fmt("), |sigma_tau| %.10f, alignment %.2e", max_tau, max_align) +
      fmt(" on %.0f/%.0f sliding rows", static_cast<double>(sliding),
          static_cast<double>(total));
  return {ok, detail};
}

// ---------------------------------------------------------------- criterion 8

Outcome criterion8() {
  auto setup = instances::contact_small(6, 3, 24);
  setup.material.flow = vhi::Material::Flow::none;
  setup.contact.c_p = 0.0;
  setup.contact.g = kInf;
  setup.contact.memory_kernel = nullptr;
  setup.contact.friction_bound = 0.0;
  setup.contact.f2 = vhi::Vec2(0.05, 0.02);

  const vhi::ContactSystem sys =
      vhi::assemble_problem(setup.mesh, setup.material, setup.contact, setup.grid);
  if (!sys.problem.K.is_whole_space()) return {false, "degenerate bound did not free K"};
  const vhi::ContactSolution sol = vhi::solve_contact(sys, vhi::SteppingMode::marching, 1e-12);

  const std::vector<Vec> oracle = oracles::viscoelastic_dense(
      setup.mesh, setup.material.theta, setup.material.zeta, setup.material.lambda,
      setup.material.mu, setup.contact.f0, setup.contact.f2, setup.contact.u0,
      setup.grid.horizon, setup.grid.steps);
  if (oracle.size() != sol.w.values.size()) return {false, "trajectory lengths differ"};
  double sup = 0.0;
  for (size_t n = 0; n < oracle.size(); ++n)
    sup = std::max(sup, sys.assembly->space().dist(sol.w.values[n], oracle[n]));
  return {sup <= 1e-8, fmt("sup-node |solver - dense oracle|_V = %.3e (bound 1e-8)", sup)};
}

// ---------------------------------------------------------------- criterion 9

// Marches the internal stress on a prescribed smooth displacement path at
// step dt and at dt/64, comparing at the coarse nodes. The overstress
// default preserves the zero state exactly; the linear law produces a
// genuinely nonzero history, so both the degenerate and the generic branch
// of the first-order bound are exercised.
Outcome criterion9() {
  auto setup = instances::contact_small(4, 2, 25);
  const double dt = setup.grid.dt();
  const int steps = setup.grid.steps;
  const int fine = 64;

  const auto run_flow = [&](vhi::Material::Flow flow, double& scale_out,
                            double& worst_out) -> bool {
    auto local = setup;
    local.material.flow = flow;
    const vhi::ContactAssembly a(local.mesh, local.material, local.contact, local.grid);
    std::mt19937 rng(777);
    const Vec base1 = oracles::random_vec(a.dof_count(), rng, 0.2);
    const Vec base2 = oracles::random_vec(a.dof_count(), rng, 0.2);
    const auto u_of = [&](double t) {
      return Vec((std::sin(2.0 * t) + 0.3 * t) * base1 + std::cos(t) * base2);
    };

    vhi::InternalState coarse;
    coarse.sigma_i.assign(a.mesh().triangles.size(), vhi::Vec3::Zero());
    coarse.u_prev = u_of(0.0);
    vhi::InternalState ref;
    ref.sigma_i = coarse.sigma_i;
    ref.u_prev = coarse.u_prev;

    double scale = 1.0;
    double worst = 0.0;
    for (int n = 0; n < steps; ++n) {
      vhi::sigma_I_step(coarse, a, u_of((n + 1) * dt), dt);
      for (int k = 0; k < fine; ++k) {
        const double t_next = n * dt + (k + 1) * dt / fine;
        vhi::sigma_I_step(ref, a, u_of(t_next), dt / fine);
      }
      double err = 0.0;
      for (size_t e = 0; e < ref.sigma_i.size(); ++e) {
        err = std::max(err, (coarse.sigma_i[e] - ref.sigma_i[e]).norm());
        scale = std::max(scale, 1.0 + ref.sigma_i[e].norm());
      }
      worst = std::max(worst, err);
    }
    scale_out = scale;
    worst_out = worst;
    return worst <= 3.0 * dt * scale;
  };

  double scale_p = 0, worst_p = 0, scale_l = 0, worst_l = 0;
  const bool ok_p = run_flow(vhi::Material::Flow::perzyna, scale_p, worst_p);
  const bool ok_l = run_flow(vhi::Material::Flow::linear, scale_l, worst_l);
  // The overstress law must preserve the zero state bit-exactly, otherwise
  // the default comparison is vacuous for the wrong reason.
  const bool zero_exact = worst_p == 0.0;
  return {ok_p && ok_l && zero_exact,
          fmt("overstress error %.1e (exact zero required), linear law error %.3e vs bound %.3e",
              worst_p, worst_l, 3.0 * dt * scale_l)};
}

// --------------------------------------------------------------- criterion 10

Outcome criterion10() {
  const vhi::ScenarioConfig cfg = vhi::load_config(VHI_CONFIG_DIR "/contact_small.cfg");
  const fs::path base = fs::path("acceptance_tmp");
  fs::remove_all(base);
  const std::string dir_a = (base / "run_a").string();
  const std::string dir_b = (base / "run_b").string();

  std::ostringstream log;
  vhi::RunOptions opt_a;
  opt_a.out_dir = dir_a;
  opt_a.quiet = true;
  vhi::RunOptions opt_b;
  opt_b.out_dir = dir_b;
  opt_b.quiet = true;
  if (vhi::run_solve(cfg, opt_a, log) != vhi::exit_ok) return {false, "first run failed"};
  if (vhi::run_solve(cfg, opt_b, log) != vhi::exit_ok) return {false, "second run failed"};

  const auto read_tree = [](const std::string& dir) {
    std::map<std::string, std::string> tree;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      std::ifstream in(entry.path(), std::ios::binary);
      std::ostringstream body;
      body << in.rdbuf();
      tree[fs::relative(entry.path(), dir).string()] = body.str();
    }
    return tree;
  };
  const auto tree_a = read_tree(dir_a);
  const auto tree_b = read_tree(dir_b);
  if (tree_a.size() != tree_b.size() || tree_a.empty())
    return {false, fmt("tree sizes differ (%.0f vs %.0f)", static_cast<double>(tree_a.size()),
                       static_cast<double>(tree_b.size()))};
  for (const auto& [name, body] : tree_a) {
    const auto it = tree_b.find(name);
    if (it == tree_b.end()) return {false, "file sets differ: " + name};
    if (it->second != body) return {false, "file contents differ: " + name};
  }
  fs::remove_all(base);
  return {true, fmt("%.0f files byte-identical across two runs",
                    static_cast<double>(tree_a.size()))};
}

}  // namespace

int main() {
  struct Criterion {
    int index;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "smallness gate matches constructed labels", 1.0, criterion1},
      {2, "static solves match the brute-force oracle", 60.0, criterion2},
      {3, "uniqueness across starts and contraction rate", 30.0, criterion3},
      {4, "continuous dependence constant", 30.0, criterion4},
      {5, "scalar memory ODE first-order convergence", 5.0, criterion5},
      {6, "fixed-point mode agrees with marching", 60.0, criterion6},
      {7, "contact feasibility, complementarity, friction", 120.0, criterion7},
      {8, "degenerate contact matches the viscoelastic oracle", 60.0, criterion8},
      {9, "internal stress integrator first-order bound", 10.0, criterion9},
      {10, "byte-identical reruns of the bundled scenario", kInf, criterion10},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs <= c.budget_s;
    const bool pass = out.ok && in_budget;
    if (!pass) ++failures;
    if (std::isfinite(c.budget_s)) {
      std::printf("[%s] %2d. %s: %s [%.2fs of %.0fs]\n", pass ? "PASS" : "FAIL", c.index,
                  c.name, out.detail.c_str(), secs, c.budget_s);
    } else {
      std::printf("[%s] %2d. %s: %s [%.2fs]\n", pass ? "PASS" : "FAIL", c.index, c.name,
                  out.detail.c_str(), secs);
    }
    if (!in_budget && out.ok) std::printf("       over budget\n");
  }
  std::printf("%d/10 criteria passed\n", 10 - failures);
  return failures;
}
