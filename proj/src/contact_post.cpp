#include <cmath>

#include "vhi/contact.hpp"
#include "vhi/errors.hpp"

namespace vhi {

namespace {

std::span<const Vec> quadrature_prefix(std::span<const Vec> values, int n, Quadrature q) {
  const size_t need = q == Quadrature::trapezoid ? static_cast<size_t>(n) + 1
                                                 : static_cast<size_t>(n);
  if (values.size() < static_cast<size_t>(n) + 1)
    throw ConfigError("trajectory does not reach the requested node", "n");
  return values.subspan(0, need);
}

Vec reaction_vector(const ContactAssembly& assembly, const TimeGrid& grid,
                    std::span<const Vec> w_values, int n, Quadrature q) {
  const HistoryParts parts =
      assembly.history_parts(grid, quadrature_prefix(w_values, n, q), n, q);
  return assembly.viscosity_matrix() * w_values[static_cast<size_t>(n)] + parts.s1 + parts.s2 -
         assembly.load_dual();
}

}  // namespace

Trajectory reconstruct_displacement(const ContactAssembly& assembly, const Trajectory& w) {
  Trajectory u;
  u.grid = w.grid;
  u.values.resize(w.values.size());
  if (w.values.empty()) return u;
  u.values[0] = assembly.u0_dofs();
  const double dt = w.grid.dt();
  for (size_t m = 1; m < w.values.size(); ++m)
    u.values[m] = u.values[m - 1] + 0.5 * dt * (w.values[m - 1] + w.values[m]);
  return u;
}

std::vector<Vec3> recover_stress(const ContactAssembly& assembly, const Vec& w, const Vec& u,
                                 const std::vector<Vec3>& sigma_i, double t) {
  const Material& mat = assembly.material();
  const int n_elems = static_cast<int>(assembly.mesh().triangles.size());
  if (static_cast<int>(sigma_i.size()) != n_elems)
    throw ConfigError("internal stress must have one tensor per element", "sigma_i");
  (void)t;
  std::vector<Vec3> sigma(static_cast<size_t>(n_elems));
  for (int e = 0; e < n_elems; ++e)
    sigma[e] = mat.viscosity(assembly.strain(e, w)) + mat.elasticity(assembly.strain(e, u)) +
               sigma_i[e];
  return sigma;
}

std::vector<Vec2> recover_tractions(const ContactAssembly& assembly, const TimeGrid& grid,
                                    std::span<const Vec> w_values, int n, Quadrature q) {
  const Vec reaction = reaction_vector(assembly, grid, w_values, n, q);
  const auto& nodes = assembly.contact_nodes();
  std::vector<Vec2> tractions(nodes.size(), Vec2::Zero());
  for (size_t i = 0; i < nodes.size(); ++i) {
    Vec2 r = Vec2::Zero();
    for (int c = 0; c < 2; ++c) {
      const int d = assembly.dof(nodes[i], c);
      if (d >= 0) r(c) = reaction(d);
    }
    tractions[i] = r / assembly.contact_weights()(static_cast<int>(i));
  }
  return tractions;
}

std::vector<ContactResidualRow> contact_residuals(const ContactAssembly& assembly,
                                                  const TimeGrid& grid,
                                                  std::span<const Vec> w_values, int n,
                                                  Quadrature q) {
  const auto& nodes = assembly.contact_nodes();
  const Vec& w_n = w_values[static_cast<size_t>(n)];
  const std::vector<Vec2> tractions = recover_tractions(assembly, grid, w_values, n, q);
  const Vec mem = assembly.memory_values(grid, quadrature_prefix(w_values, n, q), n, q);

  std::vector<ContactResidualRow> rows(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    ContactResidualRow& row = rows[i];
    row.t = grid.node(n);
    row.node = nodes[i];
    row.gap = assembly.contact().g;
    row.w_nu = assembly.normal_value(w_n, static_cast<int>(i));
    row.p_term = assembly.contact().c_p * std::max(0.0, row.w_nu);
    row.memory_term = mem(static_cast<int>(i));

    const Vec2& nu = assembly.contact_normals()[i];
    row.sigma_nu = tractions[i].dot(nu);
    row.sigma_tau = tractions[i] - row.sigma_nu * nu;
    row.sigma_tau_norm = row.sigma_tau.norm();

    Vec2 w_node = Vec2::Zero();
    for (int c = 0; c < 2; ++c) {
      const int d = assembly.dof(nodes[i], c);
      if (d >= 0) w_node(c) = w_n(d);
    }
    row.w_tau = w_node - row.w_nu * nu;
    row.complementarity =
        std::abs((row.w_nu - row.gap) * (row.sigma_nu + row.p_term + row.memory_term));
  }
  return rows;
}

double divergence_residual(const ContactAssembly& assembly, const Vec& reaction) {
  Vec masked = reaction;
  for (int node : assembly.contact_nodes()) {
    for (int c = 0; c < 2; ++c) {
      const int d = assembly.dof(node, c);
      if (d >= 0) masked(d) = 0.0;
    }
  }
  return assembly.space().dual_norm(masked);
}

ContactSolution solve_contact(const ContactSystem& system, SteppingMode mode, double tol,
                              const StepperOptions& options) {
  const ContactAssembly& assembly = *system.assembly;
  ContactSolution sol;
  auto [traj, report] = solve_trajectory(system.problem, mode, tol, options);
  sol.w = std::move(traj);
  sol.report = std::move(report);
  sol.u = reconstruct_displacement(assembly, sol.w);

  const Quadrature q =
      mode == SteppingMode::marching ? Quadrature::left_rectangle : Quadrature::trapezoid;
  const int n_nodes = static_cast<int>(sol.w.values.size());
  sol.sigma.resize(static_cast<size_t>(n_nodes));
  sol.sigma_i.resize(static_cast<size_t>(n_nodes));
  sol.residuals.resize(static_cast<size_t>(n_nodes));
  sol.divergence.resize(static_cast<size_t>(n_nodes));
  const std::span<const Vec> values(sol.w.values);
  for (int n = 0; n < n_nodes; ++n) {
    const HistoryParts parts =
        assembly.history_parts(sol.w.grid, values.subspan(0, q == Quadrature::trapezoid
                                                                 ? static_cast<size_t>(n) + 1
                                                                 : static_cast<size_t>(n)),
                               n, q);
    // Stress uses the quadrature-consistent displacement so the assembled
    // duals and (sigma, eps(v)) agree exactly at every node.
    sol.sigma_i[static_cast<size_t>(n)] = parts.sigma_i;
    sol.sigma[static_cast<size_t>(n)] = recover_stress(
        assembly, sol.w.values[static_cast<size_t>(n)], parts.u_n, parts.sigma_i,
        sol.w.grid.node(n));
    sol.residuals[static_cast<size_t>(n)] =
        contact_residuals(assembly, sol.w.grid, values, n, q);
    const Vec reaction = assembly.viscosity_matrix() * sol.w.values[static_cast<size_t>(n)] +
                         parts.s1 + parts.s2 - assembly.load_dual();
    sol.divergence[static_cast<size_t>(n)] = divergence_residual(assembly, reaction);
  }
  return sol;
}

}  // namespace vhi
