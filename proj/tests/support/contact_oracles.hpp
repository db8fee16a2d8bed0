#pragma once

// Independent reimplementation of the unconstrained linear viscoelastic
// marching recursion on a triangle mesh: shape gradients from Vandermonde
// solves, strain energies contracted as 2x2 tensors with no Voigt
// bookkeeping, loads integrated separately. Dof order matches the library
// convention (node major, x before y, clamped components skipped) so
// trajectories compare entrywise.

#include <vector>

#include "vhi/contact.hpp"

namespace oracles {

std::vector<vhi::Vec> viscoelastic_dense(const vhi::Mesh& mesh, double theta, double zeta,
                                         double lambda, double mu, const vhi::Vec2& f0,
                                         const vhi::Vec2& f2, const std::vector<vhi::Vec2>& u0,
                                         double horizon, int steps);

}  // namespace oracles
