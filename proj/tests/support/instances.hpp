#pragma once

// Reproducible well-posed problem instances for stepper and acceptance tests.

#include "vhi/contact.hpp"
#include "vhi/problem.hpp"

namespace instances {

// Scalar memory model: <A w> = w, phi~(eta, u, v) = eta * v, S = running
// integral of w, K = R, f(t) = t. Continuous solution w(t) = 1 - e^{-t}.
vhi::VHIProblem scalar_memory(double horizon, int steps);

// Exact solution of the scalar model at time t.
double scalar_memory_solution(double t);

// Random well-posed instance on a dim-dimensional V with random SPD Gram,
// box constraint, affine symmetric A = 2 G, state pairing plus a linear
// u-term of dual-norm Lipschitz 0.3, concave-quadratic J with mu = 0.2,
// compact M scaled to norm 0.8, and an exponential-kernel history operator
// with L_S = 0.5. Passes both the joint and the state-slot gates.
vhi::VHIProblem random_wellposed(unsigned seed, int dim, double horizon, int steps);

// Data of the packaged contact scenario (mirrored by the shipped config):
// a 2 x 1 block clamped on the left, pushed sideways and down, with damped
// normal response, a bounded normal velocity, fading surface memory, and
// friction bound 1 on the bottom.
struct ContactSetup {
  vhi::Mesh mesh;
  vhi::Material material;
  vhi::ContactData contact;
  vhi::TimeGrid grid;
};
ContactSetup contact_small(int nx = 8, int ny = 4, int steps = 40);

}  // namespace instances
