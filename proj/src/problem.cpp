#include "vhi/problem.hpp"

#include <cmath>
#include <limits>

#include "vhi/errors.hpp"

namespace vhi {

void VHIProblem::validate() const {
  if (K.dim() != space.dim()) throw ConfigError("constraint set dimension mismatch", "K");
  if (M.domain_dim() != space.dim() || M.range_dim() != spaceX.dim()) {
    throw ConfigError("compact map dimensions do not match the spaces", "M");
  }
  if (static_cast<int>(f.size()) != grid.node_count()) {
    throw ConfigError("f must be sampled at every grid node", "f");
  }
  for (const auto& fn : f) {
    if (fn.size() != space.dim()) throw ConfigError("f sample has wrong dimension", "f");
    if (!fn.allFinite()) throw ConfigError("f sample is not finite", "f");
  }
  if (!K.contains(space, K.feasible_point(), 1e-10)) {
    throw ConfigError("feasible point is not admissible", "K");
  }
  if (!std::isfinite(A.m_A()) || A.m_A() <= 0.0) {
    throw ConfigError("operator A is missing a positive strong monotonicity constant", "A.m_A");
  }
  if (!std::isfinite(A.alpha_A())) throw ConfigError("operator A is missing alpha_A", "A.alpha_A");
  if (!std::isfinite(phi.alpha()) || phi.alpha() < 0.0) {
    throw ConfigError("bifunction is missing its Lipschitz constant", "phi.alpha");
  }
  if (!std::isfinite(J.m_J()) || J.m_J() < 0.0) {
    throw ConfigError("nonsmooth functional is missing m_J", "J.m_J");
  }
  if (!std::isfinite(S.lipschitz()) || S.lipschitz() < 0.0) {
    throw ConfigError("history operator is missing its Lipschitz constant", "S.L");
  }
}

WellPosednessReport check_smallness_constants(double m_a, double alpha_a, double alpha_phi,
                                              double m_j, double m_norm) {
  for (auto [value, name] : {std::pair<double, const char*>{m_a, "m_A"},
                             {alpha_a, "alpha_A"},
                             {alpha_phi, "alpha_phi"},
                             {m_j, "m_J"},
                             {m_norm, "||M||"}}) {
    if (!std::isfinite(value)) {
      throw ConfigError(std::string("smallness check is missing constant ") + name, name);
    }
  }
  if (m_a <= 0.0) throw ConfigError("m_A must be positive", "m_A");

  WellPosednessReport r;
  r.m_A = m_a;
  r.alpha_A = alpha_a;
  r.alpha_phi = alpha_phi;
  r.m_J = m_j;
  r.m_norm = m_norm;
  const double coupling = m_j * m_norm * m_norm;
  r.contraction_ok = m_a > alpha_phi + coupling;
  r.coercivity_ok = alpha_a > 2.0 * coupling;
  r.pass = r.contraction_ok && r.coercivity_ok;
  r.q = (alpha_phi + coupling) / m_a;
  r.c = r.contraction_ok ? 1.0 / (m_a - alpha_phi - coupling)
                         : std::numeric_limits<double>::infinity();
  if (!r.contraction_ok) {
    r.failing = "m_A > alpha_phi + m_J*||M||^2";
  } else if (!r.coercivity_ok) {
    r.failing = "alpha_A > 2*m_J*||M||^2";
  }
  return r;
}

WellPosednessReport check_smallness(const VHIProblem& problem) {
  problem.validate();
  const double m_norm = problem.M.norm(problem.space, problem.spaceX).norm;
  return check_smallness_constants(problem.A.m_A(), problem.A.alpha_A(), problem.phi.alpha(),
                                   problem.J.m_J(), m_norm);
}

}  // namespace vhi
