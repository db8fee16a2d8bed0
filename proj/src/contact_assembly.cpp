#include <algorithm>
#include <cmath>

#include "vhi/contact.hpp"
#include "vhi/errors.hpp"

namespace vhi {

namespace {

const Mat3 voigt_weight = (Mat3() << 1, 0, 0, 0, 1, 0, 0, 0, 2).finished();
const Vec3 voigt_trace = (Vec3() << 1, 1, 0).finished();

Mat3 isotropic_density(double a, double b) {
  // Bilinear density of the map e -> 2 a e + b tr(e) I in Voigt coordinates;
  // the energy eps(v)^T D eps(u) carries the double shear weight.
  return 2.0 * a * voigt_weight + b * voigt_trace * voigt_trace.transpose();
}

}  // namespace

Vec3 Material::viscosity(const Vec3& e) const {
  return 2.0 * theta * e + zeta * (e(0) + e(1)) * voigt_trace;
}

Vec3 Material::elasticity(const Vec3& e) const {
  return 2.0 * mu * e + lambda * (e(0) + e(1)) * voigt_trace;
}

Vec3 Material::flow_map(double t, const Vec3& sigma, const Vec3& eps) const {
  switch (flow) {
    case Flow::none:
      return Vec3::Zero();
    case Flow::perzyna:
      return -relax * (sigma - elasticity(eps));
    case Flow::linear:
      return -relax * sigma;
    case Flow::custom:
      if (!flow_custom) throw ConfigError("custom flow law not set", "material");
      return flow_custom(t, sigma, eps);
  }
  return Vec3::Zero();
}

double Material::lipschitz_flow() const {
  switch (flow) {
    case Flow::none:
      return 0.0;
    case Flow::perzyna:
      return relax * std::max(1.0, lipschitz_elasticity());
    case Flow::linear:
      return relax;
    case Flow::custom:
      return flow_custom_lipschitz;
  }
  return 0.0;
}

ContactAssembly::ContactAssembly(Mesh mesh, Material material, ContactData contact,
                                 TimeGrid grid)
    : mesh_(std::move(mesh)),
      material_(std::move(material)),
      contact_(std::move(contact)),
      grid_(grid),
      space_(Mat::Identity(1, 1)),
      space_x_(Mat::Identity(1, 1)) {
  if (!(contact_.g > 0.0)) throw ConfigError("normal velocity bound must be positive", "g");
  if (contact_.c_p < 0.0) throw ConfigError("damped response slope must be nonnegative", "c_p");
  if (contact_.friction_bound < 0.0)
    throw ConfigError("friction bound must be nonnegative", "friction_bound");
  if (!contact_.u0.empty() &&
      static_cast<int>(contact_.u0.size()) != mesh_.node_count())
    throw ConfigError("initial displacement must have one vector per mesh node", "u0");
  if (material_.theta <= 0.0 || material_.zeta < 0.0)
    throw ConfigError("viscosity moduli must satisfy theta > 0, zeta >= 0", "material");
  if (material_.mu < 0.0 || material_.lambda < 0.0)
    throw ConfigError("elasticity moduli must be nonnegative", "material");

  const int nodes = mesh_.node_count();

  // Clamped components: both on the tag-1 boundary, the normal one on tag 3
  // in the literal-space variant.
  std::vector<bool> clamped(static_cast<size_t>(2 * nodes), false);
  bool has_dirichlet = false;
  for (const auto& e : mesh_.edges) {
    if (e.tag == 1) {
      clamped[2 * e.a] = clamped[2 * e.a + 1] = true;
      clamped[2 * e.b] = clamped[2 * e.b + 1] = true;
      has_dirichlet = true;
    }
    if (e.tag == 3 && contact_.clamp_normal) {
      clamped[2 * e.a + 1] = true;
      clamped[2 * e.b + 1] = true;
    }
  }
  if (!has_dirichlet) throw ConfigError("clamped boundary is empty", "mesh");

  dof_of_node_.assign(static_cast<size_t>(2 * nodes), -1);
  for (int k = 0; k < 2 * nodes; ++k)
    if (!clamped[k]) dof_of_node_[k] = n_dofs_++;

  // Element matrices; the inner product of the velocity space is the strain
  // pairing itself, positive definite once a boundary edge is clamped.
  const Mat3 d_gram = voigt_weight;
  const Mat3 d_visc = isotropic_density(material_.theta, material_.zeta);
  const Mat3 d_elast = isotropic_density(material_.mu, material_.lambda);

  const int n_elems = static_cast<int>(mesh_.triangles.size());
  b_elem_.resize(n_elems);
  area_.resize(n_elems);
  gram_ = Mat::Zero(n_dofs_, n_dofs_);
  a_mat_ = Mat::Zero(n_dofs_, n_dofs_);
  b_mat_ = Mat::Zero(n_dofs_, n_dofs_);

  for (int e = 0; e < n_elems; ++e) {
    const auto& tri = mesh_.triangles[e];
    const std::array<Vec2, 3> corners = {mesh_.coords[tri[0]], mesh_.coords[tri[1]],
                                         mesh_.coords[tri[2]]};
    const Vec2& p1 = corners[0];
    const Vec2& p2 = corners[1];
    const Vec2& p3 = corners[2];
    const double det =
        (p2.x() - p1.x()) * (p3.y() - p1.y()) - (p3.x() - p1.x()) * (p2.y() - p1.y());
    if (!(det > 0.0)) throw ConfigError("mesh has a degenerate or clockwise triangle", "mesh");
    area_[e] = 0.5 * det;

    Eigen::Matrix<double, 3, 2> grad;
    grad.row(0) = Eigen::RowVector2d(p2.y() - p3.y(), p3.x() - p2.x()) / det;
    grad.row(1) = Eigen::RowVector2d(p3.y() - p1.y(), p1.x() - p3.x()) / det;
    grad.row(2) = Eigen::RowVector2d(p1.y() - p2.y(), p2.x() - p1.x()) / det;
    Eigen::Matrix<double, 3, 6>& b = b_elem_[e];
    b.setZero();
    for (int k = 0; k < 3; ++k) {
      b(0, 2 * k) = grad(k, 0);
      b(1, 2 * k + 1) = grad(k, 1);
      b(2, 2 * k) = 0.5 * grad(k, 1);
      b(2, 2 * k + 1) = 0.5 * grad(k, 0);
    }

    const Eigen::Matrix<double, 6, 6> ke_gram = element_stiffness(corners, d_gram);
    const Eigen::Matrix<double, 6, 6> ke_visc = element_stiffness(corners, d_visc);
    const Eigen::Matrix<double, 6, 6> ke_elast = element_stiffness(corners, d_elast);

    std::array<int, 6> dofs;
    for (int k = 0; k < 3; ++k) {
      dofs[2 * k] = dof_of_node_[2 * tri[k]];
      dofs[2 * k + 1] = dof_of_node_[2 * tri[k] + 1];
    }
    for (int r = 0; r < 6; ++r) {
      if (dofs[r] < 0) continue;
      for (int c = 0; c < 6; ++c) {
        if (dofs[c] < 0) continue;
        gram_(dofs[r], dofs[c]) += ke_gram(r, c);
        a_mat_(dofs[r], dofs[c]) += ke_visc(r, c);
        b_mat_(dofs[r], dofs[c]) += ke_elast(r, c);
      }
    }
  }

  // Contact boundary: lumped edge mass per node that still carries dofs.
  std::vector<double> weight_of_node(static_cast<size_t>(nodes), 0.0);
  std::vector<bool> on_gamma3(static_cast<size_t>(nodes), false);
  for (const auto& e : mesh_.edges) {
    if (e.tag != 3) continue;
    const double len = (mesh_.coords[e.b] - mesh_.coords[e.a]).norm();
    for (int v : {e.a, e.b}) {
      if (dof_of_node_[2 * v] < 0 && dof_of_node_[2 * v + 1] < 0) continue;
      on_gamma3[v] = true;
      weight_of_node[v] += 0.5 * len;
    }
  }
  for (int v = 0; v < nodes; ++v)
    if (on_gamma3[v]) g3_nodes_.push_back(v);
  const int ng3 = static_cast<int>(g3_nodes_.size());
  g3_weight_ = Vec::Zero(std::max(ng3, 0));
  g3_normal_.assign(static_cast<size_t>(ng3), Vec2(0, -1));
  for (int i = 0; i < ng3; ++i) g3_weight_(i) = weight_of_node[g3_nodes_[i]];

  space_ = InnerProductSpace(gram_);

  if (ng3 > 0) {
    trace_ = Mat::Zero(2 * ng3, n_dofs_);
    Mat gram_x = Mat::Zero(2 * ng3, 2 * ng3);
    for (int i = 0; i < ng3; ++i) {
      for (int c = 0; c < 2; ++c) {
        const int d = dof_of_node_[2 * g3_nodes_[i] + c];
        if (d >= 0) trace_(2 * i + c, d) = 1.0;
        gram_x(2 * i + c, 2 * i + c) = g3_weight_(i);
      }
    }
    space_x_ = InnerProductSpace(gram_x);
    gamma_norm_ = operator_norm(trace_, space_, space_x_).norm;
  } else {
    // Degenerate placeholder so the abstract problem keeps a valid shape.
    trace_ = Mat::Zero(1, n_dofs_);
    space_x_ = InnerProductSpace(Mat::Identity(1, 1));
    gamma_norm_ = 0.0;
  }

  const double t_end = grid_.horizon;
  double b_sup = 0.0;
  if (contact_.memory_kernel) {
    const int samples = 4096;
    for (int k = 0; k <= samples; ++k)
      b_sup = std::max(b_sup, std::abs(contact_.memory_kernel(t_end * k / samples)));
  }
  const double l_flow = material_.lipschitz_flow();
  const double l_elast = material_.lipschitz_elasticity();
  const double c_internal = l_flow * (l_elast + 1.0) * std::exp(l_flow * t_end);
  l_s_ = l_elast + c_internal * t_end + gamma_norm_ * gamma_norm_ * b_sup;

  // Loads: exact quadrature for constant densities.
  f_dual_ = Vec::Zero(n_dofs_);
  for (int e = 0; e < n_elems; ++e) {
    const auto& tri = mesh_.triangles[e];
    for (int k = 0; k < 3; ++k) {
      for (int c = 0; c < 2; ++c) {
        const int d = dof_of_node_[2 * tri[k] + c];
        if (d >= 0) f_dual_(d) += area_[e] / 3.0 * contact_.f0(c);
      }
    }
  }
  for (const auto& e : mesh_.edges) {
    if (e.tag != 2) continue;
    const double len = (mesh_.coords[e.b] - mesh_.coords[e.a]).norm();
    for (int v : {e.a, e.b}) {
      for (int c = 0; c < 2; ++c) {
        const int d = dof_of_node_[2 * v + c];
        if (d >= 0) f_dual_(d) += 0.5 * len * contact_.f2(c);
      }
    }
  }
}

Vec ContactAssembly::u0_dofs() const {
  Vec u = Vec::Zero(n_dofs_);
  if (contact_.u0.empty()) return u;
  for (int v = 0; v < mesh_.node_count(); ++v) {
    for (int c = 0; c < 2; ++c) {
      const int d = dof_of_node_[2 * v + c];
      if (d >= 0) u(d) = contact_.u0[v](c);
    }
  }
  return u;
}

Vec3 ContactAssembly::strain(int element, const Vec& dofs) const {
  const auto& tri = mesh_.triangles[element];
  Eigen::Matrix<double, 6, 1> local;
  for (int k = 0; k < 3; ++k) {
    for (int c = 0; c < 2; ++c) {
      const int d = dof_of_node_[2 * tri[k] + c];
      local(2 * k + c) = d >= 0 ? dofs(d) : 0.0;
    }
  }
  return b_elem_[element] * local;
}

Vec ContactAssembly::stress_dual(const std::vector<Vec3>& sigma) const {
  if (static_cast<int>(sigma.size()) != static_cast<int>(mesh_.triangles.size()))
    throw ConfigError("stress field must have one tensor per element", "sigma");
  Vec dual = Vec::Zero(n_dofs_);
  for (size_t e = 0; e < sigma.size(); ++e) {
    const Eigen::Matrix<double, 6, 1> local =
        area_[e] * b_elem_[e].transpose() * (voigt_weight * sigma[e]);
    const auto& tri = mesh_.triangles[e];
    for (int k = 0; k < 3; ++k) {
      for (int c = 0; c < 2; ++c) {
        const int d = dof_of_node_[2 * tri[k] + c];
        if (d >= 0) dual(d) += local(2 * k + c);
      }
    }
  }
  return dual;
}

double ContactAssembly::normal_value(const Vec& dofs, int contact_index) const {
  const int v = g3_nodes_[contact_index];
  const Vec2& nu = g3_normal_[contact_index];
  double s = 0.0;
  for (int c = 0; c < 2; ++c) {
    const int d = dof_of_node_[2 * v + c];
    if (d >= 0) s += nu(c) * dofs(d);
  }
  return s;
}

Vec ContactAssembly::p_dual(const Vec& w) const {
  Vec dual = Vec::Zero(n_dofs_);
  if (contact_.clamp_normal || contact_.c_p == 0.0) return dual;
  for (size_t i = 0; i < g3_nodes_.size(); ++i) {
    const double p = contact_.c_p * std::max(0.0, normal_value(w, static_cast<int>(i)));
    if (p == 0.0) continue;
    const Vec2& nu = g3_normal_[i];
    for (int c = 0; c < 2; ++c) {
      const int d = dof_of_node_[2 * g3_nodes_[i] + c];
      if (d >= 0) dual(d) += g3_weight_(static_cast<int>(i)) * p * nu(c);
    }
  }
  return dual;
}

Vec ContactAssembly::memory_values(const TimeGrid& grid, std::span<const Vec> w_prefix, int n,
                                   Quadrature q) const {
  const int ng3 = static_cast<int>(g3_nodes_.size());
  Vec mem = Vec::Zero(std::max(ng3, 1));
  if (!contact_.memory_kernel || contact_.clamp_normal || ng3 == 0 || n == 0) return mem;
  const double dt = grid.dt();
  const double t_n = grid.node(n);
  const int last = q == Quadrature::trapezoid ? n : n - 1;
  for (int j = 0; j <= last; ++j) {
    double wgt = dt;
    if (q == Quadrature::trapezoid && (j == 0 || j == n)) wgt = 0.5 * dt;
    const double bv = contact_.memory_kernel(t_n - grid.node(j));
    for (int i = 0; i < ng3; ++i)
      mem(i) += wgt * bv * std::max(0.0, normal_value(w_prefix[j], i));
  }
  return mem;
}

HistoryParts ContactAssembly::history_parts(const TimeGrid& grid, std::span<const Vec> w_prefix,
                                            int n, Quadrature q) const {
  const double dt = grid.dt();

  // Displacements u_0..u_n by the quadrature-consistent cumulative rule;
  // both rules only touch the values the prefix is allowed to hold.
  std::vector<Vec> u(static_cast<size_t>(n) + 1);
  u[0] = u0_dofs();
  for (int m = 1; m <= n; ++m) {
    if (q == Quadrature::trapezoid)
      u[m] = u[m - 1] + 0.5 * dt * (w_prefix[m - 1] + w_prefix[m]);
    else
      u[m] = u[m - 1] + dt * w_prefix[m - 1];
  }

  HistoryParts parts;
  InternalState state;
  state.sigma_i.assign(mesh_.triangles.size(), Vec3::Zero());
  state.u_prev = u[0];
  state.t_prev = grid.node(0);
  for (int m = 1; m <= n; ++m) sigma_I_step(state, *this, u[m], dt);
  parts.sigma_i = state.sigma_i;
  parts.u_n = u[static_cast<size_t>(n)];

  parts.s1 = b_mat_ * parts.u_n;
  parts.s2 = stress_dual(parts.sigma_i);

  parts.s3 = Vec::Zero(n_dofs_);
  const Vec mem = memory_values(grid, w_prefix, n, q);
  for (size_t i = 0; i < g3_nodes_.size(); ++i) {
    if (mem(static_cast<int>(i)) == 0.0) continue;
    const Vec2& nu = g3_normal_[i];
    for (int c = 0; c < 2; ++c) {
      const int d = dof_of_node_[2 * g3_nodes_[i] + c];
      if (d >= 0)
        parts.s3(d) += g3_weight_(static_cast<int>(i)) * mem(static_cast<int>(i)) * nu(c);
    }
  }
  return parts;
}

void sigma_I_step(InternalState& state, const ContactAssembly& assembly, const Vec& u_next,
                  double dt, bool implicit) {
  const Material& mat = assembly.material();
  const int n_elems = static_cast<int>(assembly.mesh().triangles.size());
  if (static_cast<int>(state.sigma_i.size()) != n_elems)
    throw ConfigError("internal state does not match the mesh", "state");

  std::vector<Vec3> next(state.sigma_i.size());
  if (!implicit) {
    for (int e = 0; e < n_elems; ++e) {
      const Vec3 eps = assembly.strain(e, state.u_prev);
      const Vec3 arg = mat.elasticity(eps) + state.sigma_i[e];
      next[e] = state.sigma_i[e] + dt * mat.flow_map(state.t_prev, arg, eps);
    }
  } else {
    // Backward rule; the fixed point contracts when dt L_flow < 1.
    const double t_next = state.t_prev + dt;
    for (int e = 0; e < n_elems; ++e) {
      const Vec3 eps = assembly.strain(e, u_next);
      const Vec3 be = mat.elasticity(eps);
      Vec3 s = state.sigma_i[e];
      for (int it = 0; it < 100; ++it) {
        const Vec3 s_new = state.sigma_i[e] + dt * mat.flow_map(t_next, be + s, eps);
        const double step = (s_new - s).norm();
        s = s_new;
        if (step <= 1e-15 * (1.0 + s.norm())) break;
      }
      next[e] = s;
    }
  }
  state.sigma_i = std::move(next);
  state.u_prev = u_next;
  state.t_prev += dt;
}

ContactSystem assemble_problem(Mesh mesh, Material material, ContactData contact,
                               TimeGrid grid) {
  auto assembly = std::make_shared<const ContactAssembly>(std::move(mesh), std::move(material),
                                                          std::move(contact), grid);
  const ContactAssembly& a = *assembly;
  const bool normal_active = !a.contact_empty() && !a.contact().clamp_normal;

  MonotoneOperatorA op_a = MonotoneOperatorA::affine(a.space(), a.viscosity_matrix());

  ConvexBifunction phi = ConvexBifunction::pairing();
  if (normal_active && a.contact().c_p > 0.0) {
    ConvexBifunction::POperator p;
    p.apply = [assembly](const Vec& u) { return assembly->p_dual(u); };
    p.lipschitz = a.lipschitz_p();
    phi = ConvexBifunction::pairing_with(std::move(p));
  }

  NonsmoothFunctional j = NonsmoothFunctional::zero();
  CompactMap m = CompactMap(a.trace_matrix());
  if (!a.contact_empty() && a.contact().friction_bound > 0.0) {
    std::vector<Mat> tangential;
    tangential.reserve(a.contact_nodes().size());
    for (const Vec2& nu : a.contact_normals()) {
      Mat t = Mat::Identity(2, 2) - (nu * nu.transpose());
      tangential.push_back(std::move(t));
    }
    j = NonsmoothFunctional::norm_type(a.contact_weights(), 2, std::move(tangential),
                                       a.contact().friction_bound);
  }

  // An infinite bound disables the velocity constraint (the viscoelastic
  // limit); the damped response and memory terms stay as configured.
  ConstraintSet k = ConstraintSet::whole_space(a.dof_count());
  if (normal_active && std::isfinite(a.contact().g)) {
    const int ng3 = static_cast<int>(a.contact_nodes().size());
    Mat rows = Mat::Zero(ng3, a.dof_count());
    for (int i = 0; i < ng3; ++i) {
      const Vec2& nu = a.contact_normals()[i];
      for (int c = 0; c < 2; ++c) {
        const int d = a.dof(a.contact_nodes()[i], c);
        if (d >= 0) rows(i, d) = nu(c);
      }
    }
    k = ConstraintSet::halfspaces(rows, Vec::Constant(ng3, a.contact().g),
                                  Vec::Zero(a.dof_count()));
  }

  HistoryOperator s = HistoryOperator::custom(
      [assembly](const TimeGrid& g, std::span<const Vec> prefix, int n, Quadrature q) {
        HistoryParts parts = assembly->history_parts(g, prefix, n, q);
        return Vec(parts.s1 + parts.s2 + parts.s3);
      },
      a.lipschitz_s());

  std::vector<Vec> f(static_cast<size_t>(grid.node_count()), a.load_dual());

  VHIProblem problem{a.space(), a.space_x(), grid,          std::move(k), std::move(op_a),
                     std::move(phi),          std::move(j), std::move(m), std::move(s),
                     std::move(f)};
  return ContactSystem{std::move(assembly), std::move(problem)};
}

}  // namespace vhi
