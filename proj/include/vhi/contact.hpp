#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "vhi/problem.hpp"
#include "vhi/stepper.hpp"

namespace vhi {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;  // plane-strain tensors in Voigt order (e11, e22, e12)
using Mat3 = Eigen::Matrix3d;

/// Structured crossed-triangle mesh of a rectangle: (nx+1)(ny+1) grid nodes
/// followed by nx*ny cell centers, four counterclockwise triangles per cell.
/// Boundary tags: left edge 1 (clamped), top and right 2 (traction),
/// bottom 3 (contact), with outward unit normals.
struct Mesh {
  struct BoundaryEdge {
    int a = 0, b = 0;
    int tag = 0;
    Vec2 normal = Vec2::Zero();
  };

  double width = 0.0, height = 0.0;
  int nx = 0, ny = 0;
  std::vector<Vec2> coords;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> edges;

  int node_count() const { return static_cast<int>(coords.size()); }
};

/// contact_bottom = false retags the bottom as a traction boundary, leaving
/// the contact set empty (the unconstrained viscoelastic limit).
Mesh build_mesh(double width, double height, int nx, int ny, bool contact_bottom = true);

/// Plane-strain material laws on Voigt tensors.
///   viscosity   2 theta e + zeta tr(e) I   (m = alpha = 2 theta exactly)
///   elasticity  2 mu e + lambda tr(e) I    (Lipschitz 2 mu + 2 lambda)
///   viscoplastic flow G(t, sigma, eps): perzyna -k (sigma - elasticity(eps)),
///   linear -k sigma, none, or a user law with its own Lipschitz constant.
struct Material {
  enum class Flow { none, perzyna, linear, custom };

  double theta = 2.0;
  double zeta = 1.0;
  double lambda = 1.0;
  double mu = 1.0;
  Flow flow = Flow::perzyna;
  double relax = 0.5;  // k in the built-in flow laws
  std::function<Vec3(double t, const Vec3& sigma, const Vec3& eps)> flow_custom;
  double flow_custom_lipschitz = 0.0;

  Vec3 viscosity(const Vec3& e) const;
  Vec3 elasticity(const Vec3& e) const;
  Vec3 flow_map(double t, const Vec3& sigma, const Vec3& eps) const;

  double m_viscosity() const { return 2.0 * theta; }
  double lipschitz_viscosity() const { return 2.0 * theta + 2.0 * zeta; }
  double lipschitz_elasticity() const { return 2.0 * mu + 2.0 * lambda; }
  /// Joint (sigma, eps) Lipschitz constant of the flow law.
  double lipschitz_flow() const;
};

/// Contact data on the bottom boundary. The bound g constrains the normal
/// velocity (the unknown of the evolution is the velocity field).
struct ContactData {
  double c_p = 1.0;           // normal damped response p(r) = c_p max(0, r)
  double g = 0.02;            // normal velocity bound, > 0; +inf disables it
  std::function<double(double)> memory_kernel;  // b(t); null means no memory
  double friction_bound = 1.0;                  // F in j_tau = F ||.||
  Vec2 f0 = Vec2::Zero();                       // body force density
  Vec2 f2 = Vec2::Zero();                       // traction density on tag-2 edges
  std::vector<Vec2> u0;                         // initial displacement per mesh node; empty = 0
  /// Literal-space variant: additionally clamps the normal component on the
  /// contact boundary, which annihilates the normal contact terms and makes
  /// the velocity constraint trivial. Off by default.
  bool clamp_normal = false;
};

/// Per-element internal stress history plus the displacement it was last
/// advanced with. sigma_i(t_0) = 0.
struct InternalState {
  std::vector<Vec3> sigma_i;
  Vec u_prev;
  double t_prev = 0.0;
};

/// One-step advance of the internal stress by explicit left-rectangle
/// quadrature of the flow integral,
///   sigma_i(t + dt) = sigma_i(t) + dt G(t, elasticity(eps(u(t))) + sigma_i(t), eps(u(t))),
/// or, with implicit = true, the backward variant iterated to its fixed
/// point. Afterwards state.u_prev holds u_next and state.t_prev advances.
class ContactAssembly;
void sigma_I_step(InternalState& state, const ContactAssembly& assembly, const Vec& u_next,
                  double dt, bool implicit = false);

/// History contributions at one node: the three dual vectors, the
/// reconstructed displacement, and the internal stress, all consistent with
/// the quadrature the caller requested.
struct HistoryParts {
  Vec s1, s2, s3;
  Vec u_n;
  std::vector<Vec3> sigma_i;
};

/// Finite element assembly of the contact evolution on the crossed mesh:
/// P1 displacements, one-point element quadrature, exact edge quadrature,
/// velocity unknowns with the clamped dofs eliminated.
class ContactAssembly {
public:
  ContactAssembly(Mesh mesh, Material material, ContactData contact, TimeGrid grid);

  const Mesh& mesh() const { return mesh_; }
  const Material& material() const { return material_; }
  const ContactData& contact() const { return contact_; }
  const TimeGrid& grid() const { return grid_; }

  int dof_count() const { return n_dofs_; }
  /// Dof index of a node component (0 = x, 1 = y); -1 where clamped.
  int dof(int node, int component) const { return dof_of_node_[2 * node + component]; }

  const InnerProductSpace& space() const { return space_; }
  const InnerProductSpace& space_x() const { return space_x_; }
  const Mat& gram() const { return gram_; }
  const Mat& viscosity_matrix() const { return a_mat_; }
  const Mat& elasticity_matrix() const { return b_mat_; }
  const Mat& trace_matrix() const { return trace_; }

  const std::vector<int>& contact_nodes() const { return g3_nodes_; }
  const Vec& contact_weights() const { return g3_weight_; }
  const std::vector<Vec2>& contact_normals() const { return g3_normal_; }
  bool contact_empty() const { return g3_nodes_.empty(); }

  double trace_norm() const { return gamma_norm_; }
  double lipschitz_p() const { return contact_.c_p * gamma_norm_ * gamma_norm_; }
  /// Volterra constant L_S = L_elast + c T + ||gamma||^2 sup|b| with
  /// c = L_flow (L_elast + 1) exp(L_flow T) from the internal stress bound.
  double lipschitz_s() const { return l_s_; }

  Vec u0_dofs() const;
  /// Voigt strain of a dof vector on one element.
  Vec3 strain(int element, const Vec& dofs) const;
  /// Dual vector of a per-element Voigt stress field: v -> (sigma, eps(v)).
  Vec stress_dual(const std::vector<Vec3>& sigma) const;
  /// Normal trace at a contact node (w . nu).
  double normal_value(const Vec& dofs, int contact_index) const;

  /// Normal damped response dual: v -> sum_i weight_i p(w_nu_i) v_nu_i.
  Vec p_dual(const Vec& w) const;

  /// Memory term per contact node at t_n with the given quadrature prefix.
  Vec memory_values(const TimeGrid& grid, std::span<const Vec> w_prefix, int n,
                    Quadrature q) const;

  HistoryParts history_parts(const TimeGrid& grid, std::span<const Vec> w_prefix, int n,
                             Quadrature q) const;

  /// Load dual: v -> (f0, v) + (f2, v)_tag2 (constant in time).
  const Vec& load_dual() const { return f_dual_; }

private:
  friend void sigma_I_step(InternalState&, const ContactAssembly&, const Vec&, double, bool);

  Mesh mesh_;
  Material material_;
  ContactData contact_;
  TimeGrid grid_;
  int n_dofs_ = 0;
  std::vector<int> dof_of_node_;
  std::vector<Eigen::Matrix<double, 3, 6>> b_elem_;
  std::vector<double> area_;
  Mat gram_, a_mat_, b_mat_, trace_;
  std::vector<int> g3_nodes_;
  Vec g3_weight_;
  std::vector<Vec2> g3_normal_;
  InnerProductSpace space_, space_x_;
  double gamma_norm_ = 0.0;
  double l_s_ = 0.0;
  Vec f_dual_;
};

/// P1 element stiffness area * B^T D B for the Voigt constitutive matrix D.
Eigen::Matrix<double, 6, 6> element_stiffness(const std::array<Vec2, 3>& corners,
                                              const Mat3& d);

/// The assembled abstract evolution: unknown is the velocity trajectory.
/// The history operator owns a shared handle to the assembly.
struct ContactSystem {
  std::shared_ptr<const ContactAssembly> assembly;
  VHIProblem problem;
};

ContactSystem assemble_problem(Mesh mesh, Material material, ContactData contact,
                               TimeGrid grid);

/// Trapezoid cumulative integral of the velocity plus the initial
/// displacement; exact for linear integrands, u(t_0) = u0.
Trajectory reconstruct_displacement(const ContactAssembly& assembly, const Trajectory& w);

/// Per-element stress sigma = viscosity(eps(w)) + elasticity(eps(u)) + sigma_i.
std::vector<Vec3> recover_stress(const ContactAssembly& assembly, const Vec& w, const Vec& u,
                                 const std::vector<Vec3>& sigma_i, double t);

/// Row of the contact law report at one node and time.
struct ContactResidualRow {
  double t = 0.0;
  int node = 0;             // mesh node id
  double w_nu = 0.0;        // normal velocity
  double gap = 0.0;         // bound g
  double sigma_nu = 0.0;    // recovered normal traction
  double p_term = 0.0;      // p(w_nu)
  double memory_term = 0.0; // integral of b(t-s) w_nu^+(s)
  double complementarity = 0.0;
  double sigma_tau_norm = 0.0;
  Vec2 sigma_tau = Vec2::Zero();
  Vec2 w_tau = Vec2::Zero();
};

/// Full solution of the contact evolution with post-processed fields.
struct ContactSolution {
  Trajectory w;  // velocity
  Trajectory u;  // displacement
  std::vector<std::vector<Vec3>> sigma;    // per node index, per element
  std::vector<std::vector<Vec3>> sigma_i;  // internal stress used at each node
  std::vector<std::vector<ContactResidualRow>> residuals;  // per node index
  std::vector<double> divergence;  // equilibrium residual away from the contact set
  SteppingReport report;
};

/// Nodal tractions on the contact boundary from discrete reactions: the
/// assembled equation restricted to contact dofs, scaled by the lumped edge
/// mass. w_prefix must hold the values the solver produced (prefix 0..n for
/// trapezoid, and the value at n is still required here for the reaction).
std::vector<Vec2> recover_tractions(const ContactAssembly& assembly, const TimeGrid& grid,
                                    std::span<const Vec> w_values, int n, Quadrature q);

std::vector<ContactResidualRow> contact_residuals(const ContactAssembly& assembly,
                                                  const TimeGrid& grid,
                                                  std::span<const Vec> w_values, int n,
                                                  Quadrature q);

/// Dual norm of the assembled equilibrium residual over the non-contact
/// dofs (the contact dofs carry the reaction).
double divergence_residual(const ContactAssembly& assembly, const Vec& reaction);

/// Drives solve_trajectory on the assembled system and post-processes
/// stresses, tractions, and contact-law residuals at every node.
ContactSolution solve_contact(const ContactSystem& system, SteppingMode mode, double tol,
                              const StepperOptions& options = {});

}  // namespace vhi
