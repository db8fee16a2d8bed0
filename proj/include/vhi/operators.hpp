#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "vhi/space.hpp"

namespace vhi {

struct OperatorNormResult {
  double norm = 0.0;
  Vec maximizer;            // unit V-norm vector attaining the norm
  bool power_converged = true;
  int iterations = 0;
};

/// Largest generalized singular value sup_{v != 0} ||M v||_X / ||v||_V.
/// Power iteration on G_V^{-1} M^T G_X M with Gram-norm normalization
/// (relative accuracy 1e-10); falls back to a dense symmetric eigensolve in
/// the Cholesky-transformed metric when the iteration stalls.
OperatorNormResult operator_norm(const Mat& m, const InnerProductSpace& v_space,
                                 const InnerProductSpace& x_space);

/// Linear compact map M : V -> X between Gram-normed spaces. Duals are
/// coefficient vectors, so the adjoint X* -> V* is the plain transpose.
class CompactMap {
public:
  CompactMap() = default;
  explicit CompactMap(Mat m) : m_(std::move(m)) {}
  static CompactMap identity(int dim) { return CompactMap(Mat::Identity(dim, dim)); }

  const Mat& matrix() const { return m_; }
  int range_dim() const { return static_cast<int>(m_.rows()); }
  int domain_dim() const { return static_cast<int>(m_.cols()); }

  Vec apply(const Vec& v) const { return m_ * v; }
  Vec apply_adjoint(const Vec& xi) const { return m_.transpose() * xi; }

  /// Cached operator norm; valid for one fixed (V, X) pair per map.
  const OperatorNormResult& norm(const InnerProductSpace& v_space,
                                 const InnerProductSpace& x_space) const;

private:
  Mat m_;
  mutable std::optional<OperatorNormResult> cached_norm_;
};

/// Strongly monotone, Lipschitz operator A(t, .) : V -> V* with its
/// hypothesis constants. Affine operators carry their matrix so solvers can
/// factor once; constants for affine operators are derived exactly from
/// generalized eigenvalues in the given space.
class MonotoneOperatorA {
public:
  using EvalFn = std::function<Vec(double t, const Vec& u)>;
  using ShiftFn = std::function<Vec(double t)>;

  struct Constants {
    double m_A = 0.0;      // strong monotonicity modulus
    double alpha_A = 0.0;  // coercivity modulus
    double a1 = 0.0;       // growth slope ||A(t,v)|| <= a0(t) + a1 ||v||
    std::function<double(double)> a0;
  };

  static MonotoneOperatorA affine(const InnerProductSpace& space, Mat linear,
                                  ShiftFn shift = nullptr);
  static MonotoneOperatorA from_eval(EvalFn eval, Constants constants);

  Vec eval(double t, const Vec& u) const;

  bool is_affine() const { return static_cast<bool>(linear_.size()); }
  const Mat& linear_part() const { return linear_; }
  Vec shift(double t) const;
  bool symmetric() const { return symmetric_; }
  const Eigen::PartialPivLU<Mat>& lu() const { return lu_; }
  const Eigen::LLT<Mat>& sym_llt() const { return sym_llt_; }

  double m_A() const { return constants_.m_A; }
  double alpha_A() const { return constants_.alpha_A; }
  double a1() const { return constants_.a1; }
  double a0(double t) const { return constants_.a0 ? constants_.a0(t) : 0.0; }

  /// Lipschitz constant used for step-size selection: the exact (V,V*) norm
  /// for affine operators, otherwise 1.5x the largest difference quotient
  /// over 1e3 deterministic sample pairs.
  double lipschitz(const InnerProductSpace& space) const;

private:
  EvalFn eval_;
  Constants constants_;
  Mat linear_;
  ShiftFn shift_;
  bool symmetric_ = false;
  Eigen::PartialPivLU<Mat> lu_;
  Eigen::LLT<Mat> sym_llt_;
};

/// Convex-in-last-slot bifunction phi~(z, u, v); z is the history slot, u the
/// frozen state slot. alpha is the joint Lipschitz constant of the first two
/// slots in the four-point estimate.
class ConvexBifunction {
public:
  using EvalFn = std::function<double(const Vec& z, const Vec& u, const Vec& v)>;
  using SubgradFn = std::function<Vec(const Vec& z, const Vec& u, const Vec& v)>;
  using ProxFn = std::function<Vec(const Vec& z, const Vec& u, const Vec& w, double lambda)>;

  /// Lipschitz perturbation operator for the state slot.
  struct POperator {
    std::function<Vec(const Vec&)> apply;
    double lipschitz = 0.0;
  };

  static ConvexBifunction zero();
  /// phi~(z,u,v) = <z,v>.
  static ConvexBifunction pairing();
  /// phi~(z,u,v) = <z,v> + <P(u),v>, alpha = max(1, L_P).
  static ConvexBifunction pairing_with(POperator p);
  /// alpha_state < 0 defaults it to alpha (a valid but possibly loose bound).
  static ConvexBifunction from_oracle(EvalFn eval, SubgradFn subgrad3, double alpha,
                                      bool linear_in_v, ProxFn prox3 = nullptr,
                                      double alpha_state = -1.0);

  double eval(const Vec& z, const Vec& u, const Vec& v) const;
  /// Subgradient of v -> phi~(z,u,v); exact gradient when linear in v.
  Vec subgrad3(const Vec& z, const Vec& u, const Vec& v) const;
  bool has_prox() const { return static_cast<bool>(prox3_); }
  Vec prox3(const Vec& z, const Vec& u, const Vec& w, double lambda) const;

  bool linear_in_v() const { return linear_in_v_; }
  bool is_zero() const { return is_zero_; }
  /// Joint four-point constant alpha_phi~ over (z, u) jointly; enters the
  /// problem-level well-posedness gate.
  double alpha() const { return alpha_; }
  /// Four-point constant of the state slot alone (z held fixed); this is the
  /// constant the frozen-history static solves actually contract with, and
  /// is <= alpha(). Pure pairings in z have alpha_state = 0.
  double alpha_state() const { return alpha_state_; }
  const POperator* p_operator() const { return p_ ? &*p_ : nullptr; }

private:
  EvalFn eval_;
  SubgradFn subgrad3_;
  ProxFn prox3_;
  std::optional<POperator> p_;
  double alpha_ = 0.0;
  double alpha_state_ = 0.0;
  bool linear_in_v_ = true;
  bool is_zero_ = true;
};

/// Locally Lipschitz (possibly nonconvex) functional J(t, .) : X -> R with
/// Clarke directional derivative and a minimal-norm subgradient selection.
/// m_J is the relaxed monotonicity constant; c0(t), c1 bound the subgradient
/// growth ||dJ(t,x)|| <= c0(t) + c1 ||x||.
/// Conjugate description of a positively homogeneous convex functional
/// j(x) = sum_i radii_i ||P_i x_i||: the supremum of <lambda, x> over
/// per-node multipliers with ||lambda_i|| <= radii_i. Solvers exploit it to
/// handle j exactly through its dual instead of a subgradient selection.
struct DualBallStructure {
  Vec radii;
  int node_dim = 0;
  std::vector<Mat> projectors;  // empty: identity per node
};

class NonsmoothFunctional {
public:
  using EvalFn = std::function<double(double t, const Vec& x)>;
  using DirFn = std::function<double(double t, const Vec& x, const Vec& d)>;
  using SubgradFn = std::function<Vec(double t, const Vec& x)>;

  static NonsmoothFunctional zero();
  /// J(t,x) = bound * sum_i w_i ||T_i x_i|| over nodes of size node_dim;
  /// T_i are optional projectors (e.g. tangential parts). Convex: m_J = 0.
  static NonsmoothFunctional norm_type(Vec node_weights, int node_dim,
                                       std::vector<Mat> projectors = {}, double bound = 1.0);
  /// J(t,x) = -(mu/2) x^T G_X x. Nonconvex with tight relaxed monotonicity
  /// constant m_J = mu and Lipschitz subgradient selection.
  static NonsmoothFunctional concave_quadratic(double mu, Mat gram_x);
  static NonsmoothFunctional from_oracle(EvalFn eval, DirFn dirderiv, SubgradFn subgrad,
                                         double m_j, double c0, double c1);

  double eval(double t, const Vec& x) const;
  double dirderiv(double t, const Vec& x, const Vec& d) const;
  Vec subgrad(double t, const Vec& x) const;

  bool is_zero() const { return is_zero_; }
  double m_J() const { return m_j_; }
  double c0(double t) const { return c0_ ? c0_(t) : 0.0; }
  double c1() const { return c1_; }
  const std::optional<DualBallStructure>& dual_ball() const { return dual_ball_; }

private:
  EvalFn eval_;
  DirFn dir_;
  SubgradFn subgrad_;
  std::function<double(double)> c0_;
  double c1_ = 0.0;
  double m_j_ = 0.0;
  bool is_zero_ = true;
  std::optional<DualBallStructure> dual_ball_;
};

/// Clarke directional derivative J0(t, x; d) with NaN screening of
/// user-supplied oracles.
double clarke_dd(const NonsmoothFunctional& j, double t, const Vec& x, const Vec& d);

/// Minimal-norm subgradient selection from dJ(t, x), NaN-screened.
Vec select_subgrad(const NonsmoothFunctional& j, double t, const Vec& x);

}  // namespace vhi
