#include "vhi/operators.hpp"

#include <cmath>
#include <memory>
#include <random>

#include <Eigen/Dense>

#include "vhi/errors.hpp"

namespace vhi {

OperatorNormResult operator_norm(const Mat& m, const InnerProductSpace& v_space,
                                 const InnerProductSpace& x_space) {
  if (m.cols() != v_space.dim() || m.rows() != x_space.dim()) {
    throw ConfigError("compact map dimensions do not match the spaces", "M");
  }
  OperatorNormResult out;
  const Mat normal = m.transpose() * x_space.gram() * m;  // M^T G_X M

  Vec v = Vec::Ones(v_space.dim());
  v /= v_space.norm(v);
  double lambda = v.dot(normal * v);
  const int cap = 5000;
  bool converged = false;
  for (int k = 0; k < cap; ++k) {
    Vec w = v_space.riesz(normal * v);
    const double wn = v_space.norm(w);
    if (wn <= 1e-300) {  // M v = 0: restart once from a skewed vector, else M = 0
      Vec alt = Vec::Zero(v_space.dim());
      alt[0] = 1.0;
      if (v_space.dim() > 1) alt[v_space.dim() - 1] = 0.5;
      alt /= v_space.norm(alt);
      if ((alt - v).norm() < 1e-14) {
        out.norm = 0.0;
        out.maximizer = v;
        out.iterations = k;
        return out;
      }
      v = alt;
      lambda = v.dot(normal * v);
      continue;
    }
    v = w / wn;
    const double next = v.dot(normal * v);
    out.iterations = k + 1;
    if (std::abs(next - lambda) <= 1e-10 * std::max(next, 1e-300)) {
      lambda = next;
      converged = true;
      break;
    }
    lambda = next;
  }
  if (converged) {
    out.norm = std::sqrt(std::max(0.0, lambda));
    out.maximizer = v;
    return out;
  }

  // Dense fallback: eigensolve of L^{-1} (M^T G_X M) L^{-T} with G_V = L L^T.
  out.power_converged = false;
  const Mat l = v_space.chol().matrixL();
  const Mat b = l.triangularView<Eigen::Lower>().solve(
      Mat(l.triangularView<Eigen::Lower>().solve(normal).transpose()));
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (b + b.transpose()));
  int best = 0;
  es.eigenvalues().maxCoeff(&best);
  out.norm = std::sqrt(std::max(0.0, es.eigenvalues()[best]));
  Vec y = es.eigenvectors().col(best);
  Vec vx = l.transpose().triangularView<Eigen::Upper>().solve(y);
  out.maximizer = vx / v_space.norm(vx);
  return out;
}

const OperatorNormResult& CompactMap::norm(const InnerProductSpace& v_space,
                                           const InnerProductSpace& x_space) const {
  if (!cached_norm_) cached_norm_ = operator_norm(m_, v_space, x_space);
  return *cached_norm_;
}

MonotoneOperatorA MonotoneOperatorA::affine(const InnerProductSpace& space, Mat linear,
                                            ShiftFn shift) {
  if (linear.rows() != space.dim() || linear.cols() != space.dim()) {
    throw ConfigError("affine operator matrix does not match the space", "A");
  }
  MonotoneOperatorA a;
  a.linear_ = std::move(linear);
  a.shift_ = std::move(shift);

  // Exact constants from the generalized spectra in the space's metric.
  const Mat l = space.chol().matrixL();
  const Mat sym = 0.5 * (a.linear_ + a.linear_.transpose());
  const Mat sym_t = l.triangularView<Eigen::Lower>().solve(
      Mat(l.triangularView<Eigen::Lower>().solve(sym).transpose()));
  Eigen::SelfAdjointEigenSolver<Mat> es_m(0.5 * (sym_t + sym_t.transpose()));
  a.constants_.m_A = es_m.eigenvalues().minCoeff();
  a.constants_.alpha_A = a.constants_.m_A;

  const Mat normal = a.linear_.transpose() * space.chol().solve(a.linear_);
  const Mat normal_t = l.triangularView<Eigen::Lower>().solve(
      Mat(l.triangularView<Eigen::Lower>().solve(normal).transpose()));
  Eigen::SelfAdjointEigenSolver<Mat> es_n(0.5 * (normal_t + normal_t.transpose()));
  a.constants_.a1 = std::sqrt(std::max(0.0, es_n.eigenvalues().maxCoeff()));
  if (a.shift_) {
    const ShiftFn sh = a.shift_;
    auto sp = std::make_shared<InnerProductSpace>(space);
    a.constants_.a0 = [sh, sp](double t) { return sp->dual_norm(sh(t)); };
  }

  a.symmetric_ = (a.linear_ - a.linear_.transpose()).cwiseAbs().maxCoeff() <=
                 1e-12 * (1.0 + a.linear_.cwiseAbs().maxCoeff());
  a.lu_.compute(a.linear_);
  if (a.symmetric_ && a.constants_.m_A > 0.0) a.sym_llt_.compute(sym);
  return a;
}

MonotoneOperatorA MonotoneOperatorA::from_eval(EvalFn eval, Constants constants) {
  if (!eval) throw ConfigError("operator A requires an evaluation function", "A");
  MonotoneOperatorA a;
  a.eval_ = std::move(eval);
  a.constants_ = std::move(constants);
  return a;
}

Vec MonotoneOperatorA::eval(double t, const Vec& u) const {
  if (is_affine()) {
    Vec r = linear_ * u;
    if (shift_) r += shift_(t);
    return r;
  }
  return eval_(t, u);
}

Vec MonotoneOperatorA::shift(double t) const {
  if (shift_) return shift_(t);
  return Vec::Zero(linear_.rows());
}

double MonotoneOperatorA::lipschitz(const InnerProductSpace& space) const {
  if (is_affine()) return constants_.a1;
  std::mt19937 rng(12345);
  std::normal_distribution<double> dist(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    Vec u1(space.dim()), u2(space.dim());
    for (int i = 0; i < space.dim(); ++i) {
      u1[i] = dist(rng);
      u2[i] = dist(rng);
    }
    const double du = space.dist(u1, u2);
    if (du <= 1e-12) continue;
    const double t = 0.5;
    const double ratio = space.dual_dist(eval_(t, u1), eval_(t, u2)) / du;
    worst = std::max(worst, ratio);
  }
  return 1.5 * worst;
}

ConvexBifunction ConvexBifunction::zero() {
  ConvexBifunction p;
  p.eval_ = [](const Vec&, const Vec&, const Vec&) { return 0.0; };
  p.subgrad3_ = [](const Vec&, const Vec&, const Vec& v) { return Vec(Vec::Zero(v.size())); };
  p.alpha_ = 0.0;
  p.alpha_state_ = 0.0;
  p.linear_in_v_ = true;
  p.is_zero_ = true;
  return p;
}

ConvexBifunction ConvexBifunction::pairing() {
  ConvexBifunction p;
  p.eval_ = [](const Vec& z, const Vec&, const Vec& v) { return z.dot(v); };
  p.subgrad3_ = [](const Vec& z, const Vec&, const Vec&) { return z; };
  // z enters linearly (joint constant 1) but the state slot is inert.
  p.alpha_ = 1.0;
  p.alpha_state_ = 0.0;
  p.linear_in_v_ = true;
  p.is_zero_ = false;
  return p;
}

ConvexBifunction ConvexBifunction::pairing_with(POperator pop) {
  if (!pop.apply) throw ConfigError("P operator requires an apply function", "P");
  ConvexBifunction p;
  auto apply = pop.apply;
  p.eval_ = [apply](const Vec& z, const Vec& u, const Vec& v) {
    return z.dot(v) + apply(u).dot(v);
  };
  p.subgrad3_ = [apply](const Vec& z, const Vec& u, const Vec&) { return Vec(z + apply(u)); };
  p.alpha_ = std::max(1.0, pop.lipschitz);
  p.alpha_state_ = pop.lipschitz;
  p.linear_in_v_ = true;
  p.is_zero_ = false;
  p.p_ = std::move(pop);
  return p;
}

ConvexBifunction ConvexBifunction::from_oracle(EvalFn eval, SubgradFn subgrad3, double alpha,
                                               bool linear_in_v, ProxFn prox3,
                                               double alpha_state) {
  if (!eval || !subgrad3) throw ConfigError("bifunction oracle requires eval and subgrad", "phi");
  ConvexBifunction p;
  p.eval_ = std::move(eval);
  p.subgrad3_ = std::move(subgrad3);
  p.prox3_ = std::move(prox3);
  p.alpha_ = alpha;
  p.alpha_state_ = alpha_state < 0.0 ? alpha : alpha_state;
  p.linear_in_v_ = linear_in_v;
  p.is_zero_ = false;
  return p;
}

double ConvexBifunction::eval(const Vec& z, const Vec& u, const Vec& v) const {
  return eval_(z, u, v);
}

Vec ConvexBifunction::subgrad3(const Vec& z, const Vec& u, const Vec& v) const {
  return subgrad3_(z, u, v);
}

Vec ConvexBifunction::prox3(const Vec& z, const Vec& u, const Vec& w, double lambda) const {
  if (!prox3_) throw ConfigError("bifunction has no prox oracle", "phi");
  return prox3_(z, u, w, lambda);
}

NonsmoothFunctional NonsmoothFunctional::zero() {
  NonsmoothFunctional j;
  j.eval_ = [](double, const Vec&) { return 0.0; };
  j.dir_ = [](double, const Vec&, const Vec&) { return 0.0; };
  j.subgrad_ = [](double, const Vec& x) { return Vec(Vec::Zero(x.size())); };
  j.is_zero_ = true;
  return j;
}

NonsmoothFunctional NonsmoothFunctional::norm_type(Vec node_weights, int node_dim,
                                                   std::vector<Mat> projectors, double bound) {
  const int nodes = static_cast<int>(node_weights.size());
  if (nodes == 0 || node_dim < 1) throw ConfigError("norm functional needs nodes", "J");
  if (!projectors.empty() && static_cast<int>(projectors.size()) != nodes) {
    throw ConfigError("one projector per node required", "J");
  }
  if (node_weights.minCoeff() < 0.0) throw ConfigError("node weights must be nonnegative", "J");

  auto part = [projectors, node_dim](const Vec& x, int i) -> Vec {
    Vec xi = x.segment(static_cast<Eigen::Index>(i) * node_dim, node_dim);
    if (!projectors.empty()) xi = projectors[i] * xi;
    return xi;
  };

  NonsmoothFunctional j;
  j.eval_ = [part, node_weights, bound, nodes](double, const Vec& x) {
    double s = 0.0;
    for (int i = 0; i < nodes; ++i) s += node_weights[i] * part(x, i).norm();
    return bound * s;
  };
  j.dir_ = [part, node_weights, bound, nodes](double, const Vec& x, const Vec& d) {
    double s = 0.0;
    for (int i = 0; i < nodes; ++i) {
      const Vec xi = part(x, i);
      const Vec di = part(d, i);
      const double nx = xi.norm();
      s += node_weights[i] * (nx > 0.0 ? xi.dot(di) / nx : di.norm());
    }
    return bound * s;
  };
  j.subgrad_ = [part, node_weights, bound, nodes, node_dim](double, const Vec& x) {
    Vec zeta = Vec::Zero(x.size());
    for (int i = 0; i < nodes; ++i) {
      const Vec xi = part(x, i);
      const double nx = xi.norm();
      // The subdifferential at a kink is the unit ball (times weight); its
      // minimal-norm element is zero.
      if (nx > 0.0) {
        zeta.segment(static_cast<Eigen::Index>(i) * node_dim, node_dim) =
            (bound * node_weights[i] / nx) * xi;
      }
    }
    return zeta;
  };
  j.m_j_ = 0.0;
  const double c0 = bound * std::sqrt(node_weights.sum());
  j.c0_ = [c0](double) { return c0; };
  j.c1_ = 0.0;
  j.is_zero_ = false;
  j.dual_ball_ = DualBallStructure{Vec(bound * node_weights), node_dim, std::move(projectors)};
  return j;
}

NonsmoothFunctional NonsmoothFunctional::concave_quadratic(double mu, Mat gram_x) {
  if (!(mu >= 0.0)) throw ConfigError("concave quadratic needs mu >= 0", "J");
  NonsmoothFunctional j;
  Mat g = std::move(gram_x);
  j.eval_ = [mu, g](double, const Vec& x) { return -0.5 * mu * x.dot(g * x); };
  j.dir_ = [mu, g](double, const Vec& x, const Vec& d) { return -mu * (g * x).dot(d); };
  j.subgrad_ = [mu, g](double, const Vec& x) { return Vec(-mu * (g * x)); };
  j.m_j_ = mu;
  j.c0_ = nullptr;
  j.c1_ = mu;
  j.is_zero_ = false;
  return j;
}

NonsmoothFunctional NonsmoothFunctional::from_oracle(EvalFn eval, DirFn dirderiv,
                                                     SubgradFn subgrad, double m_j, double c0,
                                                     double c1) {
  if (!eval || !dirderiv || !subgrad) {
    throw ConfigError("nonsmooth oracle requires eval, dirderiv and subgrad", "J");
  }
  NonsmoothFunctional j;
  j.eval_ = std::move(eval);
  j.dir_ = std::move(dirderiv);
  j.subgrad_ = std::move(subgrad);
  j.m_j_ = m_j;
  j.c0_ = [c0](double) { return c0; };
  j.c1_ = c1;
  j.is_zero_ = false;
  return j;
}

double NonsmoothFunctional::eval(double t, const Vec& x) const { return eval_(t, x); }

double NonsmoothFunctional::dirderiv(double t, const Vec& x, const Vec& d) const {
  return dir_(t, x, d);
}

Vec NonsmoothFunctional::subgrad(double t, const Vec& x) const { return subgrad_(t, x); }

double clarke_dd(const NonsmoothFunctional& j, double t, const Vec& x, const Vec& d) {
  const double v = j.dirderiv(t, x, d);
  if (std::isnan(v)) throw ConfigError("nonsmooth oracle returned NaN in dirderiv", "J");
  return v;
}

Vec select_subgrad(const NonsmoothFunctional& j, double t, const Vec& x) {
  Vec z = j.subgrad(t, x);
  if (!z.allFinite()) throw ConfigError("nonsmooth oracle returned NaN in subgrad", "J");
  return z;
}

}  // namespace vhi
