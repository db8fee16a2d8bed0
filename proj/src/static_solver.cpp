#include "vhi/static_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "vhi/errors.hpp"
#include "vhi/qp.hpp"

namespace vhi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double halton(long index, int base) {
  double f = 1.0, r = 0.0;
  for (long n = index; n > 0; n /= base) {
    f /= base;
    r += f * static_cast<double>(n % base);
  }
  return r;
}

int env_thread_count() {
  const char* raw = std::getenv("VHI_THREADS");
  if (!raw) return 1;
  const long v = std::strtol(raw, nullptr, 10);
  return static_cast<int>(std::clamp(v, 1L, 16L));
}

}  // namespace

StaticInstance StaticInstance::at_node(const VHIProblem& problem, int n, Vec z) {
  if (n < 0 || n > problem.grid.steps) throw ConfigError("node index out of range");
  return make(problem.space, problem.spaceX, problem.K, problem.A, problem.phi, problem.J,
              problem.M, problem.grid.node(n), std::move(z), problem.f[n]);
}

StaticInstance StaticInstance::make(const InnerProductSpace& space,
                                    const InnerProductSpace& space_x, const ConstraintSet& k,
                                    const MonotoneOperatorA& a, const ConvexBifunction& phi,
                                    const NonsmoothFunctional& j, const CompactMap& m, double t,
                                    Vec z, Vec f) {
  StaticInstance inst;
  inst.space = &space;
  inst.space_x = &space_x;
  inst.K = &k;
  inst.A = &a;
  inst.phi = &phi;
  inst.J = &j;
  inst.M = &m;
  inst.t = t;
  inst.z = std::move(z);
  inst.f = std::move(f);
  return inst;
}

double StaticInstance::m_norm() const { return M->norm(*space, *space_x).norm; }

const WellPosednessReport& StaticInstance::gate() const {
  if (!cached_gate_) {
    // The frozen-history solve only sees phi's u-slot, so the state-slot
    // Lipschitz part of alpha() does not enter this contraction.
    cached_gate_ = check_smallness_constants(A->m_A(), A->alpha_A(), phi->alpha_state(),
                                             J->m_J(), m_norm());
  }
  return *cached_gate_;
}

double StaticInstance::lipschitz_A() const {
  if (!cached_lipschitz_) cached_lipschitz_ = A->lipschitz(*space);
  return *cached_lipschitz_;
}

ConvexVIResult solve_convex_vi(const StaticInstance& inst, const Vec& u_bar, const Vec& zeta,
                               const Vec& guess, double tol, long max_iter) {
  const InnerProductSpace& sp = *inst.space;
  const Vec mtz = inst.M->apply_adjoint(zeta);
  const bool phi_lin = inst.phi->linear_in_v();
  ConvexVIResult out;

  if (inst.A->is_affine() && phi_lin) {
    const Vec g_phi = inst.phi->subgrad3(inst.z, u_bar, u_bar);
    if (inst.K->is_whole_space()) {
      out.u = inst.A->lu().solve(inst.f - inst.A->shift(inst.t) - mtz - g_phi);
      out.direct = true;
      out.iterations = 1;
      return out;
    }
    const bool polyhedral = inst.K->kind() == ConstraintSet::Kind::box ||
                            inst.K->kind() == ConstraintSet::Kind::halfspaces;
    if (polyhedral && inst.A->symmetric() && inst.A->m_A() > 0.0) {
      // With symmetric SPD A the linear VI over a polyhedron is the KKT
      // system of a strictly convex QP; the active-set method is exact.
      if (inst.K->rows().rows() == 0) {
        out.u = inst.A->lu().solve(inst.f - inst.A->shift(inst.t) - mtz - g_phi);
      } else {
        const Vec q = inst.A->shift(inst.t) + mtz + g_phi - inst.f;
        const Vec start = inst.K->contains(sp, guess, 1e-12) ? guess : inst.K->feasible_point();
        auto qp = solve_qp_active_set(inst.A->linear_part(), inst.A->sym_llt(), q, inst.K->rows(),
                                      inst.K->offsets(), start);
        out.u = std::move(qp.x);
        out.iterations = qp.iterations;
      }
      out.direct = true;
      return out;
    }
  }

  // General path: projected fixed point with the contraction step size.
  const double m = inst.A->m_A();
  double lip = inst.lipschitz_A();
  if (!(lip > 0.0)) {
    throw ConfigError("degenerate step size: operator A has zero Lipschitz constant", "A");
  }
  lip = std::max(lip, m);
  const double rho = m / (lip * lip);
  const double kappa = std::sqrt(std::max(0.0, 1.0 - (m * m) / (lip * lip)));
  const double gap_factor = kappa < 1.0 ? kappa / (1.0 - kappa) : kInf;

  const bool prox_path = inst.phi->has_prox() && inst.K->is_whole_space() && !phi_lin;
  Vec u = project(*inst.K, guess, sp);
  for (long it = 0; it < max_iter; ++it) {
    Vec next;
    if (prox_path) {
      const Vec w = u - rho * sp.riesz(inst.A->eval(inst.t, u) + mtz - inst.f);
      next = inst.phi->prox3(inst.z, u_bar, w, rho);
    } else {
      const Vec r =
          inst.A->eval(inst.t, u) + mtz + inst.phi->subgrad3(inst.z, u_bar, u) - inst.f;
      next = project(*inst.K, u - rho * sp.riesz(r), sp);
    }
    const double step = sp.dist(next, u);
    u = std::move(next);
    out.iterations = static_cast<int>(it) + 1;
    out.step = step;
    if (step == 0.0 || gap_factor * step <= tol) {
      out.u = std::move(u);
      return out;
    }
  }
  throw NonconvergenceError("convex inner solve exceeded its iteration limit", {u});
}

namespace {

// Exact treatment of a convex norm-type J on the direct QP path. With the
// state slot frozen, the inner problem is
//   min_{u in K} 1/2 u'Hu + q0'u + sum_i r_i ||(Bu)_i||,
// solved by projected dual ascent on the per-node multipliers. The duality
// gap sum_i (r_i ||x_i|| - lambda_i . x_i) bounds the primal error through
// strong convexity, so the stop certificate needs no rate estimate.
struct BallInner {
  Mat b;                 // per-node projector times the rows of M, Euclidean
  double m_e = 0.0;      // smallest eigenvalue of sym(H)
  double rho = 0.0;      // dual step, m_e / ||B||^2
  double v_scale = 1.0;  // ||.||_V <= v_scale ||.||_2
};

bool direct_ball_eligible(const StaticInstance& inst) {
  const auto& db = inst.J->dual_ball();
  if (!db) return false;
  if (!inst.A->is_affine() || !inst.A->symmetric() || !(inst.A->m_A() > 0.0)) return false;
  if (!inst.phi->linear_in_v()) return false;
  if (inst.M->matrix().rows() !=
      static_cast<Eigen::Index>(db->radii.size()) * db->node_dim) {
    return false;
  }
  const auto kind = inst.K->kind();
  return inst.K->is_whole_space() || kind == ConstraintSet::Kind::box ||
         kind == ConstraintSet::Kind::halfspaces;
}

BallInner make_ball_inner(const StaticInstance& inst) {
  const DualBallStructure& db = *inst.J->dual_ball();
  const Mat& m = inst.M->matrix();
  const int nodes = static_cast<int>(db.radii.size());
  const Eigen::Index nd = db.node_dim;
  BallInner bi;
  bi.b = m;
  for (int i = 0; i < nodes && !db.projectors.empty(); ++i) {
    bi.b.middleRows(i * nd, nd) = db.projectors[i] * m.middleRows(i * nd, nd);
  }
  const Mat sym = 0.5 * (inst.A->linear_part() + inst.A->linear_part().transpose());
  bi.m_e = Eigen::SelfAdjointEigenSolver<Mat>(sym).eigenvalues().minCoeff();
  const double bn = bi.b.jacobiSvd().singularValues()(0);
  bi.rho = bn > 0.0 ? bi.m_e / (bn * bn) : 0.0;
  const double g_max =
      Eigen::SelfAdjointEigenSolver<Mat>(inst.space->gram()).eigenvalues().maxCoeff();
  bi.v_scale = std::sqrt(std::max(g_max, 0.0));
  return bi;
}

ConvexVIResult solve_convex_ball(const StaticInstance& inst, const Vec& u_bar, Vec& lambda,
                                 const BallInner& bi, double tol, long max_iter) {
  const DualBallStructure& db = *inst.J->dual_ball();
  const int nodes = static_cast<int>(db.radii.size());
  const Eigen::Index nd = db.node_dim;
  const Vec g_phi = inst.phi->subgrad3(inst.z, u_bar, u_bar);
  const Vec q0 = inst.A->shift(inst.t) + g_phi - inst.f;
  const bool constrained = !inst.K->is_whole_space() && inst.K->rows().rows() > 0;
  const InnerProductSpace& sp = *inst.space;

  ConvexVIResult out;
  out.direct = true;
  Vec u;
  Vec prev;
  Vec start = inst.K->contains(sp, u_bar, 1e-12) ? u_bar : inst.K->feasible_point();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (long it = 0; it < max_iter; ++it) {
    const Vec q = q0 + bi.b.transpose() * lambda;
    if (constrained) {
      auto qp = solve_qp_active_set(inst.A->linear_part(), inst.A->sym_llt(), q, inst.K->rows(),
                                    inst.K->offsets(), start);
      u = std::move(qp.x);
    } else {
      u = inst.A->lu().solve(-q);
    }
    start = u;
    out.iterations = static_cast<int>(it + 1);
    const Vec x = bi.b * u;
    double gap = 0.0;
    for (int i = 0; i < nodes; ++i) {
      gap += db.radii[i] * x.segment(i * nd, nd).norm() -
             lambda.segment(i * nd, nd).dot(x.segment(i * nd, nd));
    }
    gap = std::max(gap, 0.0);
    if (bi.v_scale * std::sqrt(2.0 * gap / bi.m_e) <= tol) {
      out.u = std::move(u);
      return out;
    }
    double dual_step = 0.0;
    for (int i = 0; i < nodes; ++i) {
      Vec cand = lambda.segment(i * nd, nd) + bi.rho * x.segment(i * nd, nd);
      const double n = cand.norm();
      if (n > db.radii[i]) cand *= db.radii[i] / n;
      dual_step += (cand - lambda.segment(i * nd, nd)).squaredNorm();
      lambda.segment(i * nd, nd) = cand;
    }
    dual_step = std::sqrt(dual_step);
    // The gap certificate cannot reach tight tolerances in doubles (it
    // squares the primal error), so a roundoff-scale orbit of both iterates
    // is accepted as the attainable fixed point; the caller's own step
    // criterion remains the accuracy arbiter.
    const double u_step = prev.size() ? sp.dist(u, prev) : kInf;
    prev = u;
    if (u_step <= 256.0 * eps * (1.0 + sp.norm(u)) &&
        dual_step <= 256.0 * eps * (1.0 + lambda.norm())) {
      out.u = std::move(u);
      return out;
    }
  }
  throw NonconvergenceError("dual friction iteration exceeded its iteration limit", {u});
}

}  // namespace

SolveReport solve_static(const StaticInstance& inst, const Vec& guess, double tol,
                         const SolveOptions& options) {
  const WellPosednessReport& gate = inst.gate();
  if (!gate.pass) throw SmallnessError(gate);

  SolveReport rep;
  rep.gate = gate;
  const InnerProductSpace& sp = *inst.space;
  Vec u = project(*inst.K, guess, sp);

  const double inner_tol = options.inner_tol > 0.0 ? options.inner_tol : tol * 1e-2;
  int cap = options.max_outer;
  if (cap <= 0) {
    const double q = std::clamp(gate.q, 1e-12, 1.0 - 1e-12);
    cap = static_cast<int>(std::clamp(
        10.0 * std::ceil(std::log(std::max(tol, 1e-300)) / std::log(q)), 30.0, 2e5));
  }

  // A convex norm-type J on the direct path is resolved inside each inner
  // solve through its dual ball; the multipliers warm-start across outer
  // iterations. Otherwise J enters through a subgradient selection.
  const bool ball_path = direct_ball_eligible(inst);
  BallInner ball;
  Vec lambda;
  if (ball_path) {
    ball = make_ball_inner(inst);
    lambda = Vec::Zero(ball.b.rows());
  }

  Vec prev1, prev2;
  for (int k = 0; k < cap; ++k) {
    ConvexVIResult cvi;
    if (ball_path) {
      cvi = solve_convex_ball(inst, u, lambda, ball, inner_tol, options.max_inner);
    } else {
      const Vec x = inst.M->apply(u);
      const Vec zeta = select_subgrad(*inst.J, inst.t, x);
      cvi = solve_convex_vi(inst, u, zeta, u, inner_tol, options.max_inner);
    }
    rep.inner_iterations += cvi.iterations;
    const double step = sp.dist(cvi.u, u);
    rep.step_norms.push_back(step);
    const int nsteps = static_cast<int>(rep.step_norms.size());
    if (nsteps >= 2 && rep.step_norms[nsteps - 2] > 0.0) {
      rep.contraction_estimates.push_back(step / rep.step_norms[nsteps - 2]);
    }
    prev2 = std::move(prev1);
    prev1 = u;
    u = std::move(cvi.u);
    rep.outer_iterations = k + 1;
    rep.final_step = step;
    if (step <= tol) {
      rep.converged = true;
      break;
    }
  }
  if (!rep.converged) {
    std::vector<Vec> tail;
    if (prev2.size()) tail.push_back(prev2);
    if (prev1.size()) tail.push_back(prev1);
    tail.push_back(u);
    throw NonconvergenceError("successive approximation exceeded its iteration cap", tail);
  }
  rep.u = std::move(u);
  return rep;
}

namespace {

// Worst-violation scan context shared by the brute-force candidates.
struct BruteContext {
  const StaticInstance* inst;
  std::vector<std::vector<double>> axes;
  bool filter;  // non-box K: candidates and probes must pass K.contains
  Vec lo, hi;
};

// Violation of probe v against candidate u:
//   <f - A u, v-u> - phi(z,u,v) + phi(z,u,u) - J0(t, Mu; M(v-u)).
// Positive means the inequality fails at v.
class CandidateScorer {
public:
  CandidateScorer(const BruteContext& ctx, const Vec& u)
      : ctx_(ctx), u_(u), au_(ctx.inst->A->eval(ctx.inst->t, u)),
        mu_(ctx.inst->M->apply(u)),
        phi_uu_(ctx.inst->phi->eval(ctx.inst->z, u, u)),
        fu_(ctx.inst->f - au_) {}

  double violation(const Vec& v) const {
    const Vec dv = v - u_;
    const Vec mdv = ctx_.inst->M->apply(dv);
    return fu_.dot(dv) - ctx_.inst->phi->eval(ctx_.inst->z, u_, v) + phi_uu_ -
           ctx_.inst->J->dirderiv(ctx_.inst->t, mu_, mdv);
  }

  // Vertex of the box maximizing the linearized violation.
  Vec greedy_vertex() const {
    const Vec r = fu_ - ctx_.inst->phi->subgrad3(ctx_.inst->z, u_, u_) -
                  ctx_.inst->M->apply_adjoint(ctx_.inst->J->subgrad(ctx_.inst->t, mu_));
    Vec v(u_.size());
    for (int i = 0; i < v.size(); ++i) v[i] = r[i] > 0.0 ? ctx_.hi[i] : ctx_.lo[i];
    return v;
  }

private:
  const BruteContext& ctx_;
  const Vec& u_;
  Vec au_, mu_;
  double phi_uu_;
  Vec fu_;
};

// Cheap lower bound for max_v violation(u, v): the vertex maximizing the
// linearized violation (exact whenever the violation is linear in v, the
// generic smooth-at-u case), all box vertices, and local lattice offsets.
// Never prunes, so the returned value is a valid lower bound of the max.
double priority_bound(const BruteContext& ctx, const CandidateScorer& scorer, const Vec& u) {
  const int d = static_cast<int>(u.size());
  double best = 0.0;  // v = u contributes 0
  auto feed = [&](const Vec& v) {
    if (ctx.filter && !ctx.inst->K->contains(*ctx.inst->space, v, 1e-9)) return;
    best = std::max(best, scorer.violation(v));
  };
  feed(scorer.greedy_vertex());
  const int corners = 1 << d;
  Vec v(d);
  for (int mask = 0; mask < corners; ++mask) {
    for (int i = 0; i < d; ++i) v[i] = (mask >> i) & 1 ? ctx.hi[i] : ctx.lo[i];
    feed(v);
  }
  const double step0 = ctx.axes[0].size() > 1 ? ctx.axes[0][1] - ctx.axes[0][0] : 1.0;
  for (double scale : {1.0, 8.0, 64.0}) {
    for (int i = 0; i < d; ++i) {
      for (double sgn : {-1.0, 1.0}) {
        v = u;
        v[i] = std::clamp(u[i] + sgn * scale * step0, ctx.lo[i], ctx.hi[i]);
        feed(v);
      }
    }
  }
  return best;
}

// Exact max violation over the full lattice, abandoning the candidate once
// the running max exceeds `bound` (it can then neither win nor tie, since
// its true max is >= the running value). `completed` reports a full scan.
double max_violation(const BruteContext& ctx, const Vec& u, double bound, bool* completed) {
  const CandidateScorer scorer(ctx, u);
  const int d = static_cast<int>(u.size());
  double best = priority_bound(ctx, scorer, u);
  *completed = false;
  if (best > bound) return best;

  Vec v(d);
  std::array<int, 3> idx{0, 0, 0};
  const int last = d - 1;
  while (true) {
    for (int i = 0; i < d; ++i) v[i] = ctx.axes[i][idx[i]];
    if (!ctx.filter || ctx.inst->K->contains(*ctx.inst->space, v, 1e-9)) {
      best = std::max(best, scorer.violation(v));
      if (best > bound) return best;
    }
    int axis = last;
    while (axis >= 0) {
      if (++idx[axis] < static_cast<int>(ctx.axes[axis].size())) break;
      idx[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  *completed = true;
  return best;
}

}  // namespace

BruteForceResult brute_force_static(const StaticInstance& inst, double grid_step,
                                    std::optional<std::pair<Vec, Vec>> bounding_box) {
  const int d = inst.space->dim();
  if (d > 3) throw ConfigError("brute force supports dim <= 3 only");
  if (!(grid_step > 0.0)) throw ConfigError("grid step must be positive", "grid_step");

  BruteContext ctx;
  ctx.inst = &inst;
  ctx.filter = false;
  if (inst.K->kind() == ConstraintSet::Kind::box && inst.K->lower().allFinite() &&
      inst.K->upper().allFinite()) {
    ctx.lo = inst.K->lower();
    ctx.hi = inst.K->upper();
  } else if (bounding_box) {
    ctx.lo = bounding_box->first;
    ctx.hi = bounding_box->second;
    ctx.filter = !inst.K->is_whole_space();
  } else {
    throw ConfigError("brute force requires a bounded box constraint or an explicit bounding box",
                      "K");
  }

  ctx.axes.resize(d);
  long total = 1;
  for (int i = 0; i < d; ++i) {
    const double span = ctx.hi[i] - ctx.lo[i];
    if (span < 0.0) throw ConfigError("empty bounding box", "K");
    const long count = static_cast<long>(std::floor(span / grid_step + 1e-9)) + 1;
    auto& axis = ctx.axes[i];
    axis.reserve(count + 1);
    for (long k = 0; k < count; ++k) axis.push_back(std::min(ctx.lo[i] + k * grid_step, ctx.hi[i]));
    if (ctx.hi[i] - axis.back() > 1e-9 * grid_step) axis.push_back(ctx.hi[i]);
    total *= static_cast<long>(axis.size());
    if (total > 4'000'000L) throw ConfigError("brute force lattice too large", "grid_step");
  }

  std::array<long, 3> stride{0, 0, 0};
  stride[d - 1] = 1;
  for (int i = d - 2; i >= 0; --i) {
    stride[i] = stride[i + 1] * static_cast<long>(ctx.axes[i + 1].size());
  }
  auto decode = [&](long flat, Vec& u) {
    long rem = flat;
    for (int i = 0; i < d; ++i) {
      u[i] = ctx.axes[i][rem / stride[i]];
      rem %= stride[i];
    }
  };

  // Phase 1: a valid lower bound of each candidate's max violation from the
  // cheap probe set. NaN marks infeasible candidates.
  std::vector<double> lower(total);
  auto bound_range = [&](long begin, long end) {
    Vec u(d);
    for (long flat = begin; flat < end; ++flat) {
      decode(flat, u);
      if (ctx.filter && !inst.K->contains(*inst.space, u, 1e-9)) {
        lower[flat] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const CandidateScorer scorer(ctx, u);
      lower[flat] = priority_bound(ctx, scorer, u);
    }
  };
  const int threads = static_cast<int>(
      std::min<long>(env_thread_count(), std::max(1L, total / 4096)));
  if (threads <= 1) {
    bound_range(0, total);
  } else {
    std::vector<std::thread> pool;
    const long chunk = (total + threads - 1) / threads;
    for (int tix = 0; tix < threads; ++tix) {
      pool.emplace_back(bound_range, tix * chunk, std::min(total, (tix + 1) * chunk));
    }
    for (auto& th : pool) th.join();
  }

  // Phase 2: visit candidates by ascending lower bound (ties by lattice
  // order) and certify with exact early-exit scans. Once the next lower
  // bound strictly exceeds the incumbent's exact max, no remaining
  // candidate can win or tie and the scan stops. The result is the exact
  // lattice minimax with lexicographic tie-breaking.
  std::vector<long> order;
  order.reserve(total);
  for (long flat = 0; flat < total; ++flat) {
    if (!std::isnan(lower[flat])) order.push_back(flat);
  }
  if (order.empty()) throw ConfigError("no feasible lattice point found", "K");
  std::sort(order.begin(), order.end(), [&](long a, long b) {
    return lower[a] != lower[b] ? lower[a] < lower[b] : a < b;
  });

  double best_viol = kInf;
  long best_flat = -1;
  Vec u(d);
  for (long flat : order) {
    if (lower[flat] > best_viol) break;
    decode(flat, u);
    bool completed = false;
    const double viol = max_violation(ctx, u, best_viol, &completed);
    if (!completed) continue;
    if (viol < best_viol || (viol == best_viol && flat < best_flat)) {
      best_viol = viol;
      best_flat = flat;
    }
  }

  BruteForceResult out;
  out.u.resize(d);
  decode(best_flat, out.u);
  out.violation = best_viol;
  out.lattice_points = total;
  return out;
}

ResidualReport residual_static(const StaticInstance& inst, const Vec& u,
                               const std::vector<Vec>& probes) {
  const InnerProductSpace& sp = *inst.space;
  const int d = sp.dim();
  std::vector<Vec> list;
  if (!probes.empty()) {
    for (int i = 0; i < static_cast<int>(probes.size()); ++i) {
      if (!inst.K->contains(sp, probes[i], 1e-10)) {
        throw ConfigError("probe " + std::to_string(i) + " lies outside K", "probes");
      }
    }
    list = probes;
  } else {
    const double scale = 1.0 + sp.norm(u);
    Vec lo(d), hi(d);
    const bool boxed = inst.K->kind() == ConstraintSet::Kind::box;
    for (int i = 0; i < d; ++i) {
      const double l = boxed ? inst.K->lower()[i] : -kInf;
      const double h = boxed ? inst.K->upper()[i] : kInf;
      lo[i] = std::isfinite(l) ? l : u[i] - 2.0 * scale;
      hi[i] = std::isfinite(h) ? h : u[i] + 2.0 * scale;
    }
    static const int primes[] = {2, 3, 5};
    list.reserve(1000 + 2 * inst.K->rows().rows() + 2);
    for (long k = 1; k <= 1000; ++k) {
      Vec v(d);
      for (int i = 0; i < d; ++i) {
        v[i] = lo[i] + halton(k, primes[i % 3]) * (hi[i] - lo[i]);
      }
      list.push_back(project(*inst.K, v, sp));
    }
    // Probes along active-constraint normals.
    for (int r = 0; r < inst.K->rows().rows(); ++r) {
      Vec dir = sp.riesz(inst.K->rows().row(r).transpose());
      const double n = sp.norm(dir);
      if (n <= 1e-14) continue;
      dir /= n;
      list.push_back(project(*inst.K, u + 0.7 * scale * dir, sp));
      list.push_back(project(*inst.K, u - 0.7 * scale * dir, sp));
    }
    list.push_back(inst.K->feasible_point());
    list.push_back(u);
  }

  ResidualReport rep;
  rep.probe_count = static_cast<int>(list.size());
  rep.worst = kInf;
  const Vec au = inst.A->eval(inst.t, u);
  const Vec mu = inst.M->apply(u);
  const double phi_uu = inst.phi->eval(inst.z, u, u);
  for (int i = 0; i < static_cast<int>(list.size()); ++i) {
    const Vec dv = list[i] - u;
    const double lhs = au.dot(dv) + inst.phi->eval(inst.z, u, list[i]) - phi_uu +
                       clarke_dd(*inst.J, inst.t, mu, inst.M->apply(dv)) - inst.f.dot(dv);
    if (lhs < rep.worst) {
      rep.worst = lhs;
      rep.argmin = i;
    }
  }
  return rep;
}

}  // namespace vhi
