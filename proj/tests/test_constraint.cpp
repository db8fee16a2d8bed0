#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "vhi/constraint.hpp"
#include "vhi/errors.hpp"

using vhi::ConstraintSet;
using vhi::InnerProductSpace;
using vhi::Mat;
using vhi::Vec;

namespace {
Vec v1(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}
}  // namespace

TEST_CASE("box clipping in 1D") {
  const auto sp = InnerProductSpace::euclidean(1);
  const auto k = ConstraintSet::box(v1(0.0), v1(1.0));
  CHECK(project(k, v1(1.5), sp)[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(project(k, v1(-0.3), sp)[0] == doctest::Approx(0.0).epsilon(1e-14));
  // interior points are fixed
  CHECK(project(k, v1(0.4), sp)[0] == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("projection onto a halfspace with non-identity gram matches the KKT closed form") {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 3 + trial % 3;
    const Mat g = oracles::random_spd(n, rng, 30.0);
    const InnerProductSpace sp(g);
    Vec c = oracles::random_vec(n, rng);
    const double off = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
    // feasible anchor: scale c so the origin-side halfspace is usable
    Vec feas = Vec::Zero(n);
    if (c.dot(feas) > off) feas = (off - 1.0) / c.squaredNorm() * c;
    Mat rows(1, n);
    rows.row(0) = c.transpose();
    Vec offs(1);
    offs[0] = off;
    const auto k = ConstraintSet::halfspaces(rows, offs, feas);
    const Vec v = oracles::random_vec(n, rng, 2.0);
    const Vec got = project(k, v, sp);
    const Vec want = oracles::project_halfspace_kkt(g, v, c, off);
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("projection onto a box with coupled gram matches dense QP enumeration") {
  std::mt19937 rng(33);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = 3;
    const Mat g = oracles::random_spd(n, rng, 15.0);
    const InnerProductSpace sp(g);
    const Vec lo = Vec::Constant(n, -0.5);
    const Vec hi = Vec::Constant(n, 0.5);
    const auto k = ConstraintSet::box(lo, hi);
    const Vec v = oracles::random_vec(n, rng, 1.5);
    const Vec got = project(k, v, sp);
    // projection = argmin over the box of 1/2 u^T G u - (G v)^T u
    const Vec want = oracles::box_qp_enumerate(g, -(g * v), lo, hi);
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("projection is idempotent and variationally characterized") {
  std::mt19937 rng(45);
  const int n = 4;
  const Mat g = oracles::random_spd(n, rng, 10.0);
  const InnerProductSpace sp(g);
  Mat rows(2, n);
  rows << 1, 1, 0, 0, 0, -1, 2, 0;
  Vec offs(2);
  offs << 0.5, 0.25;
  const auto k = ConstraintSet::halfspaces(rows, offs, Vec::Zero(n));
  for (int trial = 0; trial < 20; ++trial) {
    const Vec v = oracles::random_vec(n, rng, 2.0);
    const Vec p = project(k, v, sp);
    CHECK(k.violation(sp, p) <= 1e-10);
    CHECK(sp.dist(project(k, p, sp), p) <= 1e-10);
    // <v - Pv, w - Pv>_V <= tol for sampled w in K
    for (int j = 0; j < 40; ++j) {
      const Vec w = project(k, oracles::random_vec(n, rng, 2.0), sp);
      CHECK(sp.inner(v - p, w - p) <= 1e-8);
    }
  }
}

TEST_CASE("projection is nonexpansive") {
  std::mt19937 rng(57);
  const int n = 3;
  const Mat g = oracles::random_spd(n, rng, 25.0);
  const InnerProductSpace sp(g);
  const auto k = ConstraintSet::box(Vec::Constant(n, -1.0), Vec::Constant(n, 0.7));
  for (int trial = 0; trial < 100; ++trial) {
    const Vec a = oracles::random_vec(n, rng, 2.0);
    const Vec b = oracles::random_vec(n, rng, 2.0);
    CHECK(sp.dist(project(k, a, sp), project(k, b, sp)) <= sp.dist(a, b) + 1e-10);
  }
}

TEST_CASE("custom projection oracle is accepted and stabilized") {
  const auto sp = InnerProductSpace::euclidean(2);
  // projection onto the closed unit disc
  auto disc = [](const InnerProductSpace&, const Vec& v) -> Vec {
    const double r = v.norm();
    return r <= 1.0 ? v : Vec(v / r);
  };
  const auto k = ConstraintSet::custom(2, disc, Vec::Zero(2));
  Vec far(2);
  far << 3.0, 4.0;
  const Vec p = project(k, far, sp);
  CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(k.violation(sp, far) > 1.0);
  CHECK(k.violation(sp, p) <= 1e-10);
}

TEST_CASE("constraint construction errors") {
  // infeasible designated point
  Mat rows(1, 2);
  rows << 1, 0;
  Vec offs(1);
  offs[0] = -1.0;
  CHECK_THROWS_AS(ConstraintSet::halfspaces(rows, offs, Vec::Zero(2)), vhi::ConfigError);
  // inverted box bounds
  CHECK_THROWS_AS(ConstraintSet::box(v1(1.0), v1(0.0)), vhi::ConfigError);
}
