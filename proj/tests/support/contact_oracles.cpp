#include "support/contact_oracles.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>

namespace oracles {

using vhi::Mesh;
using vhi::Vec;
using vhi::Vec2;
using Mat = Eigen::MatrixXd;
using Mat2 = Eigen::Matrix2d;

std::vector<Vec> viscoelastic_dense(const Mesh& mesh, double theta, double zeta, double lambda,
                                    double mu, const Vec2& f0, const Vec2& f2,
                                    const std::vector<Vec2>& u0, double horizon, int steps) {
  const int nodes = mesh.node_count();
  std::vector<bool> clamped(static_cast<size_t>(2 * nodes), false);
  for (const auto& e : mesh.edges) {
    if (e.tag != 1) continue;
    clamped[2 * e.a] = clamped[2 * e.a + 1] = true;
    clamped[2 * e.b] = clamped[2 * e.b + 1] = true;
  }
  std::vector<int> dof(static_cast<size_t>(2 * nodes), -1);
  int n_dofs = 0;
  for (int k = 0; k < 2 * nodes; ++k)
    if (!clamped[k]) dof[k] = n_dofs++;

  Mat a = Mat::Zero(n_dofs, n_dofs);
  Mat b = Mat::Zero(n_dofs, n_dofs);
  Vec f = Vec::Zero(n_dofs);

  for (const auto& tri : mesh.triangles) {
    // Shape function k is the plane taking value 1 at corner k: solve the
    // Vandermonde system for its coefficients and read off the gradient.
    Eigen::Matrix3d vand;
    for (int i = 0; i < 3; ++i)
      vand.row(i) << 1.0, mesh.coords[tri[i]].x(), mesh.coords[tri[i]].y();
    const Eigen::Matrix3d coef = vand.inverse();
    const Vec2 pa = mesh.coords[tri[0]], pb = mesh.coords[tri[1]], pc = mesh.coords[tri[2]];
    const double area =
        0.5 * std::abs((pb.x() - pa.x()) * (pc.y() - pa.y()) -
                       (pc.x() - pa.x()) * (pb.y() - pa.y()));

    std::array<Mat2, 6> strain;
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector2d grad(coef(1, k), coef(2, k));
      for (int c = 0; c < 2; ++c) {
        Mat2 du = Mat2::Zero();
        du.row(c) = grad.transpose();
        strain[static_cast<size_t>(2 * k + c)] = 0.5 * (du + du.transpose());
      }
    }

    std::array<int, 6> gd;
    for (int k = 0; k < 3; ++k)
      for (int c = 0; c < 2; ++c) gd[static_cast<size_t>(2 * k + c)] = dof[2 * tri[k] + c];

    for (int r = 0; r < 6; ++r) {
      if (gd[static_cast<size_t>(r)] < 0) continue;
      for (int s = 0; s < 6; ++s) {
        if (gd[static_cast<size_t>(s)] < 0) continue;
        const Mat2& er = strain[static_cast<size_t>(r)];
        const Mat2& es = strain[static_cast<size_t>(s)];
        const double dots = (er.array() * es.array()).sum();
        const double traces = er.trace() * es.trace();
        a(gd[static_cast<size_t>(r)], gd[static_cast<size_t>(s)]) +=
            area * (2.0 * theta * dots + zeta * traces);
        b(gd[static_cast<size_t>(r)], gd[static_cast<size_t>(s)]) +=
            area * (2.0 * mu * dots + lambda * traces);
      }
    }
    for (int k = 0; k < 3; ++k)
      for (int c = 0; c < 2; ++c)
        if (gd[static_cast<size_t>(2 * k + c)] >= 0)
          f(gd[static_cast<size_t>(2 * k + c)]) += area / 3.0 * f0(c);
  }

  for (const auto& e : mesh.edges) {
    if (e.tag != 2) continue;
    const double len = (mesh.coords[e.b] - mesh.coords[e.a]).norm();
    for (int v : {e.a, e.b})
      for (int c = 0; c < 2; ++c)
        if (dof[2 * v + c] >= 0) f(dof[2 * v + c]) += 0.5 * len * f2(c);
  }

  Vec u = Vec::Zero(n_dofs);
  if (!u0.empty())
    for (int v = 0; v < nodes; ++v)
      for (int c = 0; c < 2; ++c)
        if (dof[2 * v + c] >= 0) u(dof[2 * v + c]) = u0[static_cast<size_t>(v)](c);

  const Eigen::PartialPivLU<Mat> lu(a);
  const double dt = horizon / steps;
  std::vector<Vec> w;
  w.reserve(static_cast<size_t>(steps) + 1);
  for (int n = 0; n <= steps; ++n) {
    w.push_back(lu.solve(f - b * u));
    u += dt * w.back();
  }
  return w;
}

}  // namespace oracles
