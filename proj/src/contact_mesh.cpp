#include "vhi/contact.hpp"

#include "vhi/errors.hpp"

namespace vhi {

namespace {

// Grid node (i, j) with 0 <= i <= nx, 0 <= j <= ny.
int grid_node(int i, int j, int nx) { return j * (nx + 1) + i; }

}  // namespace

Mesh build_mesh(double width, double height, int nx, int ny, bool contact_bottom) {
  if (!(width > 0.0) || !(height > 0.0))
    throw ConfigError("mesh dimensions must be positive", "mesh");
  if (nx < 1 || ny < 1) throw ConfigError("mesh needs at least one cell per direction", "mesh");

  Mesh m;
  m.width = width;
  m.height = height;
  m.nx = nx;
  m.ny = ny;

  const double hx = width / nx;
  const double hy = height / ny;

  m.coords.reserve(static_cast<size_t>((nx + 1) * (ny + 1) + nx * ny));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) m.coords.push_back(Vec2(i * hx, j * hy));
  // Cell centers follow the grid nodes.
  const int center0 = (nx + 1) * (ny + 1);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) m.coords.push_back(Vec2((i + 0.5) * hx, (j + 0.5) * hy));

  m.triangles.reserve(static_cast<size_t>(4 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = grid_node(i, j, nx);
      const int b = grid_node(i + 1, j, nx);
      const int c = grid_node(i + 1, j + 1, nx);
      const int d = grid_node(i, j + 1, nx);
      const int mid = center0 + j * nx + i;
      m.triangles.push_back({a, b, mid});
      m.triangles.push_back({b, c, mid});
      m.triangles.push_back({c, d, mid});
      m.triangles.push_back({d, a, mid});
    }
  }

  const int bottom_tag = contact_bottom ? 3 : 2;
  for (int i = 0; i < nx; ++i)
    m.edges.push_back({grid_node(i, 0, nx), grid_node(i + 1, 0, nx), bottom_tag, Vec2(0, -1)});
  for (int j = 0; j < ny; ++j)
    m.edges.push_back({grid_node(nx, j, nx), grid_node(nx, j + 1, nx), 2, Vec2(1, 0)});
  for (int i = 0; i < nx; ++i)
    m.edges.push_back({grid_node(i + 1, ny, nx), grid_node(i, ny, nx), 2, Vec2(0, 1)});
  for (int j = 0; j < ny; ++j)
    m.edges.push_back({grid_node(0, j + 1, nx), grid_node(0, j, nx), 1, Vec2(-1, 0)});

  return m;
}

Eigen::Matrix<double, 6, 6> element_stiffness(const std::array<Vec2, 3>& corners,
                                              const Mat3& d) {
  const Vec2& p1 = corners[0];
  const Vec2& p2 = corners[1];
  const Vec2& p3 = corners[2];
  const double det = (p2.x() - p1.x()) * (p3.y() - p1.y()) - (p3.x() - p1.x()) * (p2.y() - p1.y());
  if (!(det > 0.0)) throw ConfigError("element corners must be counterclockwise", "mesh");
  const double area = 0.5 * det;

  // Barycentric gradients; strains of P1 fields are constant per element.
  Eigen::Matrix<double, 3, 2> grad;
  grad.row(0) = Eigen::RowVector2d(p2.y() - p3.y(), p3.x() - p2.x()) / det;
  grad.row(1) = Eigen::RowVector2d(p3.y() - p1.y(), p1.x() - p3.x()) / det;
  grad.row(2) = Eigen::RowVector2d(p1.y() - p2.y(), p2.x() - p1.x()) / det;

  Eigen::Matrix<double, 3, 6> b = Eigen::Matrix<double, 3, 6>::Zero();
  for (int k = 0; k < 3; ++k) {
    b(0, 2 * k) = grad(k, 0);
    b(1, 2 * k + 1) = grad(k, 1);
    b(2, 2 * k) = 0.5 * grad(k, 1);
    b(2, 2 * k + 1) = 0.5 * grad(k, 0);
  }
  return area * b.transpose() * d * b;
}

}  // namespace vhi
