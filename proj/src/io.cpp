#include "vhi/io.hpp"

#include <cstdio>
#include <fstream>

#include "vhi/errors.hpp"

namespace vhi {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path, path);
  return out;
}

/// Displacement and velocity at a mesh node; clamped components sit at their
/// Dirichlet value (the initial displacement for u, zero for w).
Vec2 node_field(const ContactAssembly& assembly, const Vec& dofs, int node, bool displacement) {
  Vec2 v = Vec2::Zero();
  for (int c = 0; c < 2; ++c) {
    const int d = assembly.dof(node, c);
    if (d >= 0)
      v(c) = dofs(d);
    else if (displacement && !assembly.contact().u0.empty())
      v(c) = assembly.contact().u0[static_cast<size_t>(node)](c);
  }
  return v;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void export_trajectory_csv(const Trajectory& w, const std::string& path) {
  std::ofstream out = open_out(path);
  const int dim = w.values.empty() ? 0 : static_cast<int>(w.values.front().size());
  out << "t";
  for (int i = 0; i < dim; ++i) out << ",w" << i;
  out << "\n";
  for (size_t n = 0; n < w.values.size(); ++n) {
    out << format_number(w.grid.node(static_cast<int>(n)));
    for (int i = 0; i < dim; ++i) out << ',' << format_number(w.values[n](i));
    out << "\n";
  }
}

void export_contact_trace_csv(const std::vector<std::vector<ContactResidualRow>>& rows,
                              const std::string& path) {
  std::ofstream out = open_out(path);
  out << "t,node_id,w_nu,g,sigma_nu,p_term,memory_term,complementarity,sigma_tau_norm\n";
  for (const auto& at_node : rows)
    for (const ContactResidualRow& r : at_node)
      out << format_number(r.t) << ',' << r.node << ',' << format_number(r.w_nu) << ','
          << format_number(r.gap) << ',' << format_number(r.sigma_nu) << ','
          << format_number(r.p_term) << ',' << format_number(r.memory_term) << ','
          << format_number(r.complementarity) << ',' << format_number(r.sigma_tau_norm) << "\n";
}

void export_fields(const ContactSolution& solution, const ContactAssembly& assembly,
                   const std::string& dir) {
  const Mesh& mesh = assembly.mesh();
  const int points = mesh.node_count();
  const int cells = static_cast<int>(mesh.triangles.size());
  for (size_t n = 0; n < solution.w.values.size(); ++n) {
    char name[32];
    std::snprintf(name, sizeof name, "step_%05zu.vtk", n);
    std::ofstream out = open_out(dir + "/" + name);
    out << "# vtk DataFile Version 3.0\n";
    out << "fields at t = " << format_number(solution.w.grid.node(static_cast<int>(n))) << "\n";
    out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << points << " double\n";
    for (const Vec2& p : mesh.coords)
      out << format_number(p.x()) << ' ' << format_number(p.y()) << " 0\n";
    out << "CELLS " << cells << ' ' << 4 * cells << "\n";
    for (const auto& tri : mesh.triangles)
      out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << "\n";
    out << "CELL_TYPES " << cells << "\n";
    for (int e = 0; e < cells; ++e) out << "5\n";

    out << "POINT_DATA " << points << "\n";
    out << "VECTORS u double\n";
    for (int node = 0; node < points; ++node) {
      const Vec2 u = node_field(assembly, solution.u.values[n], node, /*displacement=*/true);
      out << format_number(u.x()) << ' ' << format_number(u.y()) << " 0\n";
    }
    out << "VECTORS w double\n";
    for (int node = 0; node < points; ++node) {
      const Vec2 w = node_field(assembly, solution.w.values[n], node, /*displacement=*/false);
      out << format_number(w.x()) << ' ' << format_number(w.y()) << " 0\n";
    }

    out << "CELL_DATA " << cells << "\n";
    out << "TENSORS sigma double\n";
    for (int e = 0; e < cells; ++e) {
      const Vec3& s = solution.sigma[n][static_cast<size_t>(e)];
      // Voigt (s11, s22, s12) embedded as the plane block of a 3x3 tensor.
      out << format_number(s(0)) << ' ' << format_number(s(2)) << " 0\n";
      out << format_number(s(2)) << ' ' << format_number(s(1)) << " 0\n";
      out << "0 0 0\n";
    }
  }
}

}  // namespace vhi
