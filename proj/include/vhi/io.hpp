#pragma once

#include <string>
#include <vector>

#include "vhi/contact.hpp"
#include "vhi/history.hpp"

namespace vhi {

/// 17-significant-digit decimal form; round-trips through parsing exactly.
std::string format_number(double v);

/// trajectory.csv: header `t,w0,...`, one row per grid node, coefficient
/// values of the unknown.
void export_trajectory_csv(const Trajectory& w, const std::string& path);

/// gamma3_trace.csv with columns
///   t,node_id,w_nu,g,sigma_nu,p_term,memory_term,complementarity,sigma_tau_norm
/// one row per contact node per time node; header-only when rows is empty.
void export_contact_trace_csv(const std::vector<std::vector<ContactResidualRow>>& rows,
                              const std::string& path);

/// Legacy ASCII VTK series `step_{n:05}.vtk` in dir: unstructured triangle
/// grid, point vectors u (displacement) and w (velocity), cell tensors sigma.
/// Writes solution.w.values.size() files.
void export_fields(const ContactSolution& solution, const ContactAssembly& assembly,
                   const std::string& dir);

}  // namespace vhi
