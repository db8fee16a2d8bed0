#include "vhi/history.hpp"

#include "vhi/errors.hpp"

namespace vhi {

HistoryOperator HistoryOperator::zero() { return HistoryOperator(); }

HistoryOperator HistoryOperator::volterra(KernelFn kernel, double lipschitz, Quadrature q) {
  if (!kernel) throw ConfigError("volterra operator requires a kernel", "S");
  HistoryOperator s;
  s.kind_ = Kind::volterra;
  s.kernel_ = std::move(kernel);
  s.lipschitz_ = lipschitz;
  s.quad_ = q;
  return s;
}

HistoryOperator HistoryOperator::custom(CustomFn fn, double lipschitz, Quadrature q) {
  if (!fn) throw ConfigError("custom history operator requires a function", "S");
  HistoryOperator s;
  s.kind_ = Kind::custom;
  s.custom_ = std::move(fn);
  s.lipschitz_ = lipschitz;
  s.quad_ = q;
  return s;
}

HistoryOperator HistoryOperator::sum(std::vector<HistoryOperator> parts) {
  HistoryOperator s;
  s.kind_ = Kind::sum;
  for (const auto& p : parts) s.lipschitz_ += p.lipschitz();
  s.parts_ = std::move(parts);
  return s;
}

void HistoryOperator::set_quadrature(Quadrature q) {
  quad_ = q;
  for (auto& p : parts_) p.set_quadrature(q);
}

Vec HistoryOperator::apply(const TimeGrid& grid, std::span<const Vec> prefix, int n,
                           int dual_dim) const {
  if (n < 0 || n > grid.steps) throw ConfigError("history node index out of range");
  const int needed = quad_ == Quadrature::trapezoid ? n + 1 : n;
  if (static_cast<int>(prefix.size()) < needed) {
    throw ConfigError("history operator received too short a trajectory prefix");
  }
  switch (kind_) {
    case Kind::zero:
      return Vec::Zero(dual_dim);
    case Kind::volterra: {
      Vec acc = Vec::Zero(dual_dim);
      if (n == 0) return acc;
      const double dt = grid.dt();
      const double tn = grid.node(n);
      if (quad_ == Quadrature::left_rectangle) {
        for (int m = 0; m < n; ++m) acc += dt * kernel_(tn, grid.node(m), prefix[m]);
      } else {
        acc += 0.5 * dt * kernel_(tn, grid.node(0), prefix[0]);
        for (int m = 1; m < n; ++m) acc += dt * kernel_(tn, grid.node(m), prefix[m]);
        acc += 0.5 * dt * kernel_(tn, grid.node(n), prefix[n]);
      }
      return acc;
    }
    case Kind::sum: {
      Vec acc = Vec::Zero(dual_dim);
      for (const auto& p : parts_) acc += p.apply(grid, prefix, n, dual_dim);
      return acc;
    }
    case Kind::custom:
      return custom_(grid, prefix.subspan(0, needed), n, quad_);
  }
  throw ConfigError("unknown history operator kind");
}

Vec volterra_apply(const HistoryOperator& s, const Trajectory& u, int n) {
  if (n < 0 || n >= static_cast<int>(u.values.size())) {
    throw ConfigError("trajectory node index out of range");
  }
  const int dim = static_cast<int>(u.values[0].size());
  const int needed = s.quadrature() == Quadrature::trapezoid ? n + 1 : n;
  return s.apply(u.grid, std::span<const Vec>(u.values.data(), needed), n, dim);
}

HistoryOperator history_sum(HistoryOperator a, HistoryOperator b) {
  std::vector<HistoryOperator> parts;
  parts.push_back(std::move(a));
  parts.push_back(std::move(b));
  return HistoryOperator::sum(std::move(parts));
}

}  // namespace vhi
