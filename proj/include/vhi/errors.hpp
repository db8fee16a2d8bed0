#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace vhi {

/// Invalid or inconsistent user-supplied data (configs, malformed operators,
/// non-SPD Gram matrices, schema violations). Carries the offending field
/// name when one is known.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::string message, std::string field = {})
      : std::runtime_error(std::move(message)), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

private:
  std::string field_;
};

/// An iterative routine exhausted its iteration budget. Carries the last
/// iterates so callers can inspect the stall.
class NonconvergenceError : public std::runtime_error {
public:
  NonconvergenceError(std::string message, std::vector<Eigen::VectorXd> iterates = {})
      : std::runtime_error(std::move(message)), iterates_(std::move(iterates)) {}
  const std::vector<Eigen::VectorXd>& iterates() const { return iterates_; }

private:
  std::vector<Eigen::VectorXd> iterates_;
};

}  // namespace vhi
