#pragma once

#include <optional>
#include <string>
#include <vector>

#include "darwinism/model.hpp"
#include "darwinism/oracle.hpp"

namespace darwinism {

struct CheckResult {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  /// Name of the first failing check, if any.
  std::optional<std::string> first_failure() const;
};

struct ValidationOptions {
  oracle::OracleLimits limits;
  /// Forces the named check to fail (harness self-test).
  std::optional<std::string> corrupt_check;
};

/// Names of every check run_validation performs, in execution order.
const std::vector<std::string>& validation_check_names();

/// Cross-checks the closed forms against the dense-state oracle and the
/// structural invariants on one small instance. Throws
/// oracle::OracleCapExceeded when the environment exceeds the oracle cap.
ValidationReport run_validation(const EnvironmentSpec& spec, const ValidationOptions& options = {});

}  // namespace darwinism
