#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "darwinism/model.hpp"

namespace darwinism::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidationFailed = 1,
  kInputError = 2,
  kDeficitUnreachable = 3,
};

inline constexpr std::uint64_t kDefaultSeed = 20170601;

struct RunConfig {
  EnvironmentSpec spec{2, 4, 0.0, 1.0, 0.5};
  double delta = 0.1;
  std::int64_t fmin = 0;
  std::optional<std::int64_t> fmax;
  std::string method = "exact";
  std::int64_t samples = 10000;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
  std::optional<std::string> format;

  // sweep axes (empty: use the scalar value)
  std::vector<std::string> n_bad_grid;
  std::vector<std::string> gamma2_good_grid;
  std::vector<std::string> delta_grid;

  // validate self-test
  std::optional<std::string> corrupt_check;
};

/// Runs the darwinism command line. `args` excludes the program name.
/// Normal output goes to `out` (or the --out file), diagnostics and
/// machine-readable error objects to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace darwinism::cli
