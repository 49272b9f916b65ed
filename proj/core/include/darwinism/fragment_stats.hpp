#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "darwinism/entropy.hpp"
#include "darwinism/model.hpp"

namespace darwinism {

/// Raised when no fragment (or no number of good spins) reaches
/// (1 - delta) H_S.
class DeficitUnreachable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CurveMethod { kExact, kMonteCarlo, kQcbAsymptotic, kOracle };

std::string_view to_string(CurveMethod method);

struct InfoPoint {
  std::int64_t fragment_size = 0;
  Bits avg_info = 0.0;
  CurveMethod method = CurveMethod::kExact;
  std::optional<double> stderr_estimate;
};

/// Averaged information against fragment size; sizes strictly increasing.
using InfoCurve = std::vector<InfoPoint>;

enum class ValidityFlag : unsigned {
  kQcbValid = 1u << 0,
  kMaxFormulaValid = 1u << 1,
  kDeficitUnreachable = 1u << 2,
};

class ValidityFlags {
 public:
  void set(ValidityFlag f) { bits_ |= static_cast<unsigned>(f); }
  void clear(ValidityFlag f) { bits_ &= ~static_cast<unsigned>(f); }
  bool test(ValidityFlag f) const { return (bits_ & static_cast<unsigned>(f)) != 0; }
  std::vector<std::string_view> names() const;

  friend bool operator==(const ValidityFlags&, const ValidityFlags&) = default;

 private:
  unsigned bits_ = 0;
};

/// Redundancy under the averaging and maximisation definitions plus the
/// Chernoff-bound estimates. Fields are filled by whichever operation
/// produced the report; full_redundancy_report (report.hpp) fills all.
struct RedundancyReport {
  std::optional<std::int64_t> f_delta;
  std::optional<double> f_delta_interpolated;
  std::optional<double> r_avg;
  std::optional<double> r_max;             // discrete disjoint-fragment count
  std::optional<double> r_max_continuous;  // asymptotic good-spin-only estimate
  std::optional<double> r_qcb;
  std::optional<double> r_qcb_expanded;
  ValidityFlags flags;
};

/// Probability that a random fragment of the given size holds only bad
/// spins, evaluated as a product of ratios in log space.
double p_all_bad(const EnvironmentSpec& spec, std::int64_t fragment_size);

/// Holevo quantity averaged uniformly over all fragments of the given size.
Bits avg_holevo_exact(const EnvironmentSpec& spec, std::int64_t fragment_size);

struct FragmentSizeResult {
  std::int64_t f_delta = 1;
  /// Linear interpolation of the crossing between f_delta - 1 and f_delta.
  double interpolated = 1.0;
};

/// Smallest fragment size whose averaged Holevo quantity reaches
/// (1 - delta) H_S. delta = 1 returns 1. Throws DeficitUnreachable when the
/// whole environment falls short.
FragmentSizeResult find_fragment_size(const EnvironmentSpec& spec, const DeficitSpec& deficit);

/// r_avg = n_total / f_delta; delta = 1 gives n_total.
RedundancyReport redundancy_avg(const EnvironmentSpec& spec, const DeficitSpec& deficit);

/// Smallest number of good spins k* whose joint record reaches
/// (1 - delta) H_S. Throws DeficitUnreachable if all good spins fall short.
std::int64_t min_good_spins(const EnvironmentSpec& spec, const DeficitSpec& deficit);

/// Discrete disjoint-fragment count floor(n_good / k*); bad spins never
/// limit it. delta = 1 gives n_total.
RedundancyReport redundancy_max(const EnvironmentSpec& spec, const DeficitSpec& deficit);

struct McEstimate {
  Bits estimate = 0.0;
  double stderr_estimate = 0.0;
};

/// Monte Carlo average Holevo quantity over uniformly drawn fragments.
/// Each sample draws the fragment spin by spin without replacement.
/// Deterministic for a given seed.
McEstimate mc_avg_holevo(const EnvironmentSpec& spec, std::int64_t fragment_size,
                         std::int64_t n_samples, std::uint64_t seed);

/// Large-bad-pool limit n_bad ln(1/delta) / n_good of the perfect-model
/// fragment size (not rounded).
double stirling_fragment_size(const EnvironmentSpec& spec, const DeficitSpec& deficit);

/// Exact curve for fragment sizes in [fmin, fmax].
InfoCurve exact_curve(const EnvironmentSpec& spec, std::int64_t fmin, std::int64_t fmax);

/// Monte Carlo curve; each fragment size gets split_seed(seed, size).
InfoCurve monte_carlo_curve(const EnvironmentSpec& spec, std::int64_t fmin, std::int64_t fmax,
                            std::int64_t n_samples, std::uint64_t seed);

}  // namespace darwinism
