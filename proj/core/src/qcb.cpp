#include "darwinism/qcb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace darwinism {

ChernoffExponent typical_chernoff(const EnvironmentSpec& spec) {
  validate_spec(spec);
  const double n = static_cast<double>(spec.n_total());
  // 1 - <|gamma_k|^2>, kept separate so small deficits survive log1p.
  const double deficit = (static_cast<double>(spec.n_good) * (1.0 - spec.gamma2_good) +
                          static_cast<double>(spec.n_bad) * (1.0 - spec.gamma2_bad)) /
                         n;
  const double mean_overlap = (static_cast<double>(spec.n_good) * spec.gamma2_good +
                               static_cast<double>(spec.n_bad) * spec.gamma2_bad) /
                              n;
  if (mean_overlap <= 0.0) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  const double value = mean_overlap < 0.5 ? -std::log(mean_overlap) : -std::log1p(-deficit);
  return {std::max(0.0, value), false};
}

double error_probability(const ChernoffExponent& xi, std::int64_t fragment_size) {
  if (fragment_size < 0) throw std::invalid_argument("fragment size must be non-negative");
  if (fragment_size == 0) return 1.0;
  if (xi.divergent) return 0.0;
  return std::exp(-xi.value * static_cast<double>(fragment_size));
}

double clamped_error_probability(const ChernoffExponent& xi, std::int64_t fragment_size) {
  return std::clamp(error_probability(xi, fragment_size), 0.0, 0.5);
}

Bits holevo_asymptotic(const EnvironmentSpec& spec, std::int64_t fragment_size) {
  const ChernoffExponent xi = typical_chernoff(spec);
  const double h_s = binary_entropy(spec.p0);
  return std::max(0.0, h_s - binary_entropy(clamped_error_probability(xi, fragment_size)));
}

QcbRedundancy redundancy_qcb(const EnvironmentSpec& spec, const DeficitSpec& deficit) {
  if (deficit.is_trivial()) {
    throw std::invalid_argument("Chernoff redundancy is undefined at delta = 1");
  }
  const ChernoffExponent xi = typical_chernoff(spec);
  if (xi.divergent) return {std::numeric_limits<double>::infinity(), false};

  const double log_inv_delta = std::log(1.0 / deficit.delta());
  QcbRedundancy out;
  out.value = static_cast<double>(spec.n_total()) * xi.value / log_inv_delta;
  if (spec.is_perfect() && static_cast<double>(spec.n_good) < log_inv_delta) out.valid = false;
  if (out.value < 1.0) out.valid = false;
  return out;
}

double redundancy_goodbad_expanded(const EnvironmentSpec& spec, const DeficitSpec& deficit) {
  validate_spec(spec);
  if (spec.gamma2_bad != 1.0) {
    throw std::invalid_argument("expanded good/bad redundancy requires gamma2_bad = 1");
  }
  if (deficit.is_trivial()) {
    throw std::invalid_argument("expanded good/bad redundancy is undefined at delta = 1");
  }
  return static_cast<double>(spec.n_good) * (1.0 - spec.gamma2_good) /
         std::log(1.0 / deficit.delta());
}

double redundancy_max_qcb(const EnvironmentSpec& spec, const DeficitSpec& deficit) {
  validate_spec(spec);
  const double n_good = static_cast<double>(spec.n_good);
  const double g = spec.gamma2_good;
  if (g <= deficit.delta()) return n_good;
  if (g >= 1.0) return 0.0;
  return std::min(n_good, n_good * std::log(g) / std::log(deficit.delta()));
}

DefinitionRatio definition_ratio(double gamma2_good) {
  if (!(gamma2_good >= 0.0 && gamma2_good <= 1.0)) {
    throw DomainError("squared overlap must lie in [0, 1]");
  }
  if (gamma2_good == 0.0) return {0.0, true};
  if (gamma2_good == 1.0) return {1.0, true};
  // ln(1/g) = -log1p(g - 1) keeps precision as g -> 1.
  return {(1.0 - gamma2_good) / -std::log1p(gamma2_good - 1.0), false};
}

double redundancy_small_fragment(const EnvironmentSpec& spec, const DeficitSpec& deficit) {
  validate_spec(spec);
  if (deficit.is_trivial()) return static_cast<double>(spec.n_total());
  return static_cast<double>(spec.n_good) / (1.0 - deficit.delta());
}

}  // namespace darwinism
