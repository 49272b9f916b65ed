#include "darwinism/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace darwinism {

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::string out = "invalid environment spec: ";
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i > 0) out += "; ";
    out += violations[i];
  }
  return out;
}

// Remainder of the Stirling series for ln Gamma(x), x >= 16.
double stirling_tail(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
}

constexpr std::int64_t kDirectSumLimit = 32;
constexpr double kStirlingMin = 16.0;

}  // namespace

DeficitSpec::DeficitSpec(double delta) : delta_(delta) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("information deficit must lie in (0, 1]");
  }
}

SpecError::SpecError(std::vector<std::string> violations)
    : std::invalid_argument(join_violations(violations)), violations_(std::move(violations)) {}

EnvironmentSpec validate_spec(const EnvironmentSpec& spec) {
  std::vector<std::string> violations;
  if (spec.n_good < 0 || spec.n_bad < 0) {
    violations.emplace_back("negative spin count");
  } else if (spec.n_total() < 1) {
    violations.emplace_back("empty environment");
  }
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(spec.gamma2_good) || !in_unit(spec.gamma2_bad)) {
    violations.emplace_back("overlap out of range");
  }
  if (!in_unit(spec.p0)) {
    violations.emplace_back("probability out of range");
  }
  if (!violations.empty()) throw SpecError(std::move(violations));
  return spec;
}

double log_falling_factorial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) {
    throw std::invalid_argument("log_falling_factorial requires 0 <= k <= n");
  }
  if (k <= kDirectSumLimit) {
    double sum = 0.0;
    for (std::int64_t i = 0; i < k; ++i) sum += std::log(static_cast<double>(n - i));
    return sum;
  }
  // ln Gamma(a) - ln Gamma(b), a = n + 1, b = n - k + 1.
  const double a = static_cast<double>(n) + 1.0;
  const double b = static_cast<double>(n - k) + 1.0;
  if (b < kStirlingMin) return std::lgamma(a) - std::lgamma(b);
  const double m = static_cast<double>(k);
  return (b - 0.5) * std::log1p(m / b) + m * std::log(a) - m + stirling_tail(a) -
         stirling_tail(b);
}

double log_binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  k = std::min(k, n - k);
  return log_falling_factorial(n, k) - log_falling_factorial(k, k);
}

double hypergeometric_pmf(const EnvironmentSpec& spec, std::int64_t fragment_size,
                          std::int64_t f_bad) {
  if (fragment_size < 0 || fragment_size > spec.n_total()) {
    throw std::invalid_argument("fragment size exceeds environment");
  }
  const std::int64_t f_good = fragment_size - f_bad;
  if (f_bad < 0 || f_good < 0 || f_bad > spec.n_bad || f_good > spec.n_good) return 0.0;
  // C(F, F_B) * E_B!/(E_B-F_B)! * E_G!/(E_G-F_G)! * (E-F)!/E!
  const double log_p = log_binomial(fragment_size, f_bad) +
                       log_falling_factorial(spec.n_bad, f_bad) +
                       log_falling_factorial(spec.n_good, f_good) -
                       log_falling_factorial(spec.n_total(), fragment_size);
  return std::exp(log_p);
}

CompositionLaw composition_law(const EnvironmentSpec& spec, std::int64_t fragment_size,
                               double relative_cutoff) {
  if (fragment_size < 0 || fragment_size > spec.n_total()) {
    throw std::invalid_argument("fragment size exceeds environment");
  }
  const std::int64_t lo = std::max<std::int64_t>(0, fragment_size - spec.n_good);
  const std::int64_t hi = std::min(fragment_size, spec.n_bad);

  // Mode of the hypergeometric law, clamped to the support.
  const double raw_mode = std::floor((static_cast<double>(fragment_size) + 1.0) *
                                     (static_cast<double>(spec.n_bad) + 1.0) /
                                     (static_cast<double>(spec.n_total()) + 2.0));
  const std::int64_t mode = std::clamp(static_cast<std::int64_t>(raw_mode), lo, hi);
  const double p_mode = hypergeometric_pmf(spec, fragment_size, mode);
  const double floor_p = p_mode * relative_cutoff;

  const double F = static_cast<double>(fragment_size);
  const double EB = static_cast<double>(spec.n_bad);
  const double EG = static_cast<double>(spec.n_good);

  std::vector<double> below;
  double p = p_mode;
  std::int64_t k = mode;
  while (k > lo) {
    const double kk = static_cast<double>(k);
    p *= kk * (EG - F + kk) / ((EB - kk + 1.0) * (F - kk + 1.0));
    --k;
    if (p < floor_p) break;
    below.push_back(p);
  }
  std::vector<double> above;
  p = p_mode;
  k = mode;
  while (k < hi) {
    const double kk = static_cast<double>(k);
    p *= (EB - kk) * (F - kk) / ((kk + 1.0) * (EG - F + kk + 1.0));
    ++k;
    if (p < floor_p) break;
    above.push_back(p);
  }

  CompositionLaw law;
  law.fragment_size = fragment_size;
  law.first_bad = mode - static_cast<std::int64_t>(below.size());
  law.probabilities.reserve(below.size() + 1 + above.size());
  law.probabilities.insert(law.probabilities.end(), below.rbegin(), below.rend());
  law.probabilities.push_back(p_mode);
  law.probabilities.insert(law.probabilities.end(), above.begin(), above.end());

  const double total = std::accumulate(law.probabilities.begin(), law.probabilities.end(), 0.0);
  for (double& q : law.probabilities) q /= total;
  return law;
}

double fragment_overlap(const EnvironmentSpec& spec, const FragmentComposition& comp) {
  if (comp.f_good < 0 || comp.f_bad < 0 || comp.f_good > spec.n_good ||
      comp.f_bad > spec.n_bad) {
    throw std::invalid_argument("fragment composition does not fit the environment");
  }
  return std::pow(spec.gamma2_good, static_cast<double>(comp.f_good)) *
         std::pow(spec.gamma2_bad, static_cast<double>(comp.f_bad));
}

}  // namespace darwinism
