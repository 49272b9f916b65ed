#include "darwinism/fragment_stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "darwinism/parallel.hpp"

namespace darwinism {

namespace {

// A fragment qualifies when its averaged information is within this many
// bits below the target; absorbs rounding at exact ties.
constexpr double kThresholdSlack = 1e-12;

double target_bits(const EnvironmentSpec& spec, const DeficitSpec& deficit) {
  return (1.0 - deficit.delta()) * binary_entropy(spec.p0);
}

void check_fragment_size(const EnvironmentSpec& spec, std::int64_t fragment_size) {
  if (fragment_size < 0 || fragment_size > spec.n_total()) {
    throw std::invalid_argument("fragment size must lie in [0, n_total]");
  }
}

void check_range(const EnvironmentSpec& spec, std::int64_t fmin, std::int64_t fmax) {
  if (fmin < 0 || fmax < fmin || fmax > spec.n_total()) {
    throw std::invalid_argument("fragment-size range must satisfy 0 <= fmin <= fmax <= n_total");
  }
}

// Uniform integer in [0, bound) by rejection; bit-identical on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

}  // namespace

std::string_view to_string(CurveMethod method) {
  switch (method) {
    case CurveMethod::kExact: return "exact";
    case CurveMethod::kMonteCarlo: return "monte-carlo";
    case CurveMethod::kQcbAsymptotic: return "qcb-asymptotic";
    case CurveMethod::kOracle: return "oracle";
  }
  return "unknown";
}

std::vector<std::string_view> ValidityFlags::names() const {
  std::vector<std::string_view> out;
  if (test(ValidityFlag::kQcbValid)) out.emplace_back("qcb_valid");
  if (test(ValidityFlag::kMaxFormulaValid)) out.emplace_back("max_formula_valid");
  if (test(ValidityFlag::kDeficitUnreachable)) out.emplace_back("deficit_unreachable");
  return out;
}

double p_all_bad(const EnvironmentSpec& spec, std::int64_t fragment_size) {
  validate_spec(spec);
  check_fragment_size(spec, fragment_size);
  if (fragment_size > spec.n_bad) return 0.0;
  return std::exp(log_falling_factorial(spec.n_bad, fragment_size) -
                  log_falling_factorial(spec.n_total(), fragment_size));
}

Bits avg_holevo_exact(const EnvironmentSpec& spec, std::int64_t fragment_size) {
  validate_spec(spec);
  check_fragment_size(spec, fragment_size);
  if (fragment_size == 0) return 0.0;
  const CompositionLaw law = composition_law(spec, fragment_size);
  double sum = 0.0;
  for (std::size_t i = 0; i < law.probabilities.size(); ++i) {
    sum += law.probabilities[i] *
           holevo_from_overlap(fragment_overlap(spec, law.composition(i)), spec.p0);
  }
  return sum;
}

FragmentSizeResult find_fragment_size(const EnvironmentSpec& spec, const DeficitSpec& deficit) {
  validate_spec(spec);
  const double target = target_bits(spec, deficit);
  if (deficit.is_trivial() || target <= kThresholdSlack) return {1, 1.0};

  auto qualifies = [&](std::int64_t f) {
    return avg_holevo_exact(spec, f) >= target - kThresholdSlack;
  };
  const std::int64_t n = spec.n_total();
  if (!qualifies(n)) {
    throw DeficitUnreachable("no fragment reaches (1 - delta) H_S");
  }
  // avg_holevo_exact is non-decreasing in the fragment size.
  std::int64_t lo = 0;  // never qualifies: carries zero information
  std::int64_t hi = n;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (qualifies(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  FragmentSizeResult result{hi, static_cast<double>(hi)};
  const double a_lo = avg_holevo_exact(spec, hi - 1);
  const double a_hi = avg_holevo_exact(spec, hi);
  if (a_hi > a_lo) {
    const double frac = std::clamp((target - a_lo) / (a_hi - a_lo), 0.0, 1.0);
    result.interpolated = static_cast<double>(hi - 1) + frac;
  }
  return result;
}

RedundancyReport redundancy_avg(const EnvironmentSpec& spec, const DeficitSpec& deficit) {
  validate_spec(spec);
  RedundancyReport report;
  const double n = static_cast<double>(spec.n_total());
  if (deficit.is_trivial()) {
    report.f_delta = 1;
    report.f_delta_interpolated = 1.0;
    report.r_avg = n;
    return report;
  }
  const FragmentSizeResult found = find_fragment_size(spec, deficit);
  report.f_delta = found.f_delta;
  report.f_delta_interpolated = found.interpolated;
  report.r_avg = n / static_cast<double>(found.f_delta);
  return report;
}

std::int64_t min_good_spins(const EnvironmentSpec& spec, const DeficitSpec& deficit) {
  validate_spec(spec);
  const double target = target_bits(spec, deficit);
  auto qualifies = [&](std::int64_t k) {
    const double overlap = std::pow(spec.gamma2_good, static_cast<double>(k));
    return holevo_from_overlap(overlap, spec.p0) >= target - kThresholdSlack;
  };
  if (spec.n_good < 1 || !qualifies(spec.n_good)) {
    throw DeficitUnreachable("the good spins together cannot reach (1 - delta) H_S");
  }
  if (qualifies(1)) return 1;
  std::int64_t lo = 1;
  std::int64_t hi = spec.n_good;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (qualifies(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

RedundancyReport redundancy_max(const EnvironmentSpec& spec, const DeficitSpec& deficit) {
  validate_spec(spec);
  RedundancyReport report;
  if (deficit.is_trivial()) {
    report.r_max = static_cast<double>(spec.n_total());
    return report;
  }
  const std::int64_t k_star = min_good_spins(spec, deficit);
  report.r_max = static_cast<double>(spec.n_good / k_star);
  if (spec.gamma2_good >= deficit.delta()) report.flags.set(ValidityFlag::kMaxFormulaValid);
  return report;
}

McEstimate mc_avg_holevo(const EnvironmentSpec& spec, std::int64_t fragment_size,
                         std::int64_t n_samples, std::uint64_t seed) {
  validate_spec(spec);
  check_fragment_size(spec, fragment_size);
  if (n_samples < 2) throw std::invalid_argument("Monte Carlo needs at least two samples");

  std::mt19937_64 rng(seed);
  const auto total = static_cast<std::uint64_t>(spec.n_total());
  const auto bad = static_cast<std::uint64_t>(spec.n_bad);
  const auto size = static_cast<std::uint64_t>(fragment_size);

  // Welford accumulation: constant samples give an exact mean and zero spread.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t s = 0; s < n_samples; ++s) {
    std::uint64_t remaining = total;
    std::uint64_t remaining_bad = bad;
    std::uint64_t drawn_bad = 0;
    for (std::uint64_t i = 0; i < size; ++i) {
      if (remaining_bad == 0) break;
      if (remaining_bad == remaining) {
        drawn_bad += size - i;
        break;
      }
      if (uniform_below(rng, remaining) < remaining_bad) {
        ++drawn_bad;
        --remaining_bad;
      }
      --remaining;
    }
    const FragmentComposition comp{fragment_size - static_cast<std::int64_t>(drawn_bad),
                                   static_cast<std::int64_t>(drawn_bad)};
    const double x = holevo_from_overlap(fragment_overlap(spec, comp), spec.p0);
    const double delta = x - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (x - mean);
  }
  const double n = static_cast<double>(n_samples);
  const double variance = m2 / (n - 1.0);
  return {mean, std::sqrt(variance / n)};
}

double stirling_fragment_size(const EnvironmentSpec& spec, const DeficitSpec& deficit) {
  validate_spec(spec);
  if (spec.n_good == 0) {
    throw std::invalid_argument("Stirling fragment size needs at least one good spin");
  }
  return static_cast<double>(spec.n_bad) * std::log(1.0 / deficit.delta()) /
         static_cast<double>(spec.n_good);
}

InfoCurve exact_curve(const EnvironmentSpec& spec, std::int64_t fmin, std::int64_t fmax) {
  validate_spec(spec);
  check_range(spec, fmin, fmax);
  const auto count = static_cast<std::size_t>(fmax - fmin + 1);
  return parallel_map(count, [&](std::size_t i) {
    const std::int64_t f = fmin + static_cast<std::int64_t>(i);
    return InfoPoint{f, avg_holevo_exact(spec, f), CurveMethod::kExact, std::nullopt};
  });
}

InfoCurve monte_carlo_curve(const EnvironmentSpec& spec, std::int64_t fmin, std::int64_t fmax,
                            std::int64_t n_samples, std::uint64_t seed) {
  validate_spec(spec);
  check_range(spec, fmin, fmax);
  const auto count = static_cast<std::size_t>(fmax - fmin + 1);
  return parallel_map(count, [&](std::size_t i) {
    const std::int64_t f = fmin + static_cast<std::int64_t>(i);
    const McEstimate mc =
        mc_avg_holevo(spec, f, n_samples, split_seed(seed, static_cast<std::uint64_t>(f)));
    return InfoPoint{f, mc.estimate, CurveMethod::kMonteCarlo, mc.stderr_estimate};
  });
}

}  // namespace darwinism
