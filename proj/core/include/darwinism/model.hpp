#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace darwinism {

/// Mixed good/bad spin environment under pure decoherence.
///
/// Spins inside each class are identical, so every quantity depends only on
/// how many spins of each class a fragment holds. Overlaps are squared
/// magnitudes of the single-spin decoherence factor: 0 is a perfect record,
/// 1 is no record at all.
struct EnvironmentSpec {
  std::int64_t n_good = 0;
  std::int64_t n_bad = 0;
  double gamma2_good = 0.0;
  double gamma2_bad = 1.0;
  double p0 = 0.5;

  std::int64_t n_total() const { return n_good + n_bad; }
  double p1() const { return 1.0 - p0; }

  /// gamma2_good = 0 and gamma2_bad = 1: GHZ-correlated good spins plus
  /// untouched bad spins.
  bool is_perfect() const { return gamma2_good == 0.0 && gamma2_bad == 1.0; }

  friend bool operator==(const EnvironmentSpec&, const EnvironmentSpec&) = default;
};

/// Numbers of good and bad spins inside an intercepted fragment.
struct FragmentComposition {
  std::int64_t f_good = 0;
  std::int64_t f_bad = 0;

  std::int64_t size() const { return f_good + f_bad; }

  friend bool operator==(const FragmentComposition&, const FragmentComposition&) = default;
};

/// Information deficit: the fraction of the pointer entropy an observer is
/// willing to give up. Valid range is (0, 1].
class DeficitSpec {
 public:
  explicit DeficitSpec(double delta);

  double delta() const { return delta_; }
  bool is_trivial() const { return delta_ == 1.0; }

 private:
  double delta_;
};

/// Thrown by validate_spec; carries one message per violated invariant.
class SpecError : public std::invalid_argument {
 public:
  explicit SpecError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Returns the spec unchanged if every invariant holds, otherwise throws
/// SpecError listing all violations ("empty environment", "overlap out of
/// range", "probability out of range", "negative spin count").
EnvironmentSpec validate_spec(const EnvironmentSpec& spec);

/// ln(n! / (n-k)!) for 0 <= k <= n. Accurate to a few ulps of the result
/// even when n is of order 1e9, where a plain lgamma difference would lose
/// about six digits.
double log_falling_factorial(std::int64_t n, std::int64_t k);

/// ln C(n, k); -inf outside 0 <= k <= n.
double log_binomial(std::int64_t n, std::int64_t k);

/// Probability that a uniformly random fragment of `fragment_size` spins
/// holds exactly `f_bad` bad spins. Infeasible compositions give 0.
/// Throws std::invalid_argument when the fragment is larger than the
/// environment.
double hypergeometric_pmf(const EnvironmentSpec& spec, std::int64_t fragment_size,
                          std::int64_t f_bad);

/// Hypergeometric law over f_bad for one fragment size, restricted to the
/// window where probabilities exceed `relative_cutoff` times the mode and
/// renormalised to sum to one.
struct CompositionLaw {
  std::int64_t fragment_size = 0;
  std::int64_t first_bad = 0;
  std::vector<double> probabilities;

  std::int64_t last_bad() const {
    return first_bad + static_cast<std::int64_t>(probabilities.size()) - 1;
  }
  FragmentComposition composition(std::size_t i) const {
    const std::int64_t f_bad = first_bad + static_cast<std::int64_t>(i);
    return {fragment_size - f_bad, f_bad};
  }
};

CompositionLaw composition_law(const EnvironmentSpec& spec, std::int64_t fragment_size,
                               double relative_cutoff = 1e-18);

/// |Gamma_F|^2 = gamma2_good^f_good * gamma2_bad^f_bad. The empty fragment
/// gives 1.
double fragment_overlap(const EnvironmentSpec& spec, const FragmentComposition& comp);

}  // namespace darwinism
