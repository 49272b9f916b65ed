#pragma once

#include <cstdint>

#include "darwinism/entropy.hpp"
#include "darwinism/model.hpp"

namespace darwinism {

/// Environment-averaged quantum Chernoff exponent in nats per spin, with
/// the Chernoff parameter fixed at c = 1/2. For pure conditional states the
/// per-spin Chernoff trace equals the squared decoherence factor.
struct ChernoffExponent {
  double value = 0.0;
  /// Set when the average per-spin overlap is zero: a single spin already
  /// discriminates perfectly and `value` is +inf.
  bool divergent = false;
};

/// -ln[(n_bad gamma2_bad + n_good gamma2_good) / n_total], evaluated via
/// log1p of the average decoherence deficit.
ChernoffExponent typical_chernoff(const EnvironmentSpec& spec);

/// Raw asymptotic error probability exp(-xi F), prefactor 1. A divergent
/// exponent gives 0 for any non-empty fragment.
double error_probability(const ChernoffExponent& xi, std::int64_t fragment_size);

/// error_probability clamped to [0, 1/2] for use inside an entropy.
double clamped_error_probability(const ChernoffExponent& xi, std::int64_t fragment_size);

/// H_S - H(P_e), floored at zero.
Bits holevo_asymptotic(const EnvironmentSpec& spec, std::int64_t fragment_size);

struct QcbRedundancy {
  double value = 0.0;
  bool valid = true;
};

/// n_total * xi / ln(1/delta). Invalid when the exponent diverges, when a
/// perfect-model spec has n_good < ln(1/delta), or when the estimate drops
/// below one record. Throws std::invalid_argument for delta = 1.
QcbRedundancy redundancy_qcb(const EnvironmentSpec& spec, const DeficitSpec& deficit);

/// n_good (1 - gamma2_good) / ln(1/delta); requires gamma2_bad = 1.
double redundancy_goodbad_expanded(const EnvironmentSpec& spec, const DeficitSpec& deficit);

/// n_good ln(gamma2_good) / ln(delta), capped at n_good. When
/// gamma2_good <= delta each good spin is already a sufficient record and
/// the result is n_good.
double redundancy_max_qcb(const EnvironmentSpec& spec, const DeficitSpec& deficit);

struct DefinitionRatio {
  double value = 0.0;
  /// gamma2_good was 0 or 1 and the limiting value was returned.
  bool at_boundary = false;
};

/// (1 - g) / ln(1/g): ratio of the averaged to the maximised redundancy
/// estimates. Increasing in g, tends to 1 as g -> 1, and equals
/// (1 - delta) / ln(1/delta) at g = delta.
DefinitionRatio definition_ratio(double gamma2_good);

/// Near-unity-deficit form n_good / (1 - delta) of the perfect-model
/// redundancy. Diagnostic only.
double redundancy_small_fragment(const EnvironmentSpec& spec, const DeficitSpec& deficit);

}  // namespace darwinism
