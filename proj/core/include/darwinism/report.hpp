#pragma once

#include <optional>

#include "darwinism/fragment_stats.hpp"
#include "darwinism/qcb.hpp"

namespace darwinism {

/// Every redundancy variant for one spec and deficit.
///
/// Throws DeficitUnreachable when no fragment reaches (1 - delta) H_S. If
/// only the good-spin maximisation is unreachable (good spins carry no
/// record, bad spins do), r_max stays empty and kDeficitUnreachable is set.
RedundancyReport full_redundancy_report(const EnvironmentSpec& spec, const DeficitSpec& deficit);

/// r_avg / r_max when both are present and r_max > 0.
std::optional<double> ratio_avg_over_max(const RedundancyReport& report);

}  // namespace darwinism
