#include "darwinism/report.hpp"

namespace darwinism {

RedundancyReport full_redundancy_report(const EnvironmentSpec& spec, const DeficitSpec& deficit) {
  RedundancyReport report = redundancy_avg(spec, deficit);

  try {
    const RedundancyReport max = redundancy_max(spec, deficit);
    report.r_max = max.r_max;
    if (max.flags.test(ValidityFlag::kMaxFormulaValid)) {
      report.flags.set(ValidityFlag::kMaxFormulaValid);
    }
  } catch (const DeficitUnreachable&) {
    report.flags.set(ValidityFlag::kDeficitUnreachable);
  }

  if (deficit.is_trivial()) {
    report.r_max_continuous = static_cast<double>(spec.n_total());
    return report;
  }

  report.r_max_continuous = redundancy_max_qcb(spec, deficit);
  const QcbRedundancy qcb = redundancy_qcb(spec, deficit);
  report.r_qcb = qcb.value;
  if (qcb.valid) report.flags.set(ValidityFlag::kQcbValid);
  if (spec.gamma2_bad == 1.0) report.r_qcb_expanded = redundancy_goodbad_expanded(spec, deficit);
  return report;
}

std::optional<double> ratio_avg_over_max(const RedundancyReport& report) {
  if (!report.r_avg || !report.r_max || *report.r_max <= 0.0) return std::nullopt;
  return *report.r_avg / *report.r_max;
}

}  // namespace darwinism
