#include "darwinism/validation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "darwinism/entropy.hpp"
#include "darwinism/fragment_stats.hpp"
#include "darwinism/parallel.hpp"

namespace darwinism {

namespace {

constexpr double kExactTol = 1e-12;
constexpr double kOracleTol = 1e-10;
// Dense eigen-decomposition of the whole state is only done up to this size.
constexpr int kFullPurityQubits = 8;

class Recorder {
 public:
  explicit Recorder(const ValidationOptions& options) : options_(options) {}

  void add(std::string name, double deviation, double tolerance) {
    if (options_.corrupt_check && *options_.corrupt_check == name) tolerance = -1.0;
    const bool ok = std::isfinite(deviation) && deviation <= tolerance;
    report_.checks.push_back({std::move(name), deviation, tolerance, ok});
  }

  ValidationReport take() { return std::move(report_); }

 private:
  const ValidationOptions& options_;
  ValidationReport report_;
};

}  // namespace

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::optional<std::string> ValidationReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) return c.name;
  }
  return std::nullopt;
}

const std::vector<std::string>& validation_check_names() {
  static const std::vector<std::string> names = {
      "pmf_enumeration",  "pmf_normalisation", "p_all_bad_product",
      "holevo_closed_form", "oracle_average_holevo", "perfect_closed_form",
      "monotone_curve",   "holevo_bound",      "decomposition",
      "state_purity",     "mi_antisymmetry",   "hamiltonian_branch_equivalence",
  };
  return names;
}

ValidationReport run_validation(const EnvironmentSpec& spec, const ValidationOptions& options) {
  validate_spec(spec);
  const auto& limits = options.limits;
  if (spec.n_total() > limits.max_env_qubits) {
    throw oracle::OracleCapExceeded("validation needs n_total <= " +
                                    std::to_string(limits.max_env_qubits));
  }
  const int n = static_cast<int>(spec.n_total());
  const int n_good = static_cast<int>(spec.n_good);
  const double h_s = binary_entropy(spec.p0);
  Recorder rec(options);

  // Subset counting: bad spins are the top n_bad positions.
  {
    std::vector<std::vector<double>> counts(n + 1, std::vector<double>(n + 1, 0.0));
    const std::uint32_t bad_mask = ((1u << n) - 1u) & ~((1u << n_good) - 1u);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      counts[std::popcount(mask)][std::popcount(mask & bad_mask)] += 1.0;
    }
    double dev = 0.0;
    double norm_dev = 0.0;
    double product_dev = 0.0;
    for (int f = 0; f <= n; ++f) {
      const double total = std::exp(log_binomial(n, f));
      double sum = 0.0;
      for (int b = 0; b <= f; ++b) {
        const double pmf = hypergeometric_pmf(spec, f, b);
        sum += pmf;
        dev = std::max(dev, std::abs(pmf - counts[f][b] / total));
      }
      norm_dev = std::max(norm_dev, std::abs(sum - 1.0));
      product_dev = std::max(product_dev, std::abs(p_all_bad(spec, f) - hypergeometric_pmf(spec, f, f)));
    }
    rec.add("pmf_enumeration", dev, kExactTol);
    rec.add("pmf_normalisation", norm_dev, kExactTol);
    rec.add("p_all_bad_product", product_dev, kExactTol);
  }

  const oracle::DenseState state = oracle::build_spec_state(spec, limits);

  // One fragment per composition: the first f_good good and first f_bad bad spins.
  {
    double dev = 0.0;
    for (int fg = 0; fg <= n_good; ++fg) {
      for (int fb = 0; fb <= n - n_good; ++fb) {
        oracle::QubitSet fragment;
        for (int k = 0; k < fg; ++k) fragment.push_back(k + 1);
        for (int k = 0; k < fb; ++k) fragment.push_back(n_good + k + 1);
        const double closed = holevo_from_overlap(fragment_overlap(spec, {fg, fb}), spec.p0);
        dev = std::max(dev, std::abs(closed - oracle::holevo_and_discord(state, fragment, limits).chi));
      }
    }
    rec.add("holevo_closed_form", dev, kOracleTol);
  }

  // Every subset of every size, evaluated once.
  std::vector<double> avg_chi(n + 1, 0.0);
  std::vector<double> avg_mi(n + 1, 0.0);
  double decomposition_dev = 0.0;
  double bound_dev = 0.0;
  for (int f = 1; f <= n; ++f) {
    const auto subsets = oracle::env_subsets(n, f);
    const auto values = parallel_map(subsets.size(), [&](std::size_t i) {
      return oracle::holevo_and_discord(state, subsets[i], limits);
    });
    for (const auto& v : values) {
      avg_chi[f] += v.chi;
      avg_mi[f] += v.mutual_information;
      decomposition_dev = std::max({decomposition_dev, -v.discord - kOracleTol,
                                    v.discord - v.mutual_information, 0.0});
      bound_dev = std::max(bound_dev, v.chi - h_s);
    }
    avg_chi[f] /= static_cast<double>(values.size());
    avg_mi[f] /= static_cast<double>(values.size());
  }

  {
    double dev = 0.0;
    double perfect_dev = 0.0;
    double monotone_dev = 0.0;
    double previous = 0.0;
    for (int f = 0; f <= n; ++f) {
      const double exact = avg_holevo_exact(spec, f);
      dev = std::max(dev, std::abs(exact - avg_chi[f]));
      perfect_dev = std::max(perfect_dev, std::abs(exact - h_s * (1.0 - p_all_bad(spec, f))));
      monotone_dev = std::max(monotone_dev, previous - exact);
      previous = exact;
    }
    rec.add("oracle_average_holevo", dev, kOracleTol);
    if (spec.is_perfect()) rec.add("perfect_closed_form", perfect_dev, kExactTol);
    rec.add("monotone_curve", monotone_dev, kExactTol);
  }

  rec.add("holevo_bound", std::max(0.0, bound_dev), kOracleTol);
  rec.add("decomposition", decomposition_dev, kOracleTol);

  {
    double dev = std::abs(state.amplitudes().squaredNorm() - 1.0);
    if (state.num_qubits() <= kFullPurityQubits) {
      const Eigen::MatrixXcd rho = state.amplitudes() * state.amplitudes().adjoint();
      dev = std::max(dev, oracle::von_neumann_entropy(rho));
    }
    rec.add("state_purity", dev, kOracleTol);
  }

  // I(S:F) + I(S:F') = 2 S(rho_S) for complementary fragments of a pure
  // state; S(rho_S) drops below the pointer entropy when decoherence is partial.
  {
    const double s_sys = oracle::von_neumann_entropy(oracle::reduced_density(state, {0}, limits).rho);
    double dev = 0.0;
    for (int f = 0; f <= n; ++f) dev = std::max(dev, std::abs(avg_mi[f] + avg_mi[n - f] - 2.0 * s_sys));
    rec.add("mi_antisymmetry", dev, kOracleTol);
  }

  // Couplings chosen so cos(2 g_k t) reproduces the spec overlaps at t = 1.
  {
    const auto gammas = oracle::spec_gammas(spec);
    std::vector<double> couplings(gammas.size());
    std::transform(gammas.begin(), gammas.end(), couplings.begin(),
                   [](const oracle::Complex& g) { return 0.5 * std::acos(std::min(1.0, g.real())); });
    const auto evolved = oracle::align_to_branch_frame(
        oracle::evolve_pure_decoherence(couplings, 1.0, limits));
    const auto branch = oracle::build_branch_state(0.5, gammas, limits);
    rec.add("hamiltonian_branch_equivalence", 1.0 - oracle::fidelity(evolved, branch), kOracleTol);
  }

  return rec.take();
}

}  // namespace darwinism
