#include "darwinism/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>
#include <string_view>

#include "darwinism/parallel.hpp"

namespace darwinism::oracle {

namespace {

constexpr double kNormTolerance = 1e-12;
constexpr double kEigenFloor = 1e-12;
constexpr std::size_t kMaxSubsets = std::size_t{1} << 20;

using Index = std::uint64_t;

QubitSet sorted_unique(const QubitSet& qubits, int num_qubits, int min_id) {
  QubitSet out = qubits;
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw std::invalid_argument("qubit set contains duplicates");
  }
  for (int q : out) {
    if (q < min_id || q >= num_qubits) {
      throw std::invalid_argument("qubit id " + std::to_string(q) + " out of range");
    }
  }
  return out;
}

QubitSet complement(const QubitSet& sorted, int num_qubits) {
  QubitSet out;
  for (int q = 0; q < num_qubits; ++q) {
    if (!std::binary_search(sorted.begin(), sorted.end(), q)) out.push_back(q);
  }
  return out;
}

// deposit[j] spreads the bits of j onto the positions listed in `qubits`.
std::vector<Index> deposit_table(const QubitSet& qubits) {
  std::vector<Index> table(std::size_t{1} << qubits.size(), 0);
  for (std::size_t j = 0; j < qubits.size(); ++j) {
    const std::size_t half = std::size_t{1} << j;
    for (std::size_t r = 0; r < half; ++r) table[r + half] = table[r] | (Index{1} << qubits[j]);
  }
  return table;
}

// psi reshaped into a (2^|keep|) x (2^|rest|) matrix.
Eigen::MatrixXcd bipartition(const Eigen::VectorXcd& psi, int num_qubits, const QubitSet& keep) {
  const std::vector<Index> rows = deposit_table(keep);
  const std::vector<Index> cols = deposit_table(complement(keep, num_qubits));
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          psi(static_cast<Eigen::Index>(rows[r] | cols[c]));
    }
  }
  return m;
}

void apply_single_qubit(Eigen::VectorXcd& psi, int qubit, const Eigen::Matrix2cd& u) {
  const Index stride = Index{1} << qubit;
  const auto dim = static_cast<Index>(psi.size());
  for (Index i = 0; i < dim; ++i) {
    if (i & stride) continue;
    const auto i0 = static_cast<Eigen::Index>(i);
    const auto i1 = static_cast<Eigen::Index>(i | stride);
    const Complex a0 = psi(i0);
    const Complex a1 = psi(i1);
    psi(i0) = u(0, 0) * a0 + u(0, 1) * a1;
    psi(i1) = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

// Product vector over spins: bit k of the index is spin k.
Eigen::VectorXcd product_state(const std::vector<Eigen::Vector2cd>& factors) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
  for (const auto& f : factors) {
    const Eigen::Index len = v.size();
    Eigen::VectorXcd next(2 * len);
    next.head(len) = v * f(0);
    next.tail(len) = v * f(1);
    v = std::move(next);
  }
  return v;
}

Eigen::VectorXcd interleave_branches(const Eigen::VectorXcd& b0, const Eigen::VectorXcd& b1) {
  Eigen::VectorXcd psi(2 * b0.size());
  for (Eigen::Index e = 0; e < b0.size(); ++e) {
    psi(2 * e) = b0(e);
    psi(2 * e + 1) = b1(e);
  }
  return psi;
}

// Dominant eigenvector of spin k's reduced state within one branch.
Eigen::Vector2cd conditional_spin_state(const Eigen::VectorXcd& branch, int k, double* weight) {
  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
  const Index stride = Index{1} << k;
  for (Index e = 0; e < static_cast<Index>(branch.size()); ++e) {
    if (e & stride) continue;
    const Complex a0 = branch(static_cast<Eigen::Index>(e));
    const Complex a1 = branch(static_cast<Eigen::Index>(e | stride));
    rho(0, 0) += std::norm(a0);
    rho(1, 1) += std::norm(a1);
    rho(0, 1) += a0 * std::conj(a1);
  }
  rho(1, 0) = std::conj(rho(0, 1));
  *weight = rho.trace().real();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(rho);
  return solver.eigenvectors().col(1);
}

}  // namespace

OracleLimits OracleLimits::from_environment() {
  OracleLimits limits;
  if (const char* raw = std::getenv("DARWINISM_ORACLE_CAP"); raw != nullptr && *raw != '\0') {
    const std::string_view text(raw);
    int cap = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
    if (ec != std::errc{} || ptr != text.data() + text.size() || cap < 1 || cap > 30) {
      throw std::invalid_argument("DARWINISM_ORACLE_CAP must be an integer in [1, 30]");
    }
    limits.max_env_qubits = cap;
  }
  return limits;
}

DenseState::DenseState(Eigen::VectorXcd amplitudes, std::vector<EnvSpin> spins,
                       const OracleLimits& limits)
    : amplitudes_(std::move(amplitudes)), spins_(std::move(spins)) {
  if (num_env() > limits.max_env_qubits) {
    throw OracleCapExceeded("environment has " + std::to_string(num_env()) +
                            " spins; oracle cap is " + std::to_string(limits.max_env_qubits));
  }
  if (amplitudes_.size() != (Eigen::Index{1} << num_qubits())) {
    throw std::invalid_argument("amplitude vector length must be 2^(1 + N)");
  }
  if (std::abs(amplitudes_.squaredNorm() - 1.0) > kNormTolerance) {
    throw std::logic_error("dense state is not normalised");
  }
}

Eigen::VectorXcd DenseState::branch(int s) const {
  const Eigen::Index len = amplitudes_.size() / 2;
  Eigen::VectorXcd out(len);
  for (Eigen::Index e = 0; e < len; ++e) out(e) = amplitudes_(2 * e + s);
  return out;
}

DenseState build_branch_state(double p0, std::span<const Complex> gammas,
                              const OracleLimits& limits) {
  if (gammas.empty()) throw std::invalid_argument("branch state needs at least one spin");
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw std::invalid_argument("p0 must lie in [0, 1]");
  if (static_cast<int>(gammas.size()) > limits.max_env_qubits) {
    throw OracleCapExceeded("environment exceeds oracle cap");
  }

  std::vector<Eigen::Vector2cd> ready(gammas.size());
  std::vector<Eigen::Vector2cd> record(gammas.size());
  std::vector<EnvSpin> spins(gammas.size());
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    const Complex g = gammas[k];
    const double mag2 = std::norm(g);
    if (mag2 > 1.0 + kNormTolerance) throw std::invalid_argument("|gamma_k| must not exceed 1");
    ready[k] << 1.0, 0.0;
    record[k] << g, std::sqrt(std::max(0.0, 1.0 - mag2));
    spins[k] = {std::abs(g) >= 1.0 - kNormTolerance ? SpinRole::kBad : SpinRole::kGood, g};
  }
  const Eigen::VectorXcd b0 = product_state(ready) * std::sqrt(p0);
  const Eigen::VectorXcd b1 = product_state(record) * std::sqrt(1.0 - p0);
  return DenseState(interleave_branches(b0, b1), std::move(spins), limits);
}

std::vector<Complex> spec_gammas(const EnvironmentSpec& spec) {
  validate_spec(spec);
  std::vector<Complex> gammas;
  gammas.reserve(static_cast<std::size_t>(spec.n_total()));
  gammas.insert(gammas.end(), static_cast<std::size_t>(spec.n_good),
                Complex(std::sqrt(spec.gamma2_good), 0.0));
  gammas.insert(gammas.end(), static_cast<std::size_t>(spec.n_bad),
                Complex(std::sqrt(spec.gamma2_bad), 0.0));
  return gammas;
}

DenseState build_spec_state(const EnvironmentSpec& spec, const OracleLimits& limits) {
  validate_spec(spec);
  if (spec.n_total() > limits.max_env_qubits) {
    throw OracleCapExceeded("environment exceeds oracle cap");
  }
  const std::vector<Complex> gammas = spec_gammas(spec);
  DenseState state = build_branch_state(spec.p0, gammas, limits);
  // Roles follow the spec's classes, not the overlap values.
  std::vector<EnvSpin> spins(state.spins().begin(), state.spins().end());
  for (std::size_t k = 0; k < spins.size(); ++k) {
    spins[k].role = k < static_cast<std::size_t>(spec.n_good) ? SpinRole::kGood : SpinRole::kBad;
  }
  return DenseState(state.amplitudes(), std::move(spins), limits);
}

DenseState evolve_pure_decoherence(std::span<const double> couplings, double t,
                                   const OracleLimits& limits) {
  if (couplings.empty()) throw std::invalid_argument("evolution needs at least one spin");
  const int n_env = static_cast<int>(couplings.size());
  if (n_env > limits.max_env_qubits) throw OracleCapExceeded("environment exceeds oracle cap");

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<EnvSpin> spins(couplings.size());
  for (std::size_t k = 0; k < couplings.size(); ++k) {
    const bool good = couplings[k] != 0.0;
    spins[k] = {good ? SpinRole::kGood : SpinRole::kBad, Complex(std::cos(2.0 * couplings[k] * t))};
  }

  const Index dim = Index{1} << (n_env + 1);
  Eigen::VectorXcd psi(static_cast<Eigen::Index>(dim));
  for (Index i = 0; i < dim; ++i) {
    const double z_sys = (i & 1u) ? -1.0 : 1.0;
    double amplitude = inv_sqrt2;
    double field = 0.0;
    for (int k = 0; k < n_env; ++k) {
      const bool up = ((i >> (k + 1)) & 1u) == 0;
      if (spins[static_cast<std::size_t>(k)].role == SpinRole::kGood) {
        amplitude *= inv_sqrt2;
      } else if (!up) {
        amplitude = 0.0;
      }
      field += couplings[static_cast<std::size_t>(k)] * (up ? 1.0 : -1.0);
    }
    psi(static_cast<Eigen::Index>(i)) = amplitude * std::polar(1.0, -t * z_sys * field);
  }
  return DenseState(std::move(psi), std::move(spins), limits);
}

DenseState align_to_branch_frame(const DenseState& state) {
  const int n_env = state.num_env();
  const Eigen::VectorXcd b0 = state.branch(0);
  const Eigen::VectorXcd b1 = state.branch(1);
  const double p0 = std::clamp(b0.squaredNorm(), 0.0, 1.0);

  OracleLimits limits;
  limits.max_env_qubits = n_env;
  Eigen::VectorXcd psi = state.amplitudes();
  std::vector<Complex> overlaps(static_cast<std::size_t>(n_env));

  for (int k = 0; k < n_env; ++k) {
    double w0 = 0.0;
    double w1 = 0.0;
    Eigen::Vector2cd e0 = conditional_spin_state(b0, k, &w0);
    Eigen::Vector2cd e1 = conditional_spin_state(b1, k, &w1);
    if (w0 < kNormTolerance) e0 = e1;
    if (w1 < kNormTolerance) e1 = e0;

    Complex gamma = e0.dot(e1);
    if (std::abs(gamma) > 1e-14) {
      e1 *= std::conj(gamma) / std::abs(gamma);
      gamma = std::abs(gamma);
    } else {
      gamma = 0.0;
    }
    Eigen::Vector2cd perp = e1 - gamma * e0;
    if (perp.norm() > kNormTolerance) {
      perp.normalize();
    } else {
      perp << -std::conj(e0(1)), std::conj(e0(0));
    }
    Eigen::Matrix2cd u;
    u.col(0) = e0;
    u.col(1) = perp;
    apply_single_qubit(psi, k + 1, u.adjoint());
    overlaps[static_cast<std::size_t>(k)] = Complex(std::min(1.0, gamma.real()), 0.0);
  }

  // Remove the residual phase of each pointer branch.
  const DenseState reference = build_branch_state(p0, overlaps, limits);
  for (int s = 0; s < 2; ++s) {
    Complex o = 0.0;
    for (Eigen::Index i = s; i < psi.size(); i += 2) {
      o += std::conj(reference.amplitudes()(i)) * psi(i);
    }
    if (std::abs(o) < 1e-14) continue;
    const Complex phase = std::conj(o) / std::abs(o);
    for (Eigen::Index i = s; i < psi.size(); i += 2) psi(i) *= phase;
  }

  std::vector<EnvSpin> spins(state.spins().begin(), state.spins().end());
  for (std::size_t k = 0; k < spins.size(); ++k) spins[k].gamma = overlaps[k];
  return DenseState(std::move(psi), std::move(spins), limits);
}

double fidelity(const DenseState& a, const DenseState& b) {
  if (a.amplitudes().size() != b.amplitudes().size()) {
    throw std::invalid_argument("fidelity needs states of equal size");
  }
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

DensityMatrix reduced_density(const DenseState& state, const QubitSet& subset,
                              const OracleLimits& limits) {
  const QubitSet keep = sorted_unique(subset, state.num_qubits(), 0);
  if (static_cast<int>(keep.size()) > limits.max_matrix_qubits) {
    throw OracleCapExceeded("reduced density matrix exceeds " +
                            std::to_string(limits.max_matrix_qubits) + " qubits");
  }
  const Eigen::MatrixXcd m = bipartition(state.amplitudes(), state.num_qubits(), keep);
  return {keep, m * m.adjoint()};
}

Bits von_neumann_entropy(const Eigen::MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
  double h = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double lambda = solver.eigenvalues()(i);
    if (lambda > kEigenFloor) h -= lambda * std::log2(lambda);
  }
  return h;
}

Bits pure_state_entropy(const Eigen::VectorXcd& psi, int num_qubits, const QubitSet& subset,
                        const OracleLimits& limits) {
  const QubitSet keep = sorted_unique(subset, num_qubits, 0);
  if (keep.empty() || static_cast<int>(keep.size()) == num_qubits) return 0.0;
  const int small_side = std::min<int>(static_cast<int>(keep.size()),
                                       num_qubits - static_cast<int>(keep.size()));
  if (small_side > limits.max_matrix_qubits) {
    throw OracleCapExceeded("entropy needs a density matrix over more than " +
                            std::to_string(limits.max_matrix_qubits) + " qubits");
  }
  const Eigen::MatrixXcd m = bipartition(psi, num_qubits, keep);
  // rho_A = M M^dag and rho_B = (M^dag M)^T share their nonzero spectrum.
  if (m.rows() <= m.cols()) return von_neumann_entropy(m * m.adjoint());
  return von_neumann_entropy(m.adjoint() * m);
}

Bits mutual_information(const DenseState& state, const QubitSet& fragment,
                        const OracleLimits& limits) {
  const QubitSet f = sorted_unique(fragment, state.num_qubits(), 1);
  if (f.empty()) return 0.0;
  QubitSet sf = f;
  sf.insert(sf.begin(), 0);
  const int n = state.num_qubits();
  const Eigen::VectorXcd& psi = state.amplitudes();
  return pure_state_entropy(psi, n, {0}, limits) + pure_state_entropy(psi, n, f, limits) -
         pure_state_entropy(psi, n, sf, limits);
}

HolevoDiscord holevo_and_discord(const DenseState& state, const QubitSet& fragment,
                                 const OracleLimits& limits) {
  const QubitSet f = sorted_unique(fragment, state.num_qubits(), 1);
  if (f.empty()) return {};

  const int n = state.num_qubits();
  const Eigen::VectorXcd& psi = state.amplitudes();
  const Bits h_f = pure_state_entropy(psi, n, f, limits);

  // Fragment qubits relabelled onto the environment-only branch vectors.
  QubitSet f_env(f.size());
  std::transform(f.begin(), f.end(), f_env.begin(), [](int q) { return q - 1; });

  Bits conditional = 0.0;
  for (int s = 0; s < 2; ++s) {
    Eigen::VectorXcd b = state.branch(s);
    const double p = b.squaredNorm();
    if (p < kEigenFloor) continue;
    b /= std::sqrt(p);
    conditional += p * pure_state_entropy(b, state.num_env(), f_env, limits);
  }

  HolevoDiscord out;
  out.chi = h_f - conditional;
  out.mutual_information = mutual_information(state, f, limits);
  out.discord = out.mutual_information - out.chi;
  return out;
}

std::vector<QubitSet> env_subsets(int n_env, int k) {
  if (k < 0 || k > n_env) throw std::invalid_argument("subset size out of range");
  std::vector<QubitSet> out;
  QubitSet current(static_cast<std::size_t>(k));
  std::iota(current.begin(), current.end(), 1);
  for (;;) {
    out.push_back(current);
    if (out.size() > kMaxSubsets) throw OracleCapExceeded("too many fragments to enumerate");
    int i = k - 1;
    while (i >= 0 && current[static_cast<std::size_t>(i)] == n_env - k + i + 1) --i;
    if (i < 0) break;
    ++current[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      current[static_cast<std::size_t>(j)] = current[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

Bits all_fragment_average(const DenseState& state, int fragment_size, FragmentQuantity quantity,
                          const OracleLimits& limits) {
  if (fragment_size == 0) return 0.0;
  const std::vector<QubitSet> subsets = env_subsets(state.num_env(), fragment_size);
  const std::vector<double> values = parallel_map(subsets.size(), [&](std::size_t i) {
    return quantity == FragmentQuantity::kHolevo
               ? holevo_and_discord(state, subsets[i], limits).chi
               : mutual_information(state, subsets[i], limits);
  });
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace darwinism::oracle
