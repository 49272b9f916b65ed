#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "darwinism/entropy.hpp"
#include "darwinism/model.hpp"

namespace darwinism::oracle {

/// Size limits for the dense simulator.
struct OracleLimits {
  int max_env_qubits = 14;
  int max_matrix_qubits = 12;

  /// Defaults, with max_env_qubits taken from DARWINISM_ORACLE_CAP when set.
  static OracleLimits from_environment();
};

class OracleCapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

enum class SpinRole { kGood, kBad };

struct EnvSpin {
  SpinRole role = SpinRole::kBad;
  std::complex<double> gamma{1.0, 0.0};  // <e_k^0|e_k^1>
};

using Complex = std::complex<double>;
using QubitSet = std::vector<int>;

/// Pure state of one system qubit and N environment spins.
///
/// Basis index bit q is qubit q; qubit 0 is the system, qubit k + 1 is
/// environment spin k. The pointer basis is the z basis of qubit 0.
class DenseState {
 public:
  DenseState(Eigen::VectorXcd amplitudes, std::vector<EnvSpin> spins,
             const OracleLimits& limits = {});

  int num_env() const { return static_cast<int>(spins_.size()); }
  int num_qubits() const { return num_env() + 1; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  std::span<const EnvSpin> spins() const { return spins_; }

  /// Environment-only amplitudes of the pointer branch s (unnormalised).
  Eigen::VectorXcd branch(int s) const;

 private:
  Eigen::VectorXcd amplitudes_;
  std::vector<EnvSpin> spins_;
};

/// Hermitian unit-trace matrix over a sorted set of qubits.
struct DensityMatrix {
  QubitSet qubits;
  Eigen::MatrixXcd rho;
};

/// sqrt(p0)|0>(x)_k|e_k^0> + sqrt(p1)|1>(x)_k|e_k^1> with |e_k^0> = |0> and
/// |e_k^1> = gamma_k|0> + sqrt(1 - |gamma_k|^2)|1>. Spins with |gamma_k| = 1
/// are labelled bad, the rest good.
DenseState build_branch_state(double p0, std::span<const Complex> gammas,
                              const OracleLimits& limits = {});

/// Per-spin overlaps for an EnvironmentSpec: sqrt(gamma2_good) for each good
/// spin followed by sqrt(gamma2_bad) for each bad spin.
std::vector<Complex> spec_gammas(const EnvironmentSpec& spec);

/// build_branch_state for an EnvironmentSpec, good spins first.
DenseState build_spec_state(const EnvironmentSpec& spec, const OracleLimits& limits = {});

/// Evolves (|0> + |1>)/sqrt2 (x) spins under H = sum_k g_k sz_S sz_k for time
/// t. Spins with g_k != 0 start in |+> and are labelled good; uncoupled
/// spins start in |0>. The Hamiltonian is diagonal, so each basis amplitude
/// just picks up its phase. Branch overlaps come out as cos(2 g_k t).
DenseState evolve_pure_decoherence(std::span<const double> couplings, double t,
                                   const OracleLimits& limits = {});

/// Applies local unitaries (one per spin, plus a system phase) that take a
/// branch state to the canonical frame of build_branch_state with real
/// non-negative overlaps. Each spin's conditional states are read off the
/// dominant eigenvectors of its branch-conditional reduced state.
DenseState align_to_branch_frame(const DenseState& state);

/// |<a|b>|^2.
double fidelity(const DenseState& a, const DenseState& b);

/// Partial trace onto `subset` (qubit ids, any order; result sorted).
DensityMatrix reduced_density(const DenseState& state, const QubitSet& subset,
                              const OracleLimits& limits = {});

/// von Neumann entropy in bits; eigenvalues below 1e-12 contribute 0.
Bits von_neumann_entropy(const Eigen::MatrixXcd& rho);

/// Entropy of `subset` of a pure state over `num_qubits` qubits, computed on
/// whichever side of the cut is smaller.
Bits pure_state_entropy(const Eigen::VectorXcd& psi, int num_qubits, const QubitSet& subset,
                        const OracleLimits& limits = {});

/// I(S:F) = H_S + H_F - H_SF. `fragment` holds environment qubit ids (1..N).
Bits mutual_information(const DenseState& state, const QubitSet& fragment,
                        const OracleLimits& limits = {});

struct HolevoDiscord {
  Bits chi = 0.0;
  Bits discord = 0.0;
  Bits mutual_information = 0.0;
};

/// Holevo quantity of the z-basis measurement on the system and the
/// remaining discord D = I - chi.
HolevoDiscord holevo_and_discord(const DenseState& state, const QubitSet& fragment,
                                 const OracleLimits& limits = {});

enum class FragmentQuantity { kMutualInformation, kHolevo };

/// Unweighted mean over every environment subset of the given size.
Bits all_fragment_average(const DenseState& state, int fragment_size, FragmentQuantity quantity,
                          const OracleLimits& limits = {});

/// All size-k subsets of environment qubit ids {1..n_env}, in lexicographic order.
std::vector<QubitSet> env_subsets(int n_env, int k);

}  // namespace darwinism::oracle
