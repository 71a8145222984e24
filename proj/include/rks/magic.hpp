#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rks/states.hpp"

namespace rks {

// X^x Z^z up to the phase that makes it Hermitian; qubit q carries
// Y when bit q is set in both masks.
struct PauliString {
  std::uint64_t x_mask = 0;
  std::uint64_t z_mask = 0;

  int y_count() const noexcept;
  // One letter per qubit from {I, X, Y, Z}; label[q] acts on qubit q.
  static PauliString from_label(std::string_view label);
  void check_width(int n_qubits) const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
};

// <psi|P|psi> in O(2^N). Exactly zero for real states and odd Y count.
double pauli_expectation(std::span<const double> amplitudes, const PauliString& p);
double pauli_expectation(std::span<const std::complex<double>> amplitudes, const PauliString& p);
double pauli_expectation(const RkState& state, const PauliString& p);

enum class PauliPath {
  // One Walsh-Hadamard transform per x mask, O(N 4^N).
  WalshHadamard,
  // Independent O(2^N) sum per string, O(8^N); reference only.
  Direct,
};

inline constexpr int kDefaultMagicMaxQubits = 12;

struct MagicOptions {
  PauliPath path = PauliPath::WalshHadamard;
  // Real input only: strings with an odd number of Y are set to zero
  // instead of evaluated.
  bool skip_odd_y = true;
  int max_qubits = kDefaultMagicMaxQubits;
  unsigned workers = 1;
};

// sum_P <P>^2 (equals 2^N on pure states) and sum_P <P>^4. Per-x partial
// sums are reduced in x order, so results do not depend on `workers`.
struct PauliMoments {
  double sum_sq = 0.0;
  double sum_fourth = 0.0;
};

PauliMoments pauli_moments(std::span<const double> amplitudes, const MagicOptions& options = {});
PauliMoments pauli_moments(std::span<const std::complex<double>> amplitudes, const MagicOptions& options = {});

// M2 = N - log2 sum_P <P>^4, in bits.
double stabilizer_renyi_2(std::span<const double> amplitudes, const MagicOptions& options = {});
double stabilizer_renyi_2(std::span<const std::complex<double>> amplitudes, const MagicOptions& options = {});
double stabilizer_renyi_2(const RkState& state, const MagicOptions& options = {});

struct MagicResult {
  int n_qubits = 0;
  double lambda = 0.0;
  double m2_mean = 0.0;
  double m2_stderr = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> per_sample;
};

// One result per lambda; realizations shared along the grid. Sample-level
// parallelism; each M2 evaluation runs single-threaded.
std::vector<MagicResult> magic_scan(const EnsembleParams& params, std::span<const double> lambda_grid,
                                    const MagicOptions& options = {});

}  // namespace rks
