#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rks {

inline constexpr int kDefaultMaxQubits = 20;
// Hard ceiling regardless of configuration (2^30 amplitudes = 8 GiB).
inline constexpr int kAbsoluteMaxQubits = 30;

// Ensemble of RK-sign wavefunctions at one control parameter.
struct EnsembleParams {
  int n_qubits = 1;
  double lambda = 0.0;
  std::size_t n_samples = 1;
  std::uint64_t master_seed = 0;
  int max_qubits = kDefaultMaxQubits;

  // Throws std::invalid_argument / CapacityError.
  void validate() const;
};

// Frozen disorder: REM energies E ~ N(0, N) and uniform signs W = +-1, one per
// computational basis state. Independent of lambda, so one realization can be
// evaluated along a whole lambda grid.
struct DisorderRealization {
  int n_qubits = 0;
  std::vector<double> energies;
  std::vector<std::int8_t> signs;
  std::uint64_t seed = 0;

  std::size_t dim() const noexcept { return energies.size(); }
};

// Normalized real amplitude vector psi_s = W_s exp(-lambda E_s) / sqrt(Z).
// Basis index bit q holds the state of qubit q.
struct RkState {
  int n_qubits = 0;
  std::vector<double> amplitudes;
  double lambda = 0.0;
  std::uint64_t realization_seed = 0;

  std::size_t dim() const noexcept { return amplitudes.size(); }
};

// Seed of sample `index` of an N-qubit ensemble; pure function of its arguments.
std::uint64_t sample_seed(std::uint64_t master_seed, int n_qubits, std::size_t index) noexcept;

void check_capacity(int n_qubits, int max_qubits = kDefaultMaxQubits);

DisorderRealization draw_realization(const EnsembleParams& params, std::size_t sample_index);
DisorderRealization draw_realization(int n_qubits, std::uint64_t seed);

RkState build_state(const DisorderRealization& realization, double lambda);

// <a|b>; exactly symmetric in its arguments.
double overlap(const RkState& a, const RkState& b);
double dot(std::span<const double> a, std::span<const double> b);

// ln sum_s exp(-beta E_s), stable for any beta of either sign.
double log_partition(std::span<const double> energies, double beta);

}  // namespace rks
