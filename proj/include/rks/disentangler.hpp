#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rks/clifford.hpp"
#include "rks/states.hpp"

namespace rks {

enum class ScheduleKind { Constant, PowerLaw, Quadratic };

// beta(t) for t in [0, t_max):
//   Constant   beta0
//   PowerLaw   beta0 (t + 1)^param
//   Quadratic  beta0 + param t^2
struct AnnealSchedule {
  ScheduleKind kind = ScheduleKind::Constant;
  double beta0 = 400.0;
  double param = 0.0;
  std::size_t t_max = 1;

  static AnnealSchedule constant(double beta0, std::size_t t_max);
  static AnnealSchedule power_law(double beta0, double exponent, std::size_t t_max);
  static AnnealSchedule quadratic(double beta0, double coefficient, std::size_t t_max);

  double beta(std::size_t t) const noexcept;
  // Throws ConfigError when t_max is 0 or beta(t) can go negative.
  void validate() const;
  // e.g. "const(beta0=400)", "power(beta0=400;exponent=0.1)"; no
  // commas, so the descriptor is a single CSV field.
  std::string descriptor() const;
};

// Parses "const" / "power" / "quad".
ScheduleKind parse_schedule_kind(const std::string& name);

enum class CostKind {
  // Mean entropy of the N cyclic blocks {i, .., i + floor(N/2) - 1 mod N}.
  ContiguousBlocks,
  // Mean over every floor(N/2)-subset; N <= 8.
  AllHalfSubsets,
};

struct AnnealOptions {
  CostKind cost = CostKind::ContiguousBlocks;
  // Keep the cost after every step.
  bool record_trace = false;
  // Re-evaluate the whole cost after every proposal, single-qubit gates
  // included, and draw the Metropolis variable for them as well. Slow path
  // used to validate the incremental one.
  bool full_recompute = false;
};

struct AnnealOutcome {
  double s_initial = 0.0;  // bits, half bipartition {0..N/2-1}
  double s_final = 0.0;
  double cost_initial = 0.0;
  double cost_final = 0.0;
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  std::vector<CliffordGate> accepted_gates;
  std::vector<double> cost_trace;

  // S_f / S_i, undefined when S_i < kMinInitialEntropy.
  std::optional<double> ratio() const noexcept;
};

inline constexpr double kMinInitialEntropy = 1e-6;

// Metropolis search over Clifford gates minimizing the entanglement cost.
// Proposal: kind uniform over {H, S, CNOT}, then the qubit(s) uniformly
// (ordered distinct CNOT pairs). Accept when dS <= 0, otherwise with
// probability exp(-beta(t) dS). Single-qubit gates cannot change any
// bipartite entropy, so outside full_recompute they are accepted without
// evaluating the cost; after a CNOT only the cut blocks that separate its
// qubits are recomputed.
AnnealOutcome anneal(std::span<const Amplitude> initial, const AnnealSchedule& schedule, std::uint64_t seed,
                     const AnnealOptions& options = {}, ComplexState* final_state = nullptr);

// The cost function on its own, for tests and replay checks.
double entanglement_cost(std::span<const Amplitude> state, CostKind kind);

struct EfficiencyPoint {
  int n_qubits = 0;
  double lambda = 0.0;
  double eta_mean = 0.0;  // 1 - mean(S_f / S_i)
  double eta_stderr = 0.0;
  std::string schedule;
  std::size_t t_max = 0;
  std::size_t n_samples = 0;  // samples entering the mean
  std::size_t excluded = 0;   // S_i below kMinInitialEntropy
  std::uint64_t seed = 0;
};

// Throws NumericalError when every outcome is excluded.
EfficiencyPoint summarize_efficiency(std::span<const AnnealOutcome> outcomes);

// Annealer stream for sample s of the cell (N, lambda).
std::uint64_t anneal_seed(std::uint64_t master_seed, int n_qubits, double lambda, std::size_t sample);

// One point per lambda. Realizations are shared along the grid.
std::vector<EfficiencyPoint> efficiency_scan(const EnsembleParams& params, std::span<const double> lambda_grid,
                                             const AnnealSchedule& schedule, const AnnealOptions& options = {},
                                             unsigned workers = 1);

}  // namespace rks
