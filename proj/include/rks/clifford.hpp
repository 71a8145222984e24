#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rks {

using Amplitude = std::complex<double>;
using ComplexState = std::vector<Amplitude>;

enum class GateKind : std::uint8_t { H, S, Sdg, CNOT };

struct CliffordGate {
  GateKind kind = GateKind::H;
  int q0 = 0;   // target of single-qubit gates, control of CNOT
  int q1 = -1;  // CNOT target

  static CliffordGate h(int q) { return {GateKind::H, q, -1}; }
  static CliffordGate s(int q) { return {GateKind::S, q, -1}; }
  static CliffordGate sdg(int q) { return {GateKind::Sdg, q, -1}; }
  static CliffordGate cnot(int control, int target) { return {GateKind::CNOT, control, target}; }

  bool is_two_qubit() const noexcept { return kind == GateKind::CNOT; }
  CliffordGate inverse() const noexcept;
  // Throws std::out_of_range for qubits outside [0, n) or control == target.
  void validate(int n_qubits) const;
  std::string to_string() const;

  friend bool operator==(const CliffordGate&, const CliffordGate&) = default;
};

ComplexState to_complex(std::span<const double> amplitudes);

// In-place O(2^N) update. H mixes with 1/sqrt(2), S multiplies the |1>
// component by i, S^dagger by -i, CNOT swaps amplitude pairs.
void apply_gate(std::span<Amplitude> state, const CliffordGate& gate);
void apply_circuit(std::span<Amplitude> state, std::span<const CliffordGate> circuit);

// `depth` gates, kind uniform over {H, S, CNOT}, qubits uniform.
std::vector<CliffordGate> random_clifford_circuit(int n_qubits, std::size_t depth, std::uint64_t seed);

}  // namespace rks
