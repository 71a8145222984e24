#include "rks/clifford.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rks/rng.hpp"

namespace rks {

CliffordGate CliffordGate::inverse() const noexcept {
  switch (kind) {
    case GateKind::S: return sdg(q0);
    case GateKind::Sdg: return s(q0);
    default: return *this;
  }
}

void CliffordGate::validate(int n_qubits) const {
  auto in_range = [&](int q) { return q >= 0 && q < n_qubits; };
  if (!in_range(q0)) throw std::out_of_range("gate qubit " + std::to_string(q0) + " out of range");
  if (kind == GateKind::CNOT) {
    if (!in_range(q1)) throw std::out_of_range("CNOT target " + std::to_string(q1) + " out of range");
    if (q0 == q1) throw std::out_of_range("CNOT control equals target");
  }
}

std::string CliffordGate::to_string() const {
  switch (kind) {
    case GateKind::H: return "H " + std::to_string(q0);
    case GateKind::S: return "S " + std::to_string(q0);
    case GateKind::Sdg: return "Sdg " + std::to_string(q0);
    case GateKind::CNOT: return "CNOT " + std::to_string(q0) + " " + std::to_string(q1);
  }
  return {};
}

ComplexState to_complex(std::span<const double> amplitudes) {
  return ComplexState(amplitudes.begin(), amplitudes.end());
}

void apply_gate(std::span<Amplitude> state, const CliffordGate& gate) {
  if (!std::has_single_bit(state.size())) throw std::invalid_argument("state size must be a power of two");
  gate.validate(std::countr_zero(state.size()));
  const std::size_t dim = state.size();
  const std::size_t m0 = std::size_t{1} << gate.q0;
  switch (gate.kind) {
    case GateKind::H: {
      constexpr double r = std::numbers::sqrt2 / 2.0;
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & m0) continue;
        const Amplitude a = state[i], b = state[i | m0];
        state[i] = (a + b) * r;
        state[i | m0] = (a - b) * r;
      }
      break;
    }
    case GateKind::S:
      for (std::size_t i = 0; i < dim; ++i)
        if (i & m0) state[i] = {-state[i].imag(), state[i].real()};
      break;
    case GateKind::Sdg:
      for (std::size_t i = 0; i < dim; ++i)
        if (i & m0) state[i] = {state[i].imag(), -state[i].real()};
      break;
    case GateKind::CNOT: {
      const std::size_t m1 = std::size_t{1} << gate.q1;
      for (std::size_t i = 0; i < dim; ++i)
        if ((i & m0) && !(i & m1)) std::swap(state[i], state[i | m1]);
      break;
    }
  }
}

void apply_circuit(std::span<Amplitude> state, std::span<const CliffordGate> circuit) {
  for (const auto& g : circuit) apply_gate(state, g);
}

std::vector<CliffordGate> random_clifford_circuit(int n_qubits, std::size_t depth, std::uint64_t seed) {
  if (n_qubits < 1) throw std::invalid_argument("random_clifford_circuit: need at least one qubit");
  Xoshiro256ss rng(seed);
  const auto n = static_cast<std::uint64_t>(n_qubits);
  std::vector<CliffordGate> out;
  out.reserve(depth);
  while (out.size() < depth) {
    const auto kind = rng.below(n_qubits > 1 ? 3 : 2);
    const int q = static_cast<int>(rng.below(n));
    if (kind == 0) {
      out.push_back(CliffordGate::h(q));
    } else if (kind == 1) {
      out.push_back(CliffordGate::s(q));
    } else {
      int t = static_cast<int>(rng.below(n - 1));
      if (t >= q) ++t;
      out.push_back(CliffordGate::cnot(q, t));
    }
  }
  return out;
}

}  // namespace rks
