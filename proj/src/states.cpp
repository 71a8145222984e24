#include "rks/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rks/error.hpp"
#include "rks/rng.hpp"

namespace rks {

void check_capacity(int n_qubits, int max_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("n_qubits must be >= 1, got " + std::to_string(n_qubits));
  if (n_qubits > std::min(max_qubits, kAbsoluteMaxQubits))
    throw CapacityError("n_qubits = " + std::to_string(n_qubits) + " exceeds the qubit cap of " +
                        std::to_string(std::min(max_qubits, kAbsoluteMaxQubits)));
}

void EnsembleParams::validate() const {
  check_capacity(n_qubits, max_qubits);
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("lambda must be finite and >= 0");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
}

std::uint64_t sample_seed(std::uint64_t master_seed, int n_qubits, std::size_t index) noexcept {
  return derive_seed(master_seed, static_cast<std::uint64_t>(n_qubits), static_cast<std::uint64_t>(index));
}

DisorderRealization draw_realization(const EnsembleParams& params, std::size_t sample_index) {
  params.validate();
  if (sample_index >= params.n_samples)
    throw std::out_of_range("sample_index " + std::to_string(sample_index) + " >= n_samples");
  return draw_realization(params.n_qubits, sample_seed(params.master_seed, params.n_qubits, sample_index));
}

DisorderRealization draw_realization(int n_qubits, std::uint64_t seed) {
  check_capacity(n_qubits, kAbsoluteMaxQubits);
  const std::size_t dim = std::size_t{1} << n_qubits;
  DisorderRealization r;
  r.n_qubits = n_qubits;
  r.seed = seed;
  r.energies.resize(dim);
  r.signs.resize(dim);

  Xoshiro256ss rng(seed);
  NormalSampler normal;
  const double sigma = std::sqrt(static_cast<double>(n_qubits));
  for (auto& e : r.energies) e = sigma * normal(rng);
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    if (i % 64 == 0) bits = rng();
    r.signs[i] = (bits >> (i % 64)) & 1 ? std::int8_t{1} : std::int8_t{-1};
  }
  return r;
}

double log_partition(std::span<const double> energies, double beta) {
  if (energies.empty()) return -std::numeric_limits<double>::infinity();
  double top = -std::numeric_limits<double>::infinity();
  for (double e : energies) top = std::max(top, -beta * e);
  double sum = 0.0;
  for (double e : energies) sum += std::exp(-beta * e - top);
  return top + std::log(sum);
}

RkState build_state(const DisorderRealization& realization, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
  const auto& energies = realization.energies;
  const double half_log_z = 0.5 * log_partition(energies, 2.0 * lambda);

  RkState s;
  s.n_qubits = realization.n_qubits;
  s.lambda = lambda;
  s.realization_seed = realization.seed;
  s.amplitudes.resize(energies.size());
  for (std::size_t i = 0; i < energies.size(); ++i)
    s.amplitudes[i] = realization.signs[i] * std::exp(-lambda * energies[i] - half_log_z);
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double overlap(const RkState& a, const RkState& b) {
  if (a.n_qubits != b.n_qubits || a.dim() != b.dim())
    throw std::invalid_argument("overlap: states have different qubit counts");
  return dot(a.amplitudes, b.amplitudes);
}

}  // namespace rks
