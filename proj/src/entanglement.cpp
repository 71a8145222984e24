#include "rks/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rks/error.hpp"

namespace rks {

namespace {

constexpr double kNegativeTolerance = 1e-10;

std::vector<int> complement_of(int n, const std::vector<int>& a) {
  std::vector<int> b;
  for (int q = 0; q < n; ++q)
    if (!std::binary_search(a.begin(), a.end(), q)) b.push_back(q);
  return b;
}

// Row/column index of basis state `s` after moving the qubits of `part`
// into the leading (row) position.
inline std::size_t gather_bits(std::size_t s, const std::vector<int>& qubits) noexcept {
  std::size_t out = 0;
  for (std::size_t j = 0; j < qubits.size(); ++j) out |= ((s >> qubits[j]) & 1u) << j;
  return out;
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> reshape(std::span<const Scalar> amps, const Bipartition& part) {
  const std::size_t dim = std::size_t{1} << part.n_qubits();
  if (amps.size() != dim)
    throw std::invalid_argument("amplitude vector has length " + std::to_string(amps.size()) + ", expected " +
                                std::to_string(dim));
  const auto rows = Eigen::Index{1} << part.size_a();
  const auto cols = Eigen::Index{1} << part.size_b();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(rows, cols);
  // Split the index remap into per-side lookup tables over the low and high
  // halves of the basis index.
  const int n = part.n_qubits();
  const int low_bits = n / 2;
  const std::size_t low_size = std::size_t{1} << low_bits;
  const std::size_t high_size = std::size_t{1} << (n - low_bits);
  std::vector<std::size_t> row_low(low_size), col_low(low_size), row_high(high_size), col_high(high_size);
  for (std::size_t s = 0; s < low_size; ++s) {
    row_low[s] = gather_bits(s, part.subset_a());
    col_low[s] = gather_bits(s, part.subset_b());
  }
  for (std::size_t s = 0; s < high_size; ++s) {
    row_high[s] = gather_bits(s << low_bits, part.subset_a());
    col_high[s] = gather_bits(s << low_bits, part.subset_b());
  }
  for (std::size_t h = 0; h < high_size; ++h)
    for (std::size_t l = 0; l < low_size; ++l) {
      const std::size_t s = (h << low_bits) | l;
      m(static_cast<Eigen::Index>(row_high[h] | row_low[l]), static_cast<Eigen::Index>(col_high[h] | col_low[l])) =
          amps[s];
    }
  return m;
}

template <class Scalar>
std::vector<double> spectrum_impl(std::span<const Scalar> amps, const Bipartition& part, std::uint64_t seed) {
  const bool swap_sides = part.size_a() > part.size_b();
  const Bipartition& small = swap_sides ? part.complement() : part;
  const auto m = reshape<Scalar>(amps, small);
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix rho = Matrix::Zero(m.rows(), m.rows());
  rho.template triangularView<Eigen::Lower>() = m * m.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho, Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev;
  if (solver.info() == Eigen::Success) {
    ev = solver.eigenvalues();
  } else {
    // The tridiagonal QR iteration can stall on strongly degenerate
    // spectra; squared singular values of the amplitude matrix are the same
    // Schmidt weights.
    Eigen::JacobiSVD<Matrix> svd(m);
    ev = svd.singularValues().cwiseAbs2();
    if (!ev.allFinite())
      throw NumericalError("eigensolver did not converge for realization seed " + std::to_string(seed), seed);
  }

  const std::size_t full = std::size_t{1} << part.size_a();
  std::vector<double> values(full, 0.0);
  const std::size_t offset = full - static_cast<std::size_t>(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double v = ev[i];
    if (v < -kNegativeTolerance)
      throw NumericalError("reduced density matrix eigenvalue " + std::to_string(v) +
                               " below tolerance for realization seed " + std::to_string(seed),
                           seed);
    values[offset + static_cast<std::size_t>(i)] = std::max(v, 0.0);
  }
  std::sort(values.begin(), values.end());
  return values;
}

}  // namespace

Bipartition::Bipartition(int n_qubits, std::vector<int> subset_a) : n_qubits_(n_qubits), a_(std::move(subset_a)) {
  if (n_qubits < 2) throw std::invalid_argument("bipartition needs at least two qubits");
  std::sort(a_.begin(), a_.end());
  if (a_.empty() || static_cast<int>(a_.size()) >= n_qubits)
    throw std::invalid_argument("subset A must be a nonempty proper subset");
  if (std::adjacent_find(a_.begin(), a_.end()) != a_.end())
    throw std::invalid_argument("subset A has repeated qubit indices");
  if (a_.front() < 0 || a_.back() >= n_qubits) throw std::invalid_argument("subset A index out of range");
  b_ = complement_of(n_qubits, a_);
}

Bipartition Bipartition::half(int n_qubits) {
  std::vector<int> a(static_cast<std::size_t>(n_qubits / 2));
  std::iota(a.begin(), a.end(), 0);
  return Bipartition(n_qubits, std::move(a));
}

Bipartition Bipartition::contiguous(int n_qubits, int first, int size) {
  std::vector<int> a;
  for (int k = 0; k < size; ++k) a.push_back(((first + k) % n_qubits + n_qubits) % n_qubits);
  return Bipartition(n_qubits, std::move(a));
}

bool Bipartition::separates(int q0, int q1) const noexcept {
  const bool in0 = std::binary_search(a_.begin(), a_.end(), q0);
  const bool in1 = std::binary_search(a_.begin(), a_.end(), q1);
  return in0 != in1;
}

Eigen::MatrixXd amplitude_matrix(std::span<const double> amplitudes, const Bipartition& part) {
  return reshape<double>(amplitudes, part);
}

Eigen::MatrixXcd amplitude_matrix(std::span<const std::complex<double>> amplitudes, const Bipartition& part) {
  return reshape<std::complex<double>>(amplitudes, part);
}

Eigen::MatrixXd reduced_density_matrix(std::span<const double> amplitudes, const Bipartition& part) {
  const auto m = reshape<double>(amplitudes, part);
  return m * m.transpose();
}

Eigen::MatrixXd reduced_density_matrix(const RkState& state, const Bipartition& part) {
  if (state.n_qubits != part.n_qubits()) throw std::invalid_argument("bipartition / state qubit count mismatch");
  return reduced_density_matrix(std::span<const double>(state.amplitudes), part);
}

Eigen::MatrixXcd reduced_density_matrix(std::span<const std::complex<double>> amplitudes, const Bipartition& part) {
  const auto m = reshape<std::complex<double>>(amplitudes, part);
  return m * m.adjoint();
}

std::vector<double> spectrum_values(std::span<const double> amplitudes, const Bipartition& part, std::uint64_t seed) {
  return spectrum_impl<double>(amplitudes, part, seed);
}

std::vector<double> spectrum_values(std::span<const std::complex<double>> amplitudes, const Bipartition& part,
                                    std::uint64_t seed) {
  return spectrum_impl<std::complex<double>>(amplitudes, part, seed);
}

EntanglementSpectrum spectrum(const RkState& state, const Bipartition& part) {
  if (state.n_qubits != part.n_qubits()) throw std::invalid_argument("bipartition / state qubit count mismatch");
  return EntanglementSpectrum{spectrum_values(std::span<const double>(state.amplitudes), part,
                                              state.realization_seed),
                              part, state.lambda, state.realization_seed};
}

double von_neumann_entropy(std::span<const double> eigenvalues) {
  double s = 0.0;
  for (double a : eigenvalues)
    if (a > 0.0) s -= a * std::log2(a);
  return std::max(s, 0.0);
}

double von_neumann_entropy(const EntanglementSpectrum& spec) { return von_neumann_entropy(spec.eigenvalues); }

double entanglement_entropy(std::span<const double> amplitudes, const Bipartition& part) {
  return von_neumann_entropy(spectrum_values(amplitudes, part));
}

double entanglement_entropy(std::span<const std::complex<double>> amplitudes, const Bipartition& part) {
  return von_neumann_entropy(spectrum_values(amplitudes, part));
}

}  // namespace rks
