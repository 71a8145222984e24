#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rks/states.hpp"

namespace rks {

// Subset A of the qubits {0..N-1}; B is the complement. Both sides nonempty.
class Bipartition {
 public:
  Bipartition(int n_qubits, std::vector<int> subset_a);

  // A = {0, .., N/2 - 1}.
  static Bipartition half(int n_qubits);
  // A = {first, first+1, .., first+size-1} modulo N.
  static Bipartition contiguous(int n_qubits, int first, int size);

  int n_qubits() const noexcept { return n_qubits_; }
  const std::vector<int>& subset_a() const noexcept { return a_; }
  const std::vector<int>& subset_b() const noexcept { return b_; }
  int size_a() const noexcept { return static_cast<int>(a_.size()); }
  int size_b() const noexcept { return static_cast<int>(b_.size()); }
  Bipartition complement() const { return Bipartition(n_qubits_, b_); }
  bool separates(int q0, int q1) const noexcept;

  friend bool operator==(const Bipartition&, const Bipartition&) = default;

 private:
  int n_qubits_;
  std::vector<int> a_;
  std::vector<int> b_;
};

struct EntanglementSpectrum {
  std::vector<double> eigenvalues;  // ascending, clamped at zero, length 2^|A|
  Bipartition part;
  double lambda = 0.0;
  std::uint64_t seed = 0;
};

// Amplitudes reshaped to a 2^|A| x 2^|B| matrix (A qubits index the rows).
Eigen::MatrixXd amplitude_matrix(std::span<const double> amplitudes, const Bipartition& part);
Eigen::MatrixXcd amplitude_matrix(std::span<const std::complex<double>> amplitudes, const Bipartition& part);

Eigen::MatrixXd reduced_density_matrix(const RkState& state, const Bipartition& part);
Eigen::MatrixXd reduced_density_matrix(std::span<const double> amplitudes, const Bipartition& part);
Eigen::MatrixXcd reduced_density_matrix(std::span<const std::complex<double>> amplitudes, const Bipartition& part);

// Eigenvalues of rho_A. The smaller side is diagonalized and padded with
// zeros when |A| > |B|. Throws NumericalError (carrying `seed`) if the
// eigensolver fails or an eigenvalue is below -1e-10.
std::vector<double> spectrum_values(std::span<const double> amplitudes, const Bipartition& part,
                                    std::uint64_t seed = 0);
std::vector<double> spectrum_values(std::span<const std::complex<double>> amplitudes, const Bipartition& part,
                                    std::uint64_t seed = 0);
EntanglementSpectrum spectrum(const RkState& state, const Bipartition& part);

// -sum a log2 a, with 0 log 0 = 0.
double von_neumann_entropy(std::span<const double> eigenvalues);
double von_neumann_entropy(const EntanglementSpectrum& spec);

// Shorthand for entropy(spectrum(...)) in bits.
double entanglement_entropy(std::span<const double> amplitudes, const Bipartition& part);
double entanglement_entropy(std::span<const std::complex<double>> amplitudes, const Bipartition& part);

}  // namespace rks
