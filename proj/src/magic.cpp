#include "rks/magic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rks/bits.hpp"
#include "rks/error.hpp"
#include "rks/parallel.hpp"
#include "rks/stats.hpp"

namespace rks {

namespace {

int qubits_of(std::size_t dim) {
  if (dim == 0 || !std::has_single_bit(dim)) throw std::invalid_argument("amplitude count must be a power of two");
  return std::countr_zero(dim);
}

// i^k for k mod 4.
std::complex<double> i_power(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

template <class T>
std::complex<double> raw_expectation(std::span<const T> psi, const PauliString& p) {
  CompensatedSum re, im;
  for (std::size_t s = 0; s < psi.size(); ++s) {
    const std::complex<double> term = std::conj(std::complex<double>(psi[s ^ p.x_mask])) * std::complex<double>(psi[s]);
    const double sign = odd_parity(s & p.z_mask) ? -1.0 : 1.0;
    re.add(sign * term.real());
    im.add(sign * term.imag());
  }
  return {re.value(), im.value()};
}

template <class T>
double expectation(std::span<const T> psi, const PauliString& p) {
  p.check_width(qubits_of(psi.size()));
  return (i_power(popcount(p.x_mask & p.z_mask)) * raw_expectation(psi, p)).real();
}

constexpr bool is_real_v(double) { return true; }
constexpr bool is_real_v(std::complex<double>) { return false; }

// Per-x contributions to sum <P>^2 and sum <P>^4.
template <class T>
void accumulate_x(std::span<const T> psi, std::uint64_t x, const MagicOptions& options, std::vector<T>& work,
                  double& sq, double& fourth) {
  const std::size_t dim = psi.size();
  CompensatedSum s2, s4;
  if (options.path == PauliPath::WalshHadamard) {
    for (std::size_t s = 0; s < dim; ++s) {
      if constexpr (std::is_same_v<T, double>)
        work[s] = psi[s ^ x] * psi[s];
      else
        work[s] = std::conj(psi[s ^ x]) * psi[s];
    }
    walsh_hadamard(std::span<T>(work));
    for (std::size_t z = 0; z < dim; ++z) {
      if (is_real_v(T{}) && options.skip_odd_y && odd_parity(x & z)) continue;
      const double a2 = std::norm(std::complex<double>(work[z]));
      s2.add(a2);
      s4.add(a2 * a2);
    }
  } else {
    for (std::size_t z = 0; z < dim; ++z) {
      if (is_real_v(T{}) && options.skip_odd_y && odd_parity(x & z)) continue;
      const double e = (i_power(popcount(x & z)) * raw_expectation(psi, PauliString{x, z})).real();
      s2.add(e * e);
      s4.add(e * e * e * e);
    }
  }
  sq = s2.value();
  fourth = s4.value();
}

template <class T>
PauliMoments moments(std::span<const T> psi, const MagicOptions& options) {
  const int n = qubits_of(psi.size());
  if (n > options.max_qubits)
    throw CapacityError("stabilizer entropy: N = " + std::to_string(n) + " exceeds the cap of " +
                        std::to_string(options.max_qubits) + " qubits");
  const std::size_t dim = psi.size();
  std::vector<double> sq(dim), fourth(dim);
  const unsigned workers = std::max(1u, options.workers);
  // x masks are dealt out in contiguous blocks, one scratch buffer per block.
  const std::size_t blocks = std::min<std::size_t>(dim, static_cast<std::size_t>(workers) * 8);
  parallel_for(blocks, workers, [&](std::size_t b) {
    std::vector<T> work(dim);
    const std::size_t lo = dim * b / blocks, hi = dim * (b + 1) / blocks;
    for (std::size_t x = lo; x < hi; ++x) accumulate_x(psi, x, options, work, sq[x], fourth[x]);
  });
  CompensatedSum total_sq, total_fourth;
  for (std::size_t x = 0; x < dim; ++x) {
    total_sq.add(sq[x]);
    total_fourth.add(fourth[x]);
  }
  return {total_sq.value(), total_fourth.value()};
}

double m2_from_moments(int n, const PauliMoments& m) { return n - std::log2(m.sum_fourth); }

}  // namespace

int PauliString::y_count() const noexcept { return popcount(x_mask & z_mask); }

PauliString PauliString::from_label(std::string_view label) {
  if (label.size() > 64) throw std::invalid_argument("Pauli label longer than 64 qubits");
  PauliString p;
  for (std::size_t q = 0; q < label.size(); ++q) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    switch (label[q]) {
      case 'I': break;
      case 'X': p.x_mask |= bit; break;
      case 'Z': p.z_mask |= bit; break;
      case 'Y':
        p.x_mask |= bit;
        p.z_mask |= bit;
        break;
      default: throw std::invalid_argument("Pauli label: unexpected character '" + std::string(1, label[q]) + "'");
    }
  }
  return p;
}

void PauliString::check_width(int n_qubits) const {
  const std::uint64_t mask = n_qubits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_qubits) - 1;
  if ((x_mask | z_mask) & ~mask)
    throw std::invalid_argument("Pauli string acts outside " + std::to_string(n_qubits) + " qubits");
}

double pauli_expectation(std::span<const double> amplitudes, const PauliString& p) {
  return expectation(amplitudes, p);
}
double pauli_expectation(std::span<const std::complex<double>> amplitudes, const PauliString& p) {
  return expectation(amplitudes, p);
}
double pauli_expectation(const RkState& state, const PauliString& p) {
  return expectation(std::span<const double>(state.amplitudes), p);
}

PauliMoments pauli_moments(std::span<const double> amplitudes, const MagicOptions& options) {
  return moments(amplitudes, options);
}
PauliMoments pauli_moments(std::span<const std::complex<double>> amplitudes, const MagicOptions& options) {
  return moments(amplitudes, options);
}

double stabilizer_renyi_2(std::span<const double> amplitudes, const MagicOptions& options) {
  return m2_from_moments(qubits_of(amplitudes.size()), moments(amplitudes, options));
}
double stabilizer_renyi_2(std::span<const std::complex<double>> amplitudes, const MagicOptions& options) {
  return m2_from_moments(qubits_of(amplitudes.size()), moments(amplitudes, options));
}
double stabilizer_renyi_2(const RkState& state, const MagicOptions& options) {
  return stabilizer_renyi_2(std::span<const double>(state.amplitudes), options);
}

std::vector<MagicResult> magic_scan(const EnsembleParams& params, std::span<const double> lambda_grid,
                                    const MagicOptions& options) {
  params.validate();
  if (params.n_qubits > options.max_qubits)
    throw CapacityError("magic scan: N = " + std::to_string(params.n_qubits) + " exceeds the cap of " +
                        std::to_string(options.max_qubits) + " qubits");
  std::vector<MagicResult> out(lambda_grid.size());
  for (std::size_t l = 0; l < lambda_grid.size(); ++l) {
    out[l].n_qubits = params.n_qubits;
    out[l].lambda = lambda_grid[l];
    out[l].n_samples = params.n_samples;
    out[l].seed = params.master_seed;
    out[l].per_sample.resize(params.n_samples);
  }
  MagicOptions single = options;
  single.workers = 1;
  parallel_for(params.n_samples, options.workers, [&](std::size_t s) {
    const auto realization = draw_realization(params, s);
    for (std::size_t l = 0; l < lambda_grid.size(); ++l)
      out[l].per_sample[s] = stabilizer_renyi_2(build_state(realization, lambda_grid[l]), single);
  });
  for (auto& r : out) {
    const auto summary = summarize(r.per_sample);
    r.m2_mean = summary.mean;
    r.m2_stderr = summary.stderr_mean;
  }
  return out;
}

}  // namespace rks
