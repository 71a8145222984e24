#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rks/states.hpp"

namespace rks {

// |<psi_j|psi_k>| for j < k, row-major over j.
struct OverlapTable {
  std::size_t k = 0;
  std::vector<double> abs_overlap;

  double at(std::size_t j, std::size_t l) const;  // j != l
};

// Amplitude inner products through one Gram matrix product.
OverlapTable pairwise_overlaps(std::span<const RkState> ensemble);

struct FrameMoment {
  int t = 0;
  double phi = 0.0;        // (1/K^2) sum_{j,k} |<j|k>|^{2t}, diagonal included
  double phi_tilde = 0.0;  // phi - 1/K
  double phi_tilde_stderr = 0.0;
};

// Standard error from the variance of a U-statistic of order two.
FrameMoment frame_potential(const OverlapTable& overlaps, int t);

// ln binomial(d + t - 1, t), d = 2^N. Natural log.
double design_benchmark(int n_qubits, int t);

struct FramePotentialResult {
  int n_qubits = 0;
  double lambda = 0.0;
  int t = 0;
  double log_phi_tilde_dt = 0.0;  // ln(phi_tilde D_t)
  double log_stderr = 0.0;        // stderr(phi_tilde) / phi_tilde
  std::size_t k = 0;
  std::uint64_t seed = 0;
};

// K = params.n_samples states per lambda, realizations shared along the grid.
// Rows ordered by lambda, then t.
std::vector<FramePotentialResult> design_scan(const EnsembleParams& params, std::span<const double> lambda_grid,
                                              std::span<const int> t_list, unsigned workers = 1);

}  // namespace rks
