#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rks/states.hpp"

namespace rks {

// Overlaps between two states built from the same realization reduce to
// partition sums of the shared energy list (the signs square away):
//   <psi(l1)|psi(l2)> = Z_{l1+l2} / sqrt(Z_{2 l1} Z_{2 l2}),  Z_b = sum exp(-b E).
double log_overlap_same_realization(const DisorderRealization& realization, double lambda1, double lambda2);

// f(l1, l2) = |<psi(l1)|psi(l2)>|^2 via the partition-sum route.
double fidelity(const DisorderRealization& realization, double lambda1, double lambda2);
// 1 - f without cancellation.
double infidelity(const DisorderRealization& realization, double lambda1, double lambda2);

// Variance of E under the Boltzmann weights exp(-2 lambda E) / Z. Equals the
// fidelity metric of the realization exactly.
double energy_variance(const DisorderRealization& realization, double lambda);

enum class DifferenceScheme {
  // -1/2 [f(l, l+e) - 2 + f(l, l-e)] / e^2, error O(e^2).
  Central,
  // -1/2 [f(l, l+2e) - 2 f(l, l+e) + 1] / e^2, error O(e).
  Forward,
};

inline constexpr double kDefaultEpsilon = 1e-3;

struct MetricEstimate {
  double value = 0.0;
  // Set when 1 - f(l, l+e) < 1e-13, i.e. the second difference is dominated
  // by rounding.
  bool cancellation_warning = false;
};

MetricEstimate fidelity_metric_fd(const DisorderRealization& realization, double lambda,
                                  double epsilon = kDefaultEpsilon,
                                  DifferenceScheme scheme = DifferenceScheme::Central);

struct FidelityScanPoint {
  double lambda = 0.0;
  double g_over_n = 0.0;
  double g_stderr = 0.0;
  int n_qubits = 0;
  std::size_t n_samples = 0;
  double epsilon = kDefaultEpsilon;
  std::size_t warnings = 0;
};

// Mean and standard error of g/N over params.n_samples realizations, the same
// realizations being reused at every grid point. params.lambda is ignored.
std::vector<FidelityScanPoint> fidelity_scan(const EnsembleParams& params, std::span<const double> lambda_grid,
                                             double epsilon = kDefaultEpsilon,
                                             DifferenceScheme scheme = DifferenceScheme::Central,
                                             unsigned workers = 1);

}  // namespace rks
