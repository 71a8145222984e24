#include "rks/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rks/parallel.hpp"
#include "rks/stats.hpp"

namespace rks {

namespace {
constexpr double kCancellationFloor = 1e-13;
}

double log_overlap_same_realization(const DisorderRealization& realization, double lambda1, double lambda2) {
  const auto& e = realization.energies;
  return log_partition(e, lambda1 + lambda2) - 0.5 * log_partition(e, 2.0 * lambda1) -
         0.5 * log_partition(e, 2.0 * lambda2);
}

double fidelity(const DisorderRealization& realization, double lambda1, double lambda2) {
  if (lambda1 == lambda2) return 1.0;
  return std::min(1.0, std::exp(2.0 * log_overlap_same_realization(realization, lambda1, lambda2)));
}

double infidelity(const DisorderRealization& realization, double lambda1, double lambda2) {
  if (lambda1 == lambda2) return 0.0;
  return std::max(0.0, -std::expm1(2.0 * log_overlap_same_realization(realization, lambda1, lambda2)));
}

double energy_variance(const DisorderRealization& realization, double lambda) {
  const auto& e = realization.energies;
  const double log_z = log_partition(e, 2.0 * lambda);
  CompensatedSum mean;
  for (double x : e) mean.add(std::exp(-2.0 * lambda * x - log_z) * x);
  const double m = mean.value();
  CompensatedSum var;
  for (double x : e) var.add(std::exp(-2.0 * lambda * x - log_z) * (x - m) * (x - m));
  return std::max(var.value(), 0.0);
}

MetricEstimate fidelity_metric_fd(const DisorderRealization& realization, double lambda, double epsilon,
                                  DifferenceScheme scheme) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  MetricEstimate est;
  const double one_step = infidelity(realization, lambda, lambda + epsilon);
  est.cancellation_warning = one_step < kCancellationFloor;
  const double e2 = epsilon * epsilon;
  switch (scheme) {
    case DifferenceScheme::Central: {
      const double back = infidelity(realization, lambda, lambda - epsilon);
      est.value = 0.5 * (one_step + back) / e2;
      break;
    }
    case DifferenceScheme::Forward: {
      const double two_step = infidelity(realization, lambda, lambda + 2.0 * epsilon);
      est.value = 0.5 * (two_step - 2.0 * one_step) / e2;
      break;
    }
  }
  return est;
}

std::vector<FidelityScanPoint> fidelity_scan(const EnsembleParams& params, std::span<const double> lambda_grid,
                                             double epsilon, DifferenceScheme scheme, unsigned workers) {
  params.validate();
  if (!std::is_sorted(lambda_grid.begin(), lambda_grid.end()))
    throw std::invalid_argument("fidelity_scan: lambda grid must be sorted");
  const std::size_t n_lambda = lambda_grid.size();
  const std::size_t n_samples = params.n_samples;
  // values[l * n_samples + s]
  std::vector<double> values(n_lambda * n_samples);
  std::vector<unsigned char> warned(n_lambda * n_samples, 0);
  const double n = params.n_qubits;

  parallel_for(n_samples, workers, [&](std::size_t s) {
    const auto realization = draw_realization(params, s);
    for (std::size_t l = 0; l < n_lambda; ++l) {
      const auto est = fidelity_metric_fd(realization, lambda_grid[l], epsilon, scheme);
      values[l * n_samples + s] = est.value / n;
      warned[l * n_samples + s] = est.cancellation_warning;
    }
  });

  std::vector<FidelityScanPoint> points;
  points.reserve(n_lambda);
  for (std::size_t l = 0; l < n_lambda; ++l) {
    const auto row = std::span<const double>(values).subspan(l * n_samples, n_samples);
    const auto s = summarize(row);
    FidelityScanPoint p;
    p.lambda = lambda_grid[l];
    p.g_over_n = s.mean;
    p.g_stderr = s.stderr_mean;
    p.n_qubits = params.n_qubits;
    p.n_samples = n_samples;
    p.epsilon = epsilon;
    p.warnings = static_cast<std::size_t>(
        std::count(warned.begin() + static_cast<std::ptrdiff_t>(l * n_samples),
                   warned.begin() + static_cast<std::ptrdiff_t>((l + 1) * n_samples), 1));
    points.push_back(p);
  }
  return points;
}

}  // namespace rks
