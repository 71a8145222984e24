#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "rks/entanglement.hpp"

namespace rks {

// Pooled adjacent-gap ratios of one or more entanglement spectra.
//   r_k      = d_{k+1} / d_k
//   rtilde_k = min(d_k, d_{k+1}) / max(d_k, d_{k+1})
// Pairs whose larger gap is below 1e-300 are dropped from both lists; an
// infinite r (zero gap followed by a nonzero one) is dropped from `r` only.
struct GapRatioPool {
  std::vector<double> r;
  std::vector<double> rtilde;
  double lambda = 0.0;
  int n_qubits = 0;
  std::size_t n_spectra = 0;

  void merge(const GapRatioPool& other);
  bool empty() const noexcept { return rtilde.empty(); }
};

GapRatioPool gap_ratios(std::span<const double> ascending_eigenvalues);
GapRatioPool gap_ratios(const EntanglementSpectrum& spec);

enum class ReferenceKind { GOE, GUE, Poisson };

std::string_view to_string(ReferenceKind kind) noexcept;

// Gap-ratio density P(r) on r >= 0:
//   Wigner-Dyson  (r + r^2)^g / (Z (1 + r + r^2)^(1 + 3g/2)),
//                 GOE g = 1, Z = 8/27;  GUE g = 2, Z = 4 pi / (81 sqrt 3)
//   Poisson       1 / (1 + r)^2
double reference_density(ReferenceKind kind, double r);

// Integral of the density over [lo, hi]; hi may be +infinity.
double reference_probability(ReferenceKind kind, double lo, double hi);

struct HistogramConfig {
  int bins = 60;
  double r_max = 6.0;
};

// Uniform bins on [0, r_max) plus one overflow bin [r_max, inf).
struct RatioHistogram {
  HistogramConfig config;
  std::vector<std::size_t> counts;  // bins + 1
  std::size_t total = 0;

  double bin_low(int b) const noexcept;
  double bin_high(int b) const noexcept;
  double probability(int b) const noexcept;
};

RatioHistogram histogram(const GapRatioPool& pool, const HistogramConfig& config = {});

// Reference mass per histogram bin, overflow bin last.
std::vector<double> reference_bin_probabilities(ReferenceKind kind, const HistogramConfig& config = {});

// D_KL(empirical || reference) in bits over the histogram; empty empirical
// bins contribute nothing. Throws std::invalid_argument on an empty pool.
double kl_divergence(const GapRatioPool& pool, ReferenceKind kind, const HistogramConfig& config = {});
double kl_divergence(const RatioHistogram& hist, ReferenceKind kind);

struct MeanWithError {
  double mean;
  double standard_error;
};

MeanWithError mean_rtilde(const GapRatioPool& pool);

// Half-system ratios pooled over params.n_samples realizations at
// params.lambda, merged in sample order.
GapRatioPool ess_pool(const EnsembleParams& params, unsigned workers = 1);

// Columns: bin_low,bin_high,empirical_p,goe_q,gue_q,poisson_q
void write_histogram_csv(std::ostream& out, const RatioHistogram& hist);

}  // namespace rks
