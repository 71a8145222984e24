#include "rks/spectrum_stats.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rks/csv.hpp"
#include "rks/parallel.hpp"
#include "rks/stats.hpp"

namespace rks {

namespace {

constexpr double kGapFloor = 1e-300;

double wigner_dyson(double r, double gamma, double z) {
  const double num = std::pow(r + r * r, gamma);
  const double den = std::pow(1.0 + r + r * r, 1.0 + 1.5 * gamma);
  return num / (z * den);
}

}  // namespace

void GapRatioPool::merge(const GapRatioPool& other) {
  r.insert(r.end(), other.r.begin(), other.r.end());
  rtilde.insert(rtilde.end(), other.rtilde.begin(), other.rtilde.end());
  n_spectra += other.n_spectra;
}

GapRatioPool gap_ratios(std::span<const double> a) {
  GapRatioPool pool;
  pool.n_spectra = 1;
  if (a.size() < 3) return pool;
  for (std::size_t k = 0; k + 2 < a.size(); ++k) {
    const double d0 = a[k + 1] - a[k];
    const double d1 = a[k + 2] - a[k + 1];
    const double hi = std::max(d0, d1);
    if (hi < kGapFloor) continue;
    pool.rtilde.push_back(std::min(d0, d1) / hi);
    if (d0 > 0.0) pool.r.push_back(d1 / d0);
  }
  return pool;
}

GapRatioPool gap_ratios(const EntanglementSpectrum& spec) {
  auto pool = gap_ratios(std::span<const double>(spec.eigenvalues));
  pool.lambda = spec.lambda;
  pool.n_qubits = spec.part.n_qubits();
  return pool;
}

GapRatioPool ess_pool(const EnsembleParams& params, unsigned workers) {
  params.validate();
  const auto part = Bipartition::half(params.n_qubits);
  std::vector<GapRatioPool> per_sample(params.n_samples);
  parallel_for(params.n_samples, workers, [&](std::size_t s) {
    per_sample[s] = gap_ratios(spectrum(build_state(draw_realization(params, s), params.lambda), part));
  });
  GapRatioPool pool;
  pool.lambda = params.lambda;
  pool.n_qubits = params.n_qubits;
  for (const auto& p : per_sample) pool.merge(p);
  return pool;
}

std::string_view to_string(ReferenceKind kind) noexcept {
  switch (kind) {
    case ReferenceKind::GOE:
      return "goe";
    case ReferenceKind::GUE:
      return "gue";
    case ReferenceKind::Poisson:
      return "poisson";
  }
  return "?";
}

double reference_density(ReferenceKind kind, double r) {
  if (r < 0.0) return 0.0;
  switch (kind) {
    case ReferenceKind::GOE:
      return wigner_dyson(r, 1.0, 8.0 / 27.0);
    case ReferenceKind::GUE:
      return wigner_dyson(r, 2.0, 4.0 * std::numbers::pi / (81.0 * std::numbers::sqrt3));
    case ReferenceKind::Poisson:
      return 1.0 / ((1.0 + r) * (1.0 + r));
  }
  return 0.0;
}

double reference_probability(ReferenceKind kind, double lo, double hi) {
  if (kind == ReferenceKind::Poisson) {
    // CDF r / (1 + r).
    const auto cdf = [](double x) { return std::isinf(x) ? 1.0 : x / (1.0 + x); };
    return cdf(hi) - cdf(lo);
  }
  using boost::math::quadrature::gauss_kronrod;
  const auto f = [kind](double r) { return reference_density(kind, r); };
  return gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, 1e-13);
}

double RatioHistogram::bin_low(int b) const noexcept { return config.r_max * b / config.bins; }

double RatioHistogram::bin_high(int b) const noexcept {
  return b >= config.bins ? std::numeric_limits<double>::infinity() : config.r_max * (b + 1) / config.bins;
}

double RatioHistogram::probability(int b) const noexcept {
  return total == 0 ? 0.0 : static_cast<double>(counts[static_cast<std::size_t>(b)]) / static_cast<double>(total);
}

RatioHistogram histogram(const GapRatioPool& pool, const HistogramConfig& config) {
  if (config.bins < 1 || !(config.r_max > 0.0)) throw std::invalid_argument("histogram needs bins >= 1, r_max > 0");
  RatioHistogram h;
  h.config = config;
  h.counts.assign(static_cast<std::size_t>(config.bins) + 1, 0);
  const double scale = config.bins / config.r_max;
  for (double r : pool.r) {
    if (!(r >= 0.0)) continue;
    const auto b = r >= config.r_max ? static_cast<std::size_t>(config.bins)
                                     : std::min(static_cast<std::size_t>(r * scale),
                                                static_cast<std::size_t>(config.bins - 1));
    ++h.counts[b];
    ++h.total;
  }
  return h;
}

std::vector<double> reference_bin_probabilities(ReferenceKind kind, const HistogramConfig& config) {
  RatioHistogram shape;
  shape.config = config;
  std::vector<double> q(static_cast<std::size_t>(config.bins) + 1);
  for (int b = 0; b <= config.bins; ++b)
    q[static_cast<std::size_t>(b)] = reference_probability(kind, shape.bin_low(b), shape.bin_high(b));
  return q;
}

double kl_divergence(const RatioHistogram& hist, ReferenceKind kind) {
  if (hist.total == 0) throw std::invalid_argument("kl_divergence: empty histogram");
  const auto q = reference_bin_probabilities(kind, hist.config);
  CompensatedSum d;
  for (int b = 0; b <= hist.config.bins; ++b) {
    const double p = hist.probability(b);
    if (p > 0.0) d.add(p * std::log2(p / q[static_cast<std::size_t>(b)]));
  }
  return std::max(d.value(), 0.0);
}

double kl_divergence(const GapRatioPool& pool, ReferenceKind kind, const HistogramConfig& config) {
  if (pool.r.empty()) throw std::invalid_argument("kl_divergence: empty gap-ratio pool");
  return kl_divergence(histogram(pool, config), kind);
}

MeanWithError mean_rtilde(const GapRatioPool& pool) {
  if (pool.rtilde.empty()) throw std::invalid_argument("mean_rtilde: empty gap-ratio pool");
  const auto s = summarize(pool.rtilde);
  return {s.mean, s.stderr_mean};
}

void write_histogram_csv(std::ostream& out, const RatioHistogram& hist) {
  const auto goe = reference_bin_probabilities(ReferenceKind::GOE, hist.config);
  const auto gue = reference_bin_probabilities(ReferenceKind::GUE, hist.config);
  const auto poi = reference_bin_probabilities(ReferenceKind::Poisson, hist.config);
  CsvWriter csv(out, {"bin_low", "bin_high", "empirical_p", "goe_q", "gue_q", "poisson_q"});
  for (int b = 0; b <= hist.config.bins; ++b) {
    const auto i = static_cast<std::size_t>(b);
    csv.row(hist.bin_low(b), hist.bin_high(b), hist.probability(b), goe[i], gue[i], poi[i]);
  }
}

}  // namespace rks
