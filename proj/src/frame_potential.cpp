#include "rks/frame_potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "rks/error.hpp"
#include "rks/parallel.hpp"
#include "rks/stats.hpp"

namespace rks {

namespace {

double power_2t(double o, int t) {
  if (o < 1e-150) return o == 0.0 ? 0.0 : std::exp(2.0 * t * std::log(o));
  const double o2 = o * o;
  double r = 1.0;
  for (int i = 0; i < t; ++i) r *= o2;
  return r;
}

}  // namespace

double OverlapTable::at(std::size_t j, std::size_t l) const {
  if (j == l || j >= k || l >= k) throw std::out_of_range("overlap index");
  if (j > l) std::swap(j, l);
  // Rows 0..j-1 hold k-1, k-2, .. entries.
  const std::size_t offset = j * k - j * (j + 1) / 2;
  return abs_overlap[offset + (l - j - 1)];
}

OverlapTable pairwise_overlaps(std::span<const RkState> ensemble) {
  if (ensemble.empty()) throw std::invalid_argument("frame potential: empty ensemble");
  const std::size_t k = ensemble.size(), dim = ensemble.front().dim();
  Eigen::MatrixXd a(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(k));
  for (std::size_t j = 0; j < k; ++j) {
    if (ensemble[j].dim() != dim) throw std::invalid_argument("frame potential: states of different size");
    a.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(ensemble[j].amplitudes.data(),
                                                                            static_cast<Eigen::Index>(dim));
  }
  const Eigen::MatrixXd gram = a.transpose() * a;
  OverlapTable table;
  table.k = k;
  table.abs_overlap.reserve(k * (k - 1) / 2);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t l = j + 1; l < k; ++l)
      table.abs_overlap.push_back(std::abs(gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l))));
  return table;
}

FrameMoment frame_potential(const OverlapTable& overlaps, int t) {
  if (t < 1) throw std::invalid_argument("frame potential: t must be >= 1");
  const std::size_t k = overlaps.k;
  if (k == 0) throw std::invalid_argument("frame potential: empty ensemble");
  FrameMoment m;
  m.t = t;
  const double kd = static_cast<double>(k);
  if (k == 1) {
    m.phi = 1.0;
    return m;
  }
  std::vector<double> h(overlaps.abs_overlap.size());
  std::vector<double> row_sum(k, 0.0);
  std::size_t idx = 0;
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = j + 1; l < k; ++l, ++idx) {
      h[idx] = power_2t(overlaps.abs_overlap[idx], t);
      row_sum[j] += h[idx];
      row_sum[l] += h[idx];
    }
  }
  // Summing in sorted order makes phi independent of the ensemble ordering.
  std::vector<double> sorted = h;
  std::sort(sorted.begin(), sorted.end());
  CompensatedSum total;
  for (double v : sorted) total.add(v);
  const double pairs = static_cast<double>(h.size());
  const double u = total.value() / pairs;  // mean over unordered pairs
  m.phi_tilde = (kd - 1.0) / kd * u;
  m.phi = m.phi_tilde + 1.0 / kd;

  if (k >= 3) {
    const auto pair_stats = summarize(h);
    std::vector<double> row_mean(k);
    for (std::size_t j = 0; j < k; ++j) row_mean[j] = row_sum[j] / (kd - 1.0);
    const auto row_stats = summarize(row_mean);
    const double zeta2 = pair_stats.variance;
    const double zeta1 = std::max(0.0, row_stats.variance - zeta2 / (kd - 1.0)) / (1.0 - 1.0 / (kd - 1.0));
    const double var_u = 4.0 * (kd - 2.0) / (kd * (kd - 1.0)) * zeta1 + 2.0 / (kd * (kd - 1.0)) * zeta2;
    m.phi_tilde_stderr = (kd - 1.0) / kd * std::sqrt(var_u);
  }
  return m;
}

double design_benchmark(int n_qubits, int t) {
  if (t < 1) throw std::invalid_argument("design benchmark: t must be >= 1");
  if (n_qubits < 1) throw std::invalid_argument("design benchmark: need at least one qubit");
  const double d = std::ldexp(1.0, n_qubits);
  // ln[(d)(d+1)..(d+t-1) / t!]
  double acc = 0.0;
  for (int i = 0; i < t; ++i) acc += std::log(d + i);
  return acc - std::lgamma(t + 1.0);
}

std::vector<FramePotentialResult> design_scan(const EnsembleParams& params, std::span<const double> lambda_grid,
                                              std::span<const int> t_list, unsigned workers) {
  params.validate();
  if (params.n_samples < 2) throw ConfigError("frame potential: K = n_samples must be at least 2");
  std::vector<DisorderRealization> realizations(params.n_samples);
  parallel_for(params.n_samples, workers, [&](std::size_t s) { realizations[s] = draw_realization(params, s); });
  std::vector<FramePotentialResult> out;
  std::vector<RkState> ensemble(params.n_samples);
  for (double lambda : lambda_grid) {
    parallel_for(params.n_samples, workers,
                 [&](std::size_t s) { ensemble[s] = build_state(realizations[s], lambda); });
    const auto table = pairwise_overlaps(ensemble);
    for (int t : t_list) {
      const auto m = frame_potential(table, t);
      FramePotentialResult r;
      r.n_qubits = params.n_qubits;
      r.lambda = lambda;
      r.t = t;
      r.log_phi_tilde_dt = std::log(m.phi_tilde) + design_benchmark(params.n_qubits, t);
      r.log_stderr = m.phi_tilde > 0.0 ? m.phi_tilde_stderr / m.phi_tilde : INFINITY;
      r.k = params.n_samples;
      r.seed = params.master_seed;
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace rks
