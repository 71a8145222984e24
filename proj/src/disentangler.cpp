#include "rks/disentangler.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "rks/entanglement.hpp"
#include "rks/error.hpp"
#include "rks/parallel.hpp"
#include "rks/rng.hpp"
#include "rks/stats.hpp"

namespace rks {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::vector<Bipartition> cost_cuts(int n, CostKind kind) {
  if (n < 2) throw std::invalid_argument("disentangler: need at least 2 qubits");
  const int half = n / 2;
  std::vector<Bipartition> cuts;
  if (kind == CostKind::ContiguousBlocks) {
    // For even N, block i + N/2 is the complement of block i.
    const int distinct = n % 2 == 0 ? half : n;
    for (int i = 0; i < distinct; ++i) cuts.push_back(Bipartition::contiguous(n, i, half));
    return cuts;
  }
  if (n > 8) throw CapacityError("all-subset cost is limited to N <= 8");
  for (unsigned m = 0; m < (1u << n); ++m) {
    if (std::popcount(m) != half) continue;
    if (n % 2 == 0 && !(m & 1u)) continue;  // keep one of each complementary pair
    std::vector<int> a;
    for (int q = 0; q < n; ++q)
      if (m & (1u << q)) a.push_back(q);
    cuts.push_back(Bipartition(n, std::move(a)));
  }
  return cuts;
}

int qubits_of(std::size_t dim) {
  if (dim < 4 || !std::has_single_bit(dim)) throw std::invalid_argument("disentangler: state size must be 2^N, N >= 2");
  return std::countr_zero(dim);
}

double mean_of(const std::vector<double>& v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  return s.value() / static_cast<double>(v.size());
}

}  // namespace

AnnealSchedule AnnealSchedule::constant(double beta0, std::size_t t_max) {
  return {ScheduleKind::Constant, beta0, 0.0, t_max};
}
AnnealSchedule AnnealSchedule::power_law(double beta0, double exponent, std::size_t t_max) {
  return {ScheduleKind::PowerLaw, beta0, exponent, t_max};
}
AnnealSchedule AnnealSchedule::quadratic(double beta0, double coefficient, std::size_t t_max) {
  return {ScheduleKind::Quadratic, beta0, coefficient, t_max};
}

double AnnealSchedule::beta(std::size_t t) const noexcept {
  const double tt = static_cast<double>(t);
  switch (kind) {
    case ScheduleKind::Constant: return beta0;
    case ScheduleKind::PowerLaw: return beta0 * std::pow(tt + 1.0, param);
    case ScheduleKind::Quadratic: return beta0 + param * tt * tt;
  }
  return beta0;
}

void AnnealSchedule::validate() const {
  if (t_max == 0) throw ConfigError("schedule: t_max must be positive");
  if (!std::isfinite(beta0) || beta0 < 0.0) throw ConfigError("schedule: beta0 must be finite and >= 0");
  if (!std::isfinite(param)) throw ConfigError("schedule: parameter must be finite");
  if (kind == ScheduleKind::Quadratic && param < 0.0 &&
      beta(t_max - 1) < 0.0)
    throw ConfigError("schedule: quadratic coefficient drives beta negative before t_max");
}

std::string AnnealSchedule::descriptor() const {
  switch (kind) {
    case ScheduleKind::Constant: return "const(beta0=" + fmt(beta0) + ")";
    case ScheduleKind::PowerLaw: return "power(beta0=" + fmt(beta0) + ";exponent=" + fmt(param) + ")";
    case ScheduleKind::Quadratic: return "quad(beta0=" + fmt(beta0) + ";coeff=" + fmt(param) + ")";
  }
  return {};
}

ScheduleKind parse_schedule_kind(const std::string& name) {
  if (name == "const") return ScheduleKind::Constant;
  if (name == "power") return ScheduleKind::PowerLaw;
  if (name == "quad") return ScheduleKind::Quadratic;
  throw ConfigError("schedule: expected one of const, power, quad; got '" + name + "'");
}

std::optional<double> AnnealOutcome::ratio() const noexcept {
  if (s_initial < kMinInitialEntropy) return std::nullopt;
  return s_final / s_initial;
}

double entanglement_cost(std::span<const Amplitude> state, CostKind kind) {
  const auto cuts = cost_cuts(qubits_of(state.size()), kind);
  std::vector<double> s;
  for (const auto& c : cuts) s.push_back(entanglement_entropy(state, c));
  return mean_of(s);
}

AnnealOutcome anneal(std::span<const Amplitude> initial, const AnnealSchedule& schedule, std::uint64_t seed,
                     const AnnealOptions& options, ComplexState* final_state) {
  schedule.validate();
  const int n = qubits_of(initial.size());
  const auto cuts = cost_cuts(n, options.cost);
  const auto half = Bipartition::half(n);

  ComplexState psi(initial.begin(), initial.end());
  ComplexState backup;
  std::vector<double> block(cuts.size());
  for (std::size_t c = 0; c < cuts.size(); ++c) block[c] = entanglement_entropy(psi, cuts[c]);
  std::vector<double> trial = block;

  AnnealOutcome out;
  out.s_initial = entanglement_entropy(psi, half);
  out.cost_initial = mean_of(block);
  double cost = out.cost_initial;
  if (options.record_trace) out.cost_trace.reserve(schedule.t_max);

  Xoshiro256ss rng(seed);
  const auto nq = static_cast<std::uint64_t>(n);
  for (std::size_t t = 0; t < schedule.t_max; ++t) {
    CliffordGate gate;
    const auto kind = rng.below(3);
    const int q = static_cast<int>(rng.below(nq));
    if (kind == 0) {
      gate = CliffordGate::h(q);
    } else if (kind == 1) {
      gate = CliffordGate::s(q);
    } else {
      int target = static_cast<int>(rng.below(nq - 1));
      if (target >= q) ++target;
      gate = CliffordGate::cnot(q, target);
    }
    ++out.proposals;

    if (!gate.is_two_qubit() && !options.full_recompute) {
      apply_gate(psi, gate);
      ++out.accepted;
      out.accepted_gates.push_back(gate);
      if (options.record_trace) out.cost_trace.push_back(cost);
      continue;
    }

    if (gate.kind == GateKind::H) backup = psi;
    apply_gate(psi, gate);
    for (std::size_t c = 0; c < cuts.size(); ++c) {
      const bool affected = options.full_recompute || cuts[c].separates(gate.q0, gate.q1);
      trial[c] = affected ? entanglement_entropy(psi, cuts[c]) : block[c];
    }
    const double trial_cost = mean_of(trial);
    const double delta = trial_cost - cost;
    bool accept = delta <= 0.0;
    if (!accept) accept = rng.uniform() < std::exp(-schedule.beta(t) * delta);
    if (accept) {
      block.swap(trial);
      cost = trial_cost;
      ++out.accepted;
      out.accepted_gates.push_back(gate);
    } else if (gate.kind == GateKind::H) {
      psi.swap(backup);
    } else {
      apply_gate(psi, gate.inverse());
    }
    if (options.record_trace) out.cost_trace.push_back(cost);
  }

  out.cost_final = cost;
  out.s_final = entanglement_entropy(psi, half);
  if (final_state) *final_state = std::move(psi);
  return out;
}

EfficiencyPoint summarize_efficiency(std::span<const AnnealOutcome> outcomes) {
  std::vector<double> ratios;
  EfficiencyPoint p;
  for (const auto& o : outcomes) {
    if (auto r = o.ratio())
      ratios.push_back(*r);
    else
      ++p.excluded;
  }
  if (ratios.empty())
    throw NumericalError("efficiency: all " + std::to_string(outcomes.size()) +
                         " samples have vanishing initial entropy");
  const auto s = summarize(ratios);
  p.eta_mean = 1.0 - s.mean;
  p.eta_stderr = s.stderr_mean;
  p.n_samples = ratios.size();
  return p;
}

std::uint64_t anneal_seed(std::uint64_t master_seed, int n_qubits, double lambda, std::size_t sample) {
  return derive_seed(master_seed, hash_tag("disentangle"), static_cast<std::uint64_t>(n_qubits),
                     std::bit_cast<std::uint64_t>(lambda), static_cast<std::uint64_t>(sample));
}

std::vector<EfficiencyPoint> efficiency_scan(const EnsembleParams& params, std::span<const double> lambda_grid,
                                             const AnnealSchedule& schedule, const AnnealOptions& options,
                                             unsigned workers) {
  params.validate();
  schedule.validate();
  const std::size_t n_lambda = lambda_grid.size();
  std::vector<std::vector<AnnealOutcome>> outcomes(n_lambda, std::vector<AnnealOutcome>(params.n_samples));
  parallel_for(params.n_samples * n_lambda, workers, [&](std::size_t cell) {
    const std::size_t s = cell / n_lambda, l = cell % n_lambda;
    const auto realization = draw_realization(params, s);
    const auto state = to_complex(build_state(realization, lambda_grid[l]).amplitudes);
    auto o = anneal(state, schedule, anneal_seed(params.master_seed, params.n_qubits, lambda_grid[l], s), options);
    o.accepted_gates.clear();
    o.accepted_gates.shrink_to_fit();
    outcomes[l][s] = std::move(o);
  });
  std::vector<EfficiencyPoint> out;
  for (std::size_t l = 0; l < n_lambda; ++l) {
    auto p = summarize_efficiency(outcomes[l]);
    p.n_qubits = params.n_qubits;
    p.lambda = lambda_grid[l];
    p.schedule = schedule.descriptor();
    p.t_max = schedule.t_max;
    p.seed = params.master_seed;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace rks
