#include "app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "rks/csv.hpp"
#include "rks/disentangler.hpp"
#include "rks/error.hpp"
#include "rks/fidelity.hpp"
#include "rks/frame_potential.hpp"
#include "rks/magic.hpp"
#include "rks/parallel.hpp"
#include "rks/rng.hpp"
#include "rks/scaling.hpp"
#include "rks/scan_result.hpp"
#include "rks/spectrum_stats.hpp"
#include "rks/state_io.hpp"
#include "rks/stats.hpp"

namespace rks::app {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kExperiments{"generate", "entropy-scan", "fidelity-scan", "ess",
                                            "fluctuations", "magic", "disentangle", "frame-potential",
                                            "fit"};

std::string cell_key(int n, double lambda) { return std::to_string(n) + "|" + format_double(lambda); }

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

// Result table written one (N, lambda) cell at a time. Each cell is appended
// and flushed as soon as it is computed; with resume, complete cells found
// in an existing file are kept and skipped. finalize() rewrites the file in
// canonical cell order, so an interrupted-then-resumed run ends byte-identical
// to a single pass.
class CellSink {
 public:
  CellSink(fs::path path, std::vector<std::string> header, std::size_t rows_per_cell, bool resume)
      : path_(std::move(path)), header_(std::move(header)), rows_per_cell_(rows_per_cell) {
    if (resume && fs::exists(path_)) load();
    rewrite(std::nullopt);
    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_) throw IoError("cannot append to " + path_.string());
  }

  bool done(const std::string& key) const { return cells_.count(key) != 0; }
  std::size_t completed() const noexcept { return cells_.size(); }

  void write(const std::string& key, std::vector<std::string> lines) {
    if (lines.size() != rows_per_cell_) throw std::logic_error("cell row count mismatch");
    std::string block;
    for (const auto& l : lines) block += l + '\n';
    out_ << block;
    out_.flush();
    if (!out_) throw IoError("write failed: " + path_.string());
    cells_[key] = std::move(lines);
  }

  void finalize(const std::vector<std::string>& order) {
    out_.close();
    rewrite(order);
  }

 private:
  void load() {
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw IoError("cannot read " + path_.string());
    const auto table = read_csv(in);
    if (table.header != header_)
      throw IoError(path_.string() + ": header differs from this experiment's schema; remove it or run without --resume");
    const int n_col = table.column("N"), l_col = table.column("lambda");
    std::map<std::string, std::vector<std::string>> grouped;
    std::vector<std::string> seen;
    for (const auto& fields : table.rows) {
      std::string line;
      for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + fields[i];
      const std::string key = fields[static_cast<std::size_t>(n_col)] + "|" + fields[static_cast<std::size_t>(l_col)];
      if (!grouped.count(key)) seen.push_back(key);
      grouped[key].push_back(std::move(line));
    }
    for (const auto& key : seen)
      if (grouped[key].size() == rows_per_cell_) {
        cells_[key] = std::move(grouped[key]);
        resumed_order_.push_back(key);
      }
  }

  void rewrite(const std::optional<std::vector<std::string>>& order) {
    std::string text = join_header(header_) + '\n';
    const auto& keys = order ? *order : resumed_order_;
    for (const auto& key : keys) {
      auto it = cells_.find(key);
      if (it == cells_.end()) continue;
      for (const auto& l : it->second) text += l + '\n';
    }
    write_text_file(path_, text);
  }

  fs::path path_;
  std::vector<std::string> header_;
  std::size_t rows_per_cell_;
  std::map<std::string, std::vector<std::string>> cells_;
  std::vector<std::string> resumed_order_;
  std::ofstream out_;
};

template <class... Fields>
std::string csv_line(const std::vector<std::string>& header, const Fields&... fields) {
  std::ostringstream os;
  CsvWriter(os, header, false).row(fields...);
  std::string s = os.str();
  s.pop_back();
  return s;
}

EnsembleParams ensemble(const RunConfig& cfg, int n, double lambda) {
  EnsembleParams p;
  p.n_qubits = n;
  p.lambda = lambda;
  p.n_samples = cfg.samples;
  p.master_seed = cfg.seed;
  p.max_qubits = cfg.max_qubits;
  return p;
}

AnnealSchedule make_schedule(const RunConfig& cfg, int n) {
  const std::size_t t_max = cfg.tmax > 0 ? cfg.tmax : cfg.k * static_cast<std::size_t>(n) * n;
  switch (parse_schedule_kind(cfg.schedule)) {
    case ScheduleKind::Constant: return AnnealSchedule::constant(cfg.beta0, t_max);
    case ScheduleKind::PowerLaw: return AnnealSchedule::power_law(cfg.beta0, cfg.exponent, t_max);
    case ScheduleKind::Quadratic: return AnnealSchedule::quadratic(cfg.beta0, cfg.coeff, t_max);
  }
  throw ConfigError("--schedule: unknown kind");
}

AnnealOptions anneal_options(const RunConfig& cfg) {
  AnnealOptions o;
  o.cost = cfg.cost == "all" ? CostKind::AllHalfSubsets : CostKind::ContiguousBlocks;
  o.full_recompute = cfg.full_recompute;
  return o;
}

std::vector<std::string> header_for(const std::string& experiment) {
  if (experiment == "entropy-scan" || experiment == "fluctuations") return ScanResult::header();
  if (experiment == "fidelity-scan")
    return {"N", "lambda", "g_over_N_mean", "g_over_N_stderr", "epsilon", "n_samples", "master_seed"};
  if (experiment == "ess")
    return {"N",        "lambda",     "rtilde_mean", "rtilde_stderr", "kl_goe",
            "kl_gue",   "kl_poisson", "n_ratios",    "n_samples",     "master_seed"};
  if (experiment == "magic") return {"N", "lambda", "m2_mean", "m2_stderr", "n_samples", "seed"};
  if (experiment == "disentangle")
    return {"N", "lambda", "eta_mean", "eta_stderr", "schedule_descriptor", "t_max", "n_samples", "excluded_count"};
  if (experiment == "frame-potential") return {"N", "lambda", "t", "log_phi_tilde_Dt", "K", "seed"};
  if (experiment == "generate") return {"N", "lambda", "sample", "realization_seed", "file"};
  throw std::logic_error("no table for " + experiment);
}

// Rows of one (N, lambda) cell.
std::vector<std::string> compute_cell(const RunConfig& cfg, int n, double lambda, const fs::path& out_dir) {
  const auto header = header_for(cfg.experiment);
  const auto params = ensemble(cfg, n, lambda);
  const std::string& ex = cfg.experiment;

  if (ex == "entropy-scan" || ex == "fluctuations") {
    const double grid[] = {lambda};
    const auto row = variance_scan(params, grid, cfg.workers, ex).rows.front();
    return {csv_line(header, row.experiment, row.n_qubits, row.lambda, row.statistic, row.mean, row.stderr_mean,
                     row.variance, row.n_samples, row.master_seed, row.code_version)};
  }
  if (ex == "fidelity-scan") {
    const double grid[] = {lambda};
    const auto scheme = cfg.scheme == "forward" ? DifferenceScheme::Forward : DifferenceScheme::Central;
    const auto p = fidelity_scan(params, grid, cfg.epsilon, scheme, cfg.workers).front();
    if (p.warnings > 0)
      std::cerr << "  warning: " << p.warnings << " samples hit the cancellation floor (1 - f < 1e-13)\n";
    return {csv_line(header, n, lambda, p.g_over_n, p.g_stderr, cfg.epsilon, cfg.samples, cfg.seed)};
  }
  if (ex == "ess") {
    const auto pool = ess_pool(params, cfg.workers);
    const HistogramConfig hc{cfg.hist_bins, cfg.hist_max};
    const auto hist = histogram(pool, hc);
    std::ostringstream hist_csv;
    write_histogram_csv(hist_csv, hist);
    write_text_file(out_dir / ("ess_hist_N" + std::to_string(n) + "_lambda" + short_number(lambda) + ".csv"),
                    hist_csv.str());
    const auto rt = mean_rtilde(pool);
    return {csv_line(header, n, lambda, rt.mean, rt.standard_error, kl_divergence(hist, ReferenceKind::GOE),
                     kl_divergence(hist, ReferenceKind::GUE), kl_divergence(hist, ReferenceKind::Poisson),
                     pool.rtilde.size(), cfg.samples, cfg.seed)};
  }
  if (ex == "magic") {
    MagicOptions mo;
    mo.max_qubits = cfg.magic_max_qubits;
    mo.workers = cfg.workers;
    const double grid[] = {lambda};
    const auto r = magic_scan(params, grid, mo).front();
    return {csv_line(header, n, lambda, r.m2_mean, r.m2_stderr, r.n_samples, r.seed)};
  }
  if (ex == "disentangle") {
    const auto schedule = make_schedule(cfg, n);
    const double grid[] = {lambda};
    const auto p = efficiency_scan(params, grid, schedule, anneal_options(cfg), cfg.workers).front();
    return {csv_line(header, n, lambda, p.eta_mean, p.eta_stderr, p.schedule, p.t_max, p.n_samples, p.excluded)};
  }
  if (ex == "frame-potential") {
    const double grid[] = {lambda};
    std::vector<std::string> lines;
    for (const auto& r : design_scan(params, grid, cfg.t_list, cfg.workers))
      lines.push_back(csv_line(header, n, lambda, r.t, r.log_phi_tilde_dt, r.k, r.seed));
    return lines;
  }
  if (ex == "generate") {
    const fs::path dir = out_dir / "states";
    ensure_directory(dir);
    std::vector<std::string> lines;
    for (std::size_t s = 0; s < cfg.samples; ++s) {
      const auto realization = draw_realization(params, s);
      const std::string name =
          "N" + std::to_string(n) + "_lambda" + short_number(lambda) + "_s" + std::to_string(s) + ".rks";
      save_state(dir / name, build_state(realization, lambda));
      lines.push_back(csv_line(header, n, lambda, s, realization.seed, "states/" + name));
    }
    return lines;
  }
  throw std::logic_error("unhandled experiment " + ex);
}

std::size_t rows_per_cell(const RunConfig& cfg) {
  if (cfg.experiment == "frame-potential") return cfg.t_list.size();
  if (cfg.experiment == "generate") return cfg.samples;
  return 1;
}

int run_scan(const RunConfig& cfg) {
  const fs::path out_dir(cfg.out);
  ensure_directory(out_dir);
  const auto grid = cfg.grid();
  std::vector<std::pair<int, double>> cells;
  std::vector<std::string> order;
  for (int n : cfg.qubits)
    for (double l : grid) {
      cells.emplace_back(n, l);
      order.push_back(cell_key(n, l));
    }
  CellSink sink(out_dir / (cfg.experiment + ".csv"), header_for(cfg.experiment), rows_per_cell(cfg), cfg.resume);
  if (sink.completed() > 0) std::cerr << cfg.experiment << ": resuming, " << sink.completed() << " cells done\n";
  std::size_t index = 0;
  for (const auto& [n, l] : cells) {
    ++index;
    const auto key = cell_key(n, l);
    if (sink.done(key)) continue;
    const auto start = std::chrono::steady_clock::now();
    sink.write(key, compute_cell(cfg, n, l, out_dir));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::fprintf(stderr, "%s N=%d lambda=%s [%zu/%zu] %.2f s\n", cfg.experiment.c_str(), n,
                 short_number(l).c_str(), index, cells.size(), secs);
  }
  sink.finalize(order);
  return kOk;
}

// Anneals one stored state `samples` times with independent seeds.
int run_disentangle_input(const RunConfig& cfg) {
  const fs::path out_dir(cfg.out);
  ensure_directory(out_dir);
  const auto state = load_state(cfg.input);
  if (state.n_qubits > cfg.max_qubits)
    throw CapacityError("--input: state has " + std::to_string(state.n_qubits) + " qubits, cap is " +
                        std::to_string(cfg.max_qubits));
  const auto schedule = make_schedule(cfg, state.n_qubits);
  const auto options = anneal_options(cfg);
  const auto amplitudes = to_complex(state.amplitudes);
  std::vector<AnnealOutcome> outcomes(cfg.samples);
  parallel_for(cfg.samples, cfg.workers, [&](std::size_t s) {
    outcomes[s] = anneal(amplitudes, schedule, anneal_seed(cfg.seed, state.n_qubits, state.lambda, s), options);
  });
  const auto p = summarize_efficiency(outcomes);
  const auto header = header_for("disentangle");
  CellSink sink(out_dir / "disentangle.csv", header, 1, false);
  const auto key = cell_key(state.n_qubits, state.lambda);
  sink.write(key, {csv_line(header, state.n_qubits, state.lambda, p.eta_mean, p.eta_stderr, schedule.descriptor(),
                            schedule.t_max, p.n_samples, p.excluded)});
  sink.finalize({key});
  return kOk;
}

// ---- fit -------------------------------------------------------------------

struct Series {
  std::map<int, std::vector<std::pair<double, double>>> by_n;  // N -> (lambda, value), lambda ascending
  std::string description;
};

enum class Schema { Scan, Fidelity, Magic, Other };

Schema detect_schema(const CsvTable& t) {
  if (t.header == ScanResult::header()) return Schema::Scan;
  if (t.header == header_for("fidelity-scan")) return Schema::Fidelity;
  if (t.header == header_for("magic")) return Schema::Magic;
  return Schema::Other;
}

Series load_series(const RunConfig& cfg, const CsvTable& t, const std::string& column) {
  const Schema schema = detect_schema(t);
  if (t.column("N") < 0 || t.column("lambda") < 0) throw ConfigError("--in: CSV lacks N / lambda columns");
  if (t.column(column) < 0) throw ConfigError("--column: '" + column + "' not in the input header");
  std::string normalize = cfg.normalize;
  if (normalize.empty()) normalize = (schema == Schema::Scan || schema == Schema::Magic) ? "per-qubit" : "none";
  Series s;
  std::set<std::string> experiments;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (schema == Schema::Scan) {
      if (t.text(i, "statistic") != cfg.statistic) continue;
      experiments.insert(t.text(i, "experiment"));
    }
    const int n = std::stoi(t.text(i, "N"));
    double v = t.number(i, column);
    if (normalize == "per-qubit") v /= n;
    s.by_n[n].emplace_back(t.number(i, "lambda"), v);
  }
  if (s.by_n.empty()) throw ConfigError("--in: no rows match (statistic '" + cfg.statistic + "')");
  for (auto& [n, pts] : s.by_n) std::sort(pts.begin(), pts.end());
  std::ostringstream d;
  d << fs::path(cfg.fit_input).filename().string() << ": column=" << column << " normalize=" << normalize;
  if (!experiments.empty()) d << " experiment=" << *experiments.begin() << " statistic=" << cfg.statistic;
  d << " N={";
  bool first = true;
  for (const auto& [n, pts] : s.by_n) {
    d << (first ? "" : ",") << n;
    first = false;
  }
  d << "}";
  s.description = d.str();
  return s;
}

double value_at(const std::vector<std::pair<double, double>>& pts, double lambda, int n) {
  for (const auto& [l, v] : pts)
    if (std::abs(l - lambda) <= 1e-12 * std::max(1.0, std::abs(lambda))) return v;
  throw ConfigError("--lambda: " + short_number(lambda) + " is not on the grid for N=" + std::to_string(n));
}

int run_fit(const RunConfig& cfg) {
  std::ifstream in(cfg.fit_input, std::ios::binary);
  if (!in) throw IoError("cannot read " + cfg.fit_input);
  const auto table = read_csv(in);
  const Schema schema = detect_schema(table);
  std::string column = cfg.column;
  if (column.empty()) {
    if (cfg.model == "theta") column = "variance";
    else if (schema == Schema::Scan) column = "mean";
    else if (schema == Schema::Fidelity) column = "g_over_N_mean";
    else if (schema == Schema::Magic) column = "m2_mean";
    else throw ConfigError("--column: required for this input schema");
  }

  FitResult fit;
  if (cfg.model == "derivative-min") {
    const auto series = load_series(cfg, table, column);
    std::vector<double> ns, minima;
    std::vector<FitParameter> params;
    for (const auto& [n, pts] : series.by_n) {
      std::vector<double> xs, ys;
      for (const auto& [l, v] : pts) {
        xs.push_back(l);
        ys.push_back(v);
      }
      const double m = polyfit_derivative_min(xs, ys, cfg.degree);
      ns.push_back(n);
      minima.push_back(m);
      params.push_back({"lambda_min[N=" + std::to_string(n) + "]", m, INFINITY});
    }
    const auto spread = summarize(minima);
    params.push_back({"lambda_min_mean", spread.mean, ns.size() > 1 ? spread.stderr_mean : INFINITY});
    fit.model = "polynomial derivative minimum per N";
    fit.r2 = NAN;
    fit.residual_norm = NAN;
    if (ns.size() >= 4) {
      const auto ex = exp_extrapolate(ns, minima);
      fit.model += "; lambda_min(N) = A*exp(-B/N)+C";
      fit.r2 = ex.r2;
      fit.residual_norm = ex.residual_norm;
      fit.degenerate = ex.degenerate;
      params.insert(params.end(), ex.params.begin(), ex.params.end());
    }
    fit.params = std::move(params);
    fit.inputs = series.description;
  } else if (cfg.model == "theta") {
    if (schema != Schema::Scan) throw ConfigError("--model theta: needs a scan-result CSV with a variance column");
    RunConfig raw = cfg;
    raw.normalize = "none";
    const auto series = load_series(raw, table, column);
    std::vector<double> ns, vars;
    for (const auto& [n, pts] : series.by_n) {
      ns.push_back(n);
      vars.push_back(value_at(pts, cfg.fit_lambda, n));
    }
    fit = theta_exponent(ns, vars,
                         cfg.variance_form == "per-qubit" ? VarianceForm::PerQubit : VarianceForm::EntropyDensity);
    fit.inputs = series.description + " lambda=" + short_number(cfg.fit_lambda);
  } else if (cfg.model == "inverse-n") {
    const auto series = load_series(cfg, table, column);
    std::vector<double> xs, ys;
    for (const auto& [n, pts] : series.by_n) {
      xs.push_back(1.0 / n);
      ys.push_back(value_at(pts, cfg.fit_lambda, n));
    }
    fit = linear_extrapolate(xs, ys);
    fit.model = "y = slope/N + intercept";
    fit.inputs = series.description + " lambda=" + short_number(cfg.fit_lambda);
  } else {
    throw ConfigError("--model: expected derivative-min, theta or inverse-n");
  }

  const fs::path out_dir(cfg.out);
  ensure_directory(out_dir);
  write_text_file(out_dir / "fit.json", to_json(fit).dump(2) + "\n");
  std::cerr << "fit: wrote " << (out_dir / "fit.json").string() << "\n";
  return kOk;
}

// ---- command line ------------------------------------------------------------

void add_shared(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  sub.add_option("--samples", cfg.samples, "Ensemble size per (N, lambda) cell")->capture_default_str();
  sub.add_option("--qubits", cfg.qubits, "System sizes, e.g. 8,10,12")->delimiter(',')->capture_default_str();
  sub.add_option("--lambda-min", cfg.lambda_min)->capture_default_str();
  sub.add_option("--lambda-max", cfg.lambda_max)->capture_default_str();
  sub.add_option("--lambda-steps", cfg.lambda_steps, "Grid points including both ends")->capture_default_str();
  sub.add_option("--lambda-grid", cfg.lambda_grid, "Explicit grid, e.g. 0,0.5,1 (overrides min/max/steps)")
      ->delimiter(',');
  sub.add_option("--out", cfg.out, "Output directory")->capture_default_str();
  sub.add_option("--workers", cfg.workers, "Worker threads")->capture_default_str();
  sub.add_flag("--resume", cfg.resume, "Skip cells already present in the output table");
  sub.add_option("--max-qubits", cfg.max_qubits, "Capacity cap on N")->capture_default_str();
}

}  // namespace

std::vector<double> RunConfig::grid() const {
  if (!lambda_grid.empty()) return lambda_grid;
  std::vector<double> g;
  if (lambda_steps == 1) return {lambda_min};
  for (int i = 0; i < lambda_steps; ++i)
    g.push_back(i == lambda_steps - 1 ? lambda_max
                                      : lambda_min + (lambda_max - lambda_min) * i / (lambda_steps - 1));
  return g;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& msg) { throw ConfigError(field + ": " + msg); };
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end())
    fail("experiment", "unknown '" + experiment + "'");
  if (workers < 1) fail("--workers", "must be >= 1");
  if (experiment == "fit") {
    if (fit_input.empty()) fail("--in", "required");
    if (degree < 1) fail("--degree", "must be >= 1");
    if (!normalize.empty() && normalize != "none" && normalize != "per-qubit")
      fail("--normalize", "expected none or per-qubit");
    if (variance_form != "density" && variance_form != "per-qubit")
      fail("--variance-form", "expected density or per-qubit");
    return;
  }
  if (samples < 1) fail("--samples", "must be >= 1");
  if (max_qubits < 1 || max_qubits > kAbsoluteMaxQubits)
    fail("--max-qubits", "must lie in [1, " + std::to_string(kAbsoluteMaxQubits) + "]");
  if (experiment == "disentangle" && !input.empty()) {
    if (!fs::exists(input)) throw IoError("--input: no such file " + input);
  } else {
    if (qubits.empty()) fail("--qubits", "at least one size required");
    for (int n : qubits) {
      if (n < 2) fail("--qubits", "sizes must be >= 2");
      check_capacity(n, max_qubits);
      if (experiment == "magic" && n > magic_max_qubits)
        throw CapacityError("--qubits: magic is capped at N = " + std::to_string(magic_max_qubits));
    }
    if (std::set<int>(qubits.begin(), qubits.end()).size() != qubits.size()) fail("--qubits", "duplicate size");
    if (lambda_grid.empty()) {
      if (lambda_steps < 1) fail("--lambda-steps", "must be >= 1");
      if (!(lambda_min >= 0.0) || !std::isfinite(lambda_min)) fail("--lambda-min", "must be finite and >= 0");
      if (!(lambda_max >= lambda_min) || !std::isfinite(lambda_max)) fail("--lambda-max", "must be >= --lambda-min");
    } else {
      for (double l : lambda_grid)
        if (!(l >= 0.0) || !std::isfinite(l)) fail("--lambda-grid", "values must be finite and >= 0");
      auto sorted = lambda_grid;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) fail("--lambda-grid", "duplicate value");
    }
  }
  if (experiment == "fidelity-scan") {
    if (!(epsilon > 0.0) || epsilon > 0.1) fail("--epsilon", "must lie in (0, 0.1]");
    if (scheme != "central" && scheme != "forward") fail("--scheme", "expected central or forward");
  }
  if (experiment == "ess") {
    if (hist_bins < 1) fail("--bins", "must be >= 1");
    if (!(hist_max > 0.0)) fail("--r-max", "must be > 0");
  }
  if (experiment == "disentangle") {
    parse_schedule_kind(schedule);
    if (cost != "blocks" && cost != "all") fail("--cost", "expected blocks or all");
    if (tmax == 0 && k == 0) fail("--k", "must be >= 1 when --tmax is not given");
    if (cost == "all")
      for (int n : qubits)
        if (n > 8) throw CapacityError("--cost all: limited to N <= 8");
    for (int n : qubits) make_schedule(*this, n).validate();
  }
  if (experiment == "frame-potential") {
    if (samples < 2) fail("--samples", "K must be >= 2");
    if (t_list.empty()) fail("--t", "at least one moment required");
    for (int t : t_list)
      if (t < 1 || t > 8) fail("--t", "moments must lie in [1, 8]");
  }
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["experiment"] = experiment;
  j["code_version"] = kCodeVersion;
  j["rng"] = kRngVersion;
  j["seed"] = seed;
  j["samples"] = samples;
  j["qubits"] = qubits;
  j["lambda_min"] = lambda_min;
  j["lambda_max"] = lambda_max;
  j["lambda_steps"] = lambda_steps;
  j["lambda_grid_resolved"] = experiment == "fit" ? std::vector<double>{} : grid();
  j["out"] = out;
  j["workers"] = workers;
  j["resume"] = resume;
  j["max_qubits"] = max_qubits;
  if (experiment == "fidelity-scan") {
    j["epsilon"] = epsilon;
    j["scheme"] = scheme;
  } else if (experiment == "ess") {
    j["bins"] = hist_bins;
    j["r_max"] = hist_max;
  } else if (experiment == "magic") {
    j["magic_max_qubits"] = magic_max_qubits;
  } else if (experiment == "disentangle") {
    j["schedule"] = schedule;
    j["beta0"] = beta0;
    j["exponent"] = exponent;
    j["coeff"] = coeff;
    j["tmax"] = tmax;
    j["k"] = k;
    j["cost"] = cost;
    j["input"] = input;
    j["full_recompute"] = full_recompute;
  } else if (experiment == "frame-potential") {
    j["t"] = t_list;
  } else if (experiment == "fit") {
    j["in"] = fit_input;
    j["model"] = model;
    j["column"] = column;
    j["normalize"] = normalize;
    j["statistic"] = statistic;
    j["lambda"] = fit_lambda;
    j["degree"] = degree;
    j["variance_form"] = variance_form;
  }
  return j;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Numerical lab for RK-sign wavefunctions", "rkslab"};
  app.set_config("--config", "", "Read options from a key = value file ([section] per subcommand)");
  app.require_subcommand(1);

  // One config per subcommand, so config-file sections never leak into each
  // other. std::map keeps the bound references stable.
  std::map<std::string, RunConfig> configs;
  auto sub = [&](const std::string& name, const std::string& help) {
    auto* s = app.add_subcommand(name, help);
    RunConfig& c = configs[name];
    c.experiment = name;
    if (name != "fit") add_shared(*s, c);
    return std::pair<CLI::App*, RunConfig*>{s, &c};
  };
  sub("generate", "Write sampled states as RKS1 files plus a manifest");
  sub("entropy-scan", "Half-system entanglement entropy over (N, lambda)");
  {
    auto [s, c] = sub("fidelity-scan", "Fidelity metric g/N over (N, lambda)");
    s->add_option("--epsilon", c->epsilon, "Finite-difference step")->capture_default_str();
    s->add_option("--scheme", c->scheme, "central | forward")->capture_default_str();
  }
  {
    auto [s, c] = sub("ess", "Entanglement-spectrum gap-ratio statistics");
    s->add_option("--bins", c->hist_bins)->capture_default_str();
    s->add_option("--r-max", c->hist_max)->capture_default_str();
  }
  sub("fluctuations", "Ensemble variance of the half-system entropy");
  {
    auto [s, c] = sub("magic", "Stabilizer 2-Renyi entropy");
    s->add_option("--magic-max-qubits", c->magic_max_qubits)->capture_default_str();
  }
  {
    auto [s, c] = sub("disentangle", "Metropolis Clifford disentangler efficiency");
    s->add_option("--schedule", c->schedule, "const | power | quad")->capture_default_str();
    s->add_option("--beta0", c->beta0)->capture_default_str();
    s->add_option("--exponent", c->exponent, "power schedule exponent")->capture_default_str();
    s->add_option("--coeff", c->coeff, "quad schedule coefficient")->capture_default_str();
    s->add_option("--tmax", c->tmax, "Steps (overrides --k)");
    s->add_option("--k", c->k, "t_max = k N^2")->capture_default_str();
    s->add_option("--cost", c->cost, "blocks | all")->capture_default_str();
    s->add_option("--input", c->input, "Anneal one RKS1 state file instead of sampling");
    s->add_flag("--full-recompute", c->full_recompute, "Evaluate the full cost after every proposal");
  }
  {
    auto [s, c] = sub("frame-potential", "Frame potentials log(phi_tilde_t D_t); K = --samples");
    s->add_option("--t", c->t_list, "Moments, e.g. 1,2,3,4")->delimiter(',')->capture_default_str();
  }
  {
    auto [s, c] = sub("fit", "Fit a result table and write fit.json");
    s->add_option("--in", c->fit_input, "Input CSV")->required();
    s->add_option("--out", c->out, "Output directory")->capture_default_str();
    s->add_option("--model", c->model, "derivative-min | theta | inverse-n")->capture_default_str();
    s->add_option("--column", c->column, "Value column (default from the schema)");
    s->add_option("--normalize", c->normalize, "none | per-qubit (default from the schema)");
    s->add_option("--statistic", c->statistic, "Scan-result statistic to select")->capture_default_str();
    s->add_option("--lambda", c->fit_lambda, "Grid point for theta / inverse-n")->capture_default_str();
    s->add_option("--degree", c->degree, "Polynomial degree")->capture_default_str();
    s->add_option("--variance-form", c->variance_form, "density | per-qubit")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    // A config-file section can mark further subcommands as parsed; the
    // first one named on the command line wins.
    const RunConfig& cfg = configs.at(app.get_subcommands().front()->get_name());
    cfg.validate();
    if (cfg.experiment != "fit") {
      ensure_directory(cfg.out);
      write_text_file(fs::path(cfg.out) / (cfg.experiment + ".resolved.json"), cfg.to_json().dump(2) + "\n");
    }
    if (cfg.experiment == "fit") return run_fit(cfg);
    if (cfg.experiment == "disentangle" && !cfg.input.empty()) return run_disentangle_input(cfg);
    return run_scan(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kCapacityError;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << " (seed " << e.seed() << ")\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"rkslab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace rks::app
