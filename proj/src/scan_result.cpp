#include "rks/scan_result.hpp"

#include <ostream>

#include "rks/csv.hpp"
#include "rks/error.hpp"

namespace rks {

const std::vector<std::string>& ScanResult::header() {
  static const std::vector<std::string> h{"experiment", "N",        "lambda",    "statistic",   "mean",
                                          "stderr",     "variance", "n_samples", "master_seed", "code_version"};
  return h;
}

void write_scan_row(std::ostream& out, const ScanRow& r) {
  CsvWriter csv(out, ScanResult::header(), false);
  csv.row(r.experiment, r.n_qubits, r.lambda, r.statistic, r.mean, r.stderr_mean, r.variance, r.n_samples,
          r.master_seed, r.code_version);
}

void ScanResult::write_csv(std::ostream& out) const {
  out << join_header(header()) << '\n';
  for (const auto& r : rows) write_scan_row(out, r);
}

ScanResult ScanResult::read_csv(std::istream& in) {
  const auto table = rks::read_csv(in);
  if (table.header != header()) throw IoError("CSV header does not match the scan-result schema");
  ScanResult result;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    ScanRow r;
    r.experiment = table.text(i, "experiment");
    r.n_qubits = std::stoi(table.text(i, "N"));
    r.lambda = table.number(i, "lambda");
    r.statistic = table.text(i, "statistic");
    r.mean = table.number(i, "mean");
    r.stderr_mean = table.number(i, "stderr");
    r.variance = table.number(i, "variance");
    r.n_samples = std::stoull(table.text(i, "n_samples"));
    r.master_seed = std::stoull(table.text(i, "master_seed"));
    r.code_version = table.text(i, "code_version");
    result.rows.push_back(std::move(r));
  }
  return result;
}

}  // namespace rks
