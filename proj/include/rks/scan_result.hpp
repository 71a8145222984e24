#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rks {

inline constexpr const char* kCodeVersion = "rkslab-1.0.0";

struct ScanRow {
  std::string experiment;
  int n_qubits = 0;
  double lambda = 0.0;
  std::string statistic;
  double mean = 0.0;
  double stderr_mean = 0.0;
  double variance = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t master_seed = 0;
  std::string code_version = kCodeVersion;

  friend bool operator==(const ScanRow&, const ScanRow&) = default;
};

// Columns: experiment,N,lambda,statistic,mean,stderr,variance,n_samples,master_seed,code_version
struct ScanResult {
  std::vector<ScanRow> rows;

  static const std::vector<std::string>& header();
  void write_csv(std::ostream& out) const;
  static ScanResult read_csv(std::istream& in);
};

void write_scan_row(std::ostream& out, const ScanRow& row);

}  // namespace rks
