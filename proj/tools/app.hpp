#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace rks::app {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kCapacityError = 3,
  kIoError = 4,
  kNumericalError = 5,
};

// Every option of every experiment with its default; the resolved copy is
// written next to the outputs.
struct RunConfig {
  std::string experiment;

  std::vector<int> qubits{8};
  double lambda_min = 0.0;
  double lambda_max = 1.5;
  int lambda_steps = 16;
  std::vector<double> lambda_grid;  // overrides min/max/steps when given
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  std::string out = ".";
  unsigned workers = 1;
  bool resume = false;
  int max_qubits = 20;

  // fidelity-scan
  double epsilon = 1e-3;
  std::string scheme = "central";

  // ess
  int hist_bins = 60;
  double hist_max = 6.0;

  // magic
  int magic_max_qubits = 12;

  // disentangle
  std::string schedule = "const";
  double beta0 = 400.0;
  double exponent = 0.1;
  double coeff = 0.0;
  std::size_t tmax = 0;  // 0: use k N^2
  std::size_t k = 100;
  std::string cost = "blocks";
  std::string input;
  bool full_recompute = false;

  // frame-potential
  std::vector<int> t_list{1, 2, 3, 4};

  // fit
  std::string fit_input;
  std::string model = "derivative-min";
  std::string column;     // default depends on the input schema
  std::string normalize;  // none | per-qubit; default depends on the schema
  std::string statistic = "S_half_bits";
  double fit_lambda = 0.0;
  int degree = 7;
  std::string variance_form = "density";

  std::vector<double> grid() const;
  // Field-level checks; throws ConfigError / CapacityError.
  void validate() const;
  nlohmann::ordered_json to_json() const;
};

// Parses arguments (argv[0] is the program name) and runs the experiment.
// Progress goes to stderr. Returns an ExitCode.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace rks::app
