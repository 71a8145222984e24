#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rks/scan_result.hpp"
#include "rks/states.hpp"

namespace rks {

struct FitParameter {
  std::string name;
  double value = 0.0;
  double sigma = 0.0;  // 1-sigma; +inf when undetermined
};

struct FitResult {
  std::string model;
  std::vector<FitParameter> params;
  double r2 = 0.0;
  double residual_norm = 0.0;
  bool degenerate = false;
  std::string inputs;  // provenance: which scan rows were fitted

  const FitParameter& param(const std::string& name) const;
};

// {model, params: [{name, value, sigma}], r2, residual_norm, degenerate, inputs};
// non-finite numbers are written as null.
nlohmann::json to_json(const FitResult& fit);
FitResult fit_from_json(const nlohmann::json& j);

// Least-squares polynomial in the affinely rescaled variable
// t = (2x - lo - hi) / (hi - lo), which keeps the Vandermonde system well
// conditioned on any interval.
class Polynomial {
 public:
  Polynomial(std::vector<double> coefficients, double lo, double hi);

  double operator()(double x) const noexcept;
  Polynomial derivative() const;
  int degree() const noexcept { return static_cast<int>(coef_.size()) - 1; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  std::vector<double> coef_;  // in t, lowest order first
  double lo_, hi_;
};

inline constexpr int kDefaultPolyDegree = 7;
inline constexpr double kMaxPolyCondition = 1e10;

// Throws NumericalError when the design matrix condition number exceeds
// kMaxPolyCondition, std::invalid_argument with fewer than degree+2 points.
Polynomial polyfit(std::span<const double> xs, std::span<const double> ys, int degree = kDefaultPolyDegree);

// Location of the minimum of the fitted polynomial's derivative within
// [xs.front(), xs.back()]: 1e4-point scan, then a parabolic refinement.
double polyfit_derivative_min(std::span<const double> xs, std::span<const double> ys,
                              int degree = kDefaultPolyDegree);

// lambda_M(N) = A exp(-B / N) + C by Levenberg-Marquardt. `sigmas` (optional)
// weight the residuals; uncertainties come from the Jacobian covariance scaled
// by the reduced chi^2. Parameters: A, B, C and the extrapolate A + C.
FitResult exp_extrapolate(std::span<const double> ns, std::span<const double> lambda_m,
                          std::span<const double> sigmas = {});

enum class VarianceForm {
  // log2 Var(S/N) = log2[Var(S) / N^2]
  EntropyDensity,
  // log2[Var(S) / N]
  PerQubit,
};

// Slope of log2(variance-form) against N is -theta. Parameters: theta, const.
FitResult theta_exponent(std::span<const double> ns, std::span<const double> variances,
                         VarianceForm form = VarianceForm::EntropyDensity);

// Ordinary least squares y = slope x + intercept. Parameters: slope, intercept.
FitResult linear_extrapolate(std::span<const double> xs, std::span<const double> ys);

// Abscissae where y_b - y_a changes sign, by linear interpolation between
// grid points (exact zeros reported once).
std::vector<double> curve_crossings(std::span<const double> xs, std::span<const double> ya,
                                    std::span<const double> yb);

// The crossing at which the curve expected to fall faster (yb) drops below
// ya for the last time, on polynomial-smoothed curves evaluated on a dense
// grid. nullopt if yb never ends below ya.
std::optional<double> principal_crossing(std::span<const double> xs, std::span<const double> ya,
                                         std::span<const double> yb, int degree = kDefaultPolyDegree);

// Half-system entropy statistics over the ensemble at every lambda: one
// ScanResult row per lambda with statistic "S_half_bits" carrying the mean,
// its standard error, and the unbiased sample variance. Realizations are
// shared across the grid. params.lambda is ignored.
ScanResult variance_scan(const EnsembleParams& params, std::span<const double> lambda_grid, unsigned workers = 1,
                         const std::string& experiment = "fluctuations",
                         std::vector<std::vector<double>>* per_sample_entropies = nullptr);

}  // namespace rks
