#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace rks {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct SampleSummary {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double variance = std::numeric_limits<double>::quiet_NaN();  // unbiased
  double stderr_mean = std::numeric_limits<double>::quiet_NaN();
  std::size_t count = 0;
};

// Two-pass mean / unbiased variance / standard error of the mean.
inline SampleSummary summarize(std::span<const double> xs) noexcept {
  SampleSummary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  CompensatedSum total;
  for (double x : xs) total.add(x);
  s.mean = total.value() / static_cast<double>(xs.size());
  if (xs.size() < 2) {
    s.variance = 0.0;
    s.stderr_mean = 0.0;
    return s;
  }
  CompensatedSum sq;
  for (double x : xs) sq.add((x - s.mean) * (x - s.mean));
  s.variance = sq.value() / static_cast<double>(xs.size() - 1);
  s.stderr_mean = std::sqrt(s.variance / static_cast<double>(xs.size()));
  return s;
}

}  // namespace rks
