#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rks {

// Requested problem size does not fit the configured qubit cap or memory budget.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical routine failed to produce a trustworthy answer (eigensolver
// non-convergence, ill-conditioned fit, non-convergent least squares).
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::uint64_t seed = 0)
      : std::runtime_error(what), seed_(seed) {}
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rks
