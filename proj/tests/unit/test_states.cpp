#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rks/error.hpp"
#include "rks/state_io.hpp"
#include "rks/states.hpp"
#include "rks/stats.hpp"

using namespace rks;

namespace {

double norm2(const RkState& s) {
  CompensatedSum acc;
  for (double a : s.amplitudes) acc.add(a * a);
  return acc.value();
}

}  // namespace

TEST_SUITE("core-states") {
  TEST_CASE("states are normalized for any lambda") {
    const auto r = draw_realization(10, 123);
    for (double lambda : {0.0, 0.3, 1.0, 5.0, 40.0}) {
      const auto s = build_state(r, lambda);
      CHECK(std::abs(norm2(s) - 1.0) < 1e-12);
      for (double a : s.amplitudes) CHECK(std::isfinite(a));
    }
  }

  TEST_CASE("lambda = 0 gives equal magnitudes with the drawn signs") {
    const auto r = draw_realization(6, 9);
    const auto s = build_state(r, 0.0);
    const double mag = std::pow(2.0, -3.0);
    for (std::size_t i = 0; i < s.dim(); ++i) CHECK(s.amplitudes[i] == doctest::Approx(r.signs[i] * mag).epsilon(1e-14));
  }

  TEST_CASE("large lambda concentrates on the lowest energy") {
    const auto r = draw_realization(8, 4);
    const auto s = build_state(r, 200.0);
    std::size_t ground = 0;
    for (std::size_t i = 1; i < r.dim(); ++i)
      if (r.energies[i] < r.energies[ground]) ground = i;
    CHECK(std::abs(s.amplitudes[ground]) == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("realizations are pure functions of (seed, N, index)") {
    EnsembleParams p;
    p.n_qubits = 8;
    p.n_samples = 4;
    p.master_seed = 77;
    const auto a = draw_realization(p, 2), b = draw_realization(p, 2), c = draw_realization(p, 3);
    CHECK(a.energies == b.energies);
    CHECK(a.signs == b.signs);
    CHECK(a.energies != c.energies);
    p.n_qubits = 9;
    CHECK(draw_realization(p, 2).seed != a.seed);
    CHECK_THROWS_AS(draw_realization(p, 4), std::out_of_range);
  }

  TEST_CASE("energy statistics follow N(0, N) with balanced signs") {
    const int n = 14;
    const auto r = draw_realization(n, 2024);
    const auto s = summarize(r.energies);
    const double count = static_cast<double>(r.dim());
    CHECK(std::abs(s.mean) < 5.0 * std::sqrt(n / count));
    CHECK(std::abs(s.variance / n - 1.0) < 5.0 * std::sqrt(2.0 / count));
    double plus = 0;
    for (auto w : r.signs) {
      CHECK((w == 1 || w == -1));
      plus += w > 0;
    }
    CHECK(std::abs(plus - count / 2) < 5.0 * std::sqrt(count / 4));
  }

  TEST_CASE("overlap is symmetric and unit on the diagonal") {
    const auto r1 = draw_realization(7, 1), r2 = draw_realization(7, 2);
    const auto a = build_state(r1, 0.4), b = build_state(r2, 0.7);
    CHECK(overlap(a, b) == overlap(b, a));
    CHECK(overlap(a, a) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK_THROWS_AS(overlap(a, build_state(draw_realization(6, 1), 0.4)), std::invalid_argument);
  }

  TEST_CASE("log_partition agrees with the direct sum and stays finite") {
    const std::vector<double> e{-1.5, 0.2, 2.0, -0.3};
    for (double beta : {-2.0, 0.0, 0.5, 3.0}) {
      double z = 0;
      for (double x : e) z += std::exp(-beta * x);
      CHECK(log_partition(e, beta) == doctest::Approx(std::log(z)).epsilon(1e-14));
    }
    CHECK(log_partition(e, 1e4) == doctest::Approx(1.5e4).epsilon(1e-14));
  }

  TEST_CASE("invalid parameters are rejected") {
    EnsembleParams p;
    p.n_qubits = 21;
    CHECK_THROWS_AS(p.validate(), CapacityError);
    p.n_qubits = 4;
    p.lambda = -0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK_THROWS_AS(build_state(draw_realization(4, 1), -1.0), std::invalid_argument);
    CHECK_THROWS_AS(check_capacity(31, 40), CapacityError);
  }

  TEST_CASE("binary dump round-trips bit-exactly") {
    const auto s = build_state(draw_realization(5, 17), 0.35);
    std::stringstream buf;
    write_state(buf, s);
    CHECK(buf.str().size() == 4 + 4 + 8 + 8 + 8 * 32);
    CHECK(buf.str().substr(0, 4) == "RKS1");
    const auto back = read_state(buf);
    CHECK(back.n_qubits == 5);
    CHECK(back.lambda == s.lambda);
    CHECK(back.realization_seed == s.realization_seed);
    CHECK(back.amplitudes == s.amplitudes);
  }

  TEST_CASE("damaged dumps raise I/O errors") {
    const auto s = build_state(draw_realization(3, 1), 0.0);
    std::stringstream buf;
    write_state(buf, s);
    std::string bytes = buf.str();
    std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_state(truncated), IoError);
    bytes[0] = 'X';
    std::stringstream bad_magic(bytes);
    CHECK_THROWS_AS(read_state(bad_magic), IoError);
    CHECK_THROWS_AS(load_state("/nonexistent/dir/state.rks"), IoError);
  }
}
