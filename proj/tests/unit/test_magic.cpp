#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "../support/oracles.hpp"
#include "rks/clifford.hpp"
#include "rks/error.hpp"
#include "rks/magic.hpp"

using namespace rks;

namespace {

double oracle_expectation(const std::vector<oracle::cd>& psi, const std::string& label) {
  const auto v = oracle::to_vec(psi);
  return (v.adjoint() * oracle::pauli_matrix(label) * v)(0, 0).real();
}

std::vector<oracle::cd> t_state() {
  return {oracle::cd(std::sqrt(0.5), 0.0), std::polar(std::sqrt(0.5), M_PI / 4)};
}

}  // namespace

TEST_SUITE("stabilizer-entropy") {
  TEST_CASE("pauli labels") {
    const auto p = PauliString::from_label("XIYZ");
    CHECK(p.x_mask == 0b0101);
    CHECK(p.z_mask == 0b1100);
    CHECK(p.y_count() == 1);
    CHECK_THROWS_AS(PauliString::from_label("XQ"), std::invalid_argument);
    CHECK_THROWS(PauliString::from_label("IIIX").check_width(3));
    CHECK_NOTHROW(PauliString::from_label("IIIX").check_width(4));
  }

  TEST_CASE("expectations match explicit Kronecker products for every string, N <= 4") {
    for (int n = 1; n <= 4; ++n) {
      const auto c = oracle::random_state(n, 40 + n, true);
      const auto r = oracle::random_state(n, 50 + n, false);
      const auto rr = oracle::real_part(r);
      const std::uint64_t count = std::uint64_t{1} << (2 * n);
      double sq_c = 0, sq_r = 0;
      for (std::uint64_t i = 0; i < count; ++i) {
        const auto label = oracle::label_of(i, n);
        const auto p = PauliString::from_label(label);
        const double ec = pauli_expectation(std::span<const oracle::cd>(c), p);
        const double er = pauli_expectation(std::span<const double>(rr), p);
        CHECK(std::abs(ec - oracle_expectation(c, label)) < 1e-12);
        CHECK(std::abs(er - oracle_expectation(r, label)) < 1e-12);
        if (p.y_count() % 2) CHECK(er == 0.0);
        sq_c += ec * ec;
        sq_r += er * er;
      }
      CHECK(sq_c == doctest::Approx(std::ldexp(1.0, n)).epsilon(1e-12));
      CHECK(sq_r == doctest::Approx(std::ldexp(1.0, n)).epsilon(1e-12));

      double fourth = 0;
      for (std::uint64_t i = 0; i < count; ++i) fourth += std::pow(oracle_expectation(c, oracle::label_of(i, n)), 4);
      CHECK(stabilizer_renyi_2(std::span<const oracle::cd>(c)) ==
            doctest::Approx(n - std::log2(fourth)).epsilon(1e-11));
    }
  }

  TEST_CASE("stabilizer states have zero magic, the T state log2(4/3)") {
    std::vector<double> zero(1 << 6, 0.0);
    zero[0] = 1.0;
    CHECK(std::abs(stabilizer_renyi_2(std::span<const double>(zero))) < 1e-13);
    const auto t = t_state();
    CHECK(stabilizer_renyi_2(std::span<const oracle::cd>(t)) == doctest::Approx(1.0 - std::log2(1.5)).epsilon(1e-13));
    std::vector<double> ghz(1 << 5, 0.0);
    ghz[0] = ghz[31] = std::sqrt(0.5);
    CHECK(std::abs(stabilizer_renyi_2(std::span<const double>(ghz))) < 1e-13);
  }

  TEST_CASE("purity sum rule on RK states") {
    for (int n = 2; n <= 8; ++n) {
      const auto s = build_state(draw_realization(n, 9 * n), 0.6);
      const auto m = pauli_moments(std::span<const double>(s.amplitudes));
      CHECK(m.sum_sq == doctest::Approx(std::ldexp(1.0, n)).epsilon(1e-11));
      CHECK(m.sum_fourth <= m.sum_sq);
    }
  }

  TEST_CASE("invariance under Clifford circuits") {
    const auto s = build_state(draw_realization(8, 3), 0.9);
    const double m0 = stabilizer_renyi_2(s);
    for (std::uint64_t c = 0; c < 100; ++c) {
      auto psi = to_complex(s.amplitudes);
      apply_circuit(psi, random_clifford_circuit(8, 60, 1000 + c));
      CHECK(std::abs(stabilizer_renyi_2(std::span<const Amplitude>(psi)) - m0) < 1e-10);
    }
  }

  TEST_CASE("paths agree: odd-Y skip, direct sums and complex input") {
    for (int n = 2; n <= 6; ++n) {
      const auto s = build_state(draw_realization(n, 17 + n), 0.3);
      const std::span<const double> a(s.amplitudes);
      MagicOptions no_skip;
      no_skip.skip_odd_y = false;
      MagicOptions direct;
      direct.path = PauliPath::Direct;
      const double ref = stabilizer_renyi_2(a);
      CHECK(stabilizer_renyi_2(a, no_skip) == doctest::Approx(ref).epsilon(1e-12));
      CHECK(stabilizer_renyi_2(a, direct) == doctest::Approx(ref).epsilon(1e-12));
      const auto c = to_complex(s.amplitudes);
      CHECK(stabilizer_renyi_2(std::span<const Amplitude>(c)) == doctest::Approx(ref).epsilon(1e-12));
      CHECK(stabilizer_renyi_2(std::span<const Amplitude>(c), direct) == doctest::Approx(ref).epsilon(1e-12));
    }
  }

  TEST_CASE("additivity and bounds") {
    const auto t = t_state();
    const auto r = oracle::random_state(3, 8, true);
    std::vector<oracle::cd> prod;
    for (auto b : r)
      for (auto a : t) prod.push_back(a * b);
    const double m_t = stabilizer_renyi_2(std::span<const oracle::cd>(t));
    const double m_r = stabilizer_renyi_2(std::span<const oracle::cd>(r));
    CHECK(stabilizer_renyi_2(std::span<const oracle::cd>(prod)) == doctest::Approx(m_t + m_r).epsilon(1e-12));

    for (int n : {4, 7, 10}) {
      for (double lambda : {0.0, 1.0, 3.0}) {
        const double m = stabilizer_renyi_2(build_state(draw_realization(n, 2), lambda));
        CHECK(m >= -1e-12);
        CHECK(m <= std::log2((std::ldexp(1.0, n) + 1.0) / 2.0) + 1e-12);
      }
    }
  }

  TEST_CASE("worker count does not change results") {
    const auto s = build_state(draw_realization(10, 4), 0.5);
    MagicOptions one, many;
    many.workers = 3;
    CHECK(stabilizer_renyi_2(s, one) == stabilizer_renyi_2(s, many));
    const EnsembleParams p{6, 0.0, 5, 12};
    const std::vector<double> grid{0.0, 1.0};
    const auto a = magic_scan(p, grid, one);
    const auto b = magic_scan(p, grid, many);
    REQUIRE(a.size() == 2);
    CHECK(a[1].per_sample == b[1].per_sample);
    CHECK(a[1].m2_mean == b[1].m2_mean);
    CHECK(a[0].n_samples == 5);
    CHECK(a[0].per_sample[2] == stabilizer_renyi_2(build_state(draw_realization(p, 2), 0.0)));
  }

  TEST_CASE("capacity limit") {
    const auto s = build_state(draw_realization(13, 1), 0.0);
    CHECK_THROWS_AS(stabilizer_renyi_2(s), CapacityError);
    MagicOptions big;
    big.max_qubits = 13;
    CHECK_NOTHROW(pauli_moments(std::span<const double>(build_state(draw_realization(5, 1), 0.0).amplitudes), big));
  }
}
