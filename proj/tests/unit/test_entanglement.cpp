#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numeric>
#include <algorithm>

#include "../support/oracles.hpp"
#include "rks/clifford.hpp"
#include "rks/entanglement.hpp"
#include "rks/states.hpp"

using namespace rks;

namespace {

// Every nonempty proper subset of n qubits.
std::vector<std::vector<int>> all_subsets(int n) {
  std::vector<std::vector<int>> out;
  for (unsigned m = 1; m + 1 < (1u << n); ++m) {
    std::vector<int> a;
    for (int q = 0; q < n; ++q)
      if (m & (1u << q)) a.push_back(q);
    out.push_back(a);
  }
  return out;
}

}  // namespace

TEST_SUITE("entanglement") {
  TEST_CASE("bipartition construction and validation") {
    const Bipartition p(5, {3, 0});
    CHECK(p.subset_a() == std::vector<int>{0, 3});
    CHECK(p.subset_b() == std::vector<int>{1, 2, 4});
    CHECK(p.complement().subset_a() == p.subset_b());
    CHECK(p.separates(0, 1));
    CHECK_FALSE(p.separates(0, 3));
    CHECK(Bipartition::contiguous(6, 4, 3).subset_a() == std::vector<int>{0, 4, 5});
    CHECK(Bipartition::half(7).size_a() == 3);
    CHECK_THROWS_AS(Bipartition(4, {}), std::invalid_argument);
    CHECK_THROWS_AS(Bipartition(4, {0, 1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(Bipartition(4, {1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(Bipartition(4, {4}), std::invalid_argument);
  }

  TEST_CASE("product, Bell and GHZ entropies") {
    std::vector<double> product(16, 0.0);
    product[5] = 1.0;
    CHECK(entanglement_entropy(product, Bipartition::half(4)) == doctest::Approx(0.0).epsilon(1e-14));

    std::vector<double> bell(4, 0.0);
    bell[0] = bell[3] = std::sqrt(0.5);
    CHECK(entanglement_entropy(bell, Bipartition::half(2)) == doctest::Approx(1.0).epsilon(1e-14));

    std::vector<double> ghz(16, 0.0);
    ghz[0] = ghz[15] = std::sqrt(0.5);
    for (const auto& a : all_subsets(4))
      CHECK(entanglement_entropy(ghz, Bipartition(4, a)) == doctest::Approx(1.0).epsilon(1e-13));
  }

  TEST_CASE("fast paths match the dense oracle for N <= 4") {
    for (int n = 2; n <= 4; ++n) {
      for (bool cplx : {false, true}) {
        const auto psi = oracle::random_state(n, 100 + n + 10 * cplx, cplx);
        const auto re = oracle::real_part(psi);
        for (const auto& a : all_subsets(n)) {
          const Bipartition part(n, a);
          const auto dense = oracle::partial_trace(psi, n, a);
          const auto expected = oracle::eigenvalues(dense);
          std::vector<double> got;
          if (cplx) {
            CHECK((reduced_density_matrix(std::span<const oracle::cd>(psi), part) - dense).cwiseAbs().maxCoeff() <
                  1e-12);
            got = spectrum_values(std::span<const oracle::cd>(psi), part);
          } else {
            CHECK((reduced_density_matrix(std::span<const double>(re), part).cast<oracle::cd>() - dense)
                      .cwiseAbs()
                      .maxCoeff() < 1e-12);
            got = spectrum_values(std::span<const double>(re), part);
          }
          REQUIRE(got.size() == expected.size());
          for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - expected[i]) < 1e-10);
          CHECK(std::abs(von_neumann_entropy(got) - oracle::entropy_bits(expected)) < 1e-10);
        }
      }
    }
  }

  TEST_CASE("spectrum of an RK state: trace one, padded, complement-symmetric entropy") {
    const auto s = build_state(draw_realization(9, 31), 0.4);
    const Bipartition big(9, {0, 1, 2, 3, 4, 5});
    const auto spec = spectrum(s, big);
    CHECK(spec.eigenvalues.size() == 64);
    CHECK(std::count(spec.eigenvalues.begin(), spec.eigenvalues.end(), 0.0) >= 64 - 8);
    CHECK(std::accumulate(spec.eigenvalues.begin(), spec.eigenvalues.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::is_sorted(spec.eigenvalues.begin(), spec.eigenvalues.end()));
    const double sa = von_neumann_entropy(spec);
    const double sb = von_neumann_entropy(spectrum(s, big.complement()));
    CHECK(sa == doctest::Approx(sb).epsilon(1e-10));
    CHECK(sa <= 3.0 + 1e-12);
    CHECK(spec.lambda == 0.4);
    CHECK(spec.seed == s.realization_seed);
  }

  TEST_CASE("single-qubit Clifford gates inside A leave the spectrum unchanged") {
    const auto s = build_state(draw_realization(8, 5), 0.2);
    auto psi = to_complex(s.amplitudes);
    const auto part = Bipartition::half(8);
    const auto before = spectrum_values(std::span<const Amplitude>(psi), part);
    for (int q : part.subset_a()) {
      apply_gate(psi, CliffordGate::h(q));
      apply_gate(psi, CliffordGate::s(q));
    }
    apply_gate(psi, CliffordGate::cnot(0, 2));
    const auto after = spectrum_values(std::span<const Amplitude>(psi), part);
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(std::abs(before[i] - after[i]) < 1e-10);
  }

  TEST_CASE("entropy bounds over the lambda range") {
    const auto r = draw_realization(10, 8);
    for (double lambda : {0.0, 0.5, 1.0, 3.0}) {
      const double s = von_neumann_entropy(spectrum(build_state(r, lambda), Bipartition::half(10)));
      CHECK(s >= 0.0);
      CHECK(s <= 5.0 + 1e-12);
    }
  }

  TEST_CASE("mismatched sizes are rejected") {
    const auto s = build_state(draw_realization(6, 1), 0.0);
    CHECK_THROWS_AS(spectrum(s, Bipartition::half(5)), std::invalid_argument);
    std::vector<double> bad(10, 0.1);
    CHECK_THROWS_AS(spectrum_values(std::span<const double>(bad), Bipartition::half(4)), std::invalid_argument);
  }
}
