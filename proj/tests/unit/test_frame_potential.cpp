#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "rks/error.hpp"
#include "rks/frame_potential.hpp"
#include "rks/stats.hpp"

using namespace rks;

namespace {

std::vector<RkState> ensemble(int n, double lambda, std::size_t k, std::uint64_t master) {
  const EnsembleParams p{n, lambda, k, master};
  std::vector<RkState> out;
  for (std::size_t s = 0; s < k; ++s) out.push_back(build_state(draw_realization(p, s), lambda));
  return out;
}

RkState basis_state(int n, std::size_t index) {
  RkState s;
  s.n_qubits = n;
  s.amplitudes.assign(std::size_t{1} << n, 0.0);
  s.amplitudes[index] = 1.0;
  return s;
}

}  // namespace

TEST_SUITE("frame-potential") {
  TEST_CASE("trivial ensembles") {
    const std::vector<RkState> one{basis_state(3, 2)};
    const auto m1 = frame_potential(pairwise_overlaps(one), 2);
    CHECK(m1.phi == 1.0);
    CHECK(m1.phi_tilde == 0.0);
    const std::vector<RkState> two{basis_state(3, 2), basis_state(3, 5)};
    const auto m2 = frame_potential(pairwise_overlaps(two), 1);
    CHECK(m2.phi == doctest::Approx(0.5));
    CHECK(m2.phi_tilde == 0.0);
    const std::vector<RkState> same{basis_state(3, 2), basis_state(3, 2)};
    CHECK(frame_potential(pairwise_overlaps(same), 3).phi == doctest::Approx(1.0));
    CHECK_THROWS_AS(frame_potential(pairwise_overlaps(one), 0), std::invalid_argument);
  }

  TEST_CASE("agrees with a direct double loop") {
    const auto e = ensemble(7, 0.6, 25, 4);
    const auto table = pairwise_overlaps(e);
    for (int t = 1; t <= 4; ++t) {
      double direct = 0;
      for (const auto& a : e)
        for (const auto& b : e) {
          double o = 0;
          for (std::size_t i = 0; i < a.dim(); ++i) o += a.amplitudes[i] * b.amplitudes[i];
          direct += std::pow(o * o, t);
        }
      direct /= 25.0 * 25.0;
      const auto m = frame_potential(table, t);
      CHECK(m.phi == doctest::Approx(direct).epsilon(1e-10));
      CHECK(m.phi >= 1.0 / 25.0);
      CHECK(m.phi_tilde >= 0.0);
    }
    CHECK(table.at(3, 9) == table.at(9, 3));
    CHECK(table.at(3, 9) == doctest::Approx(std::abs(overlap(e[3], e[9]))).epsilon(1e-12));
  }

  TEST_CASE("non-increasing in t and exactly invariant under reordering") {
    auto e = ensemble(6, 1.0, 40, 9);
    double prev = 2.0;
    std::vector<double> phis;
    for (int t = 1; t <= 5; ++t) {
      const double phi = frame_potential(pairwise_overlaps(e), t).phi;
      CHECK(phi <= prev);
      prev = phi;
      phis.push_back(phi);
    }
    std::reverse(e.begin(), e.end());
    std::rotate(e.begin(), e.begin() + 13, e.end());
    for (int t = 1; t <= 5; ++t) CHECK(frame_potential(pairwise_overlaps(e), t).phi == phis[t - 1]);
  }

  TEST_CASE("design benchmark") {
    CHECK(design_benchmark(1, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(design_benchmark(1, 2) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
    CHECK(design_benchmark(3, 3) == doctest::Approx(std::log(120.0)).epsilon(1e-14));
    using boost::multiprecision::cpp_int;
    const cpp_int d = 4096;
    const cpp_int binom = d * (d + 1) * (d + 2) * (d + 3) / 24;
    CHECK(design_benchmark(12, 4) == doctest::Approx(std::log(binom.convert_to<double>())).epsilon(1e-14));
    CHECK_THROWS_AS(design_benchmark(4, 0), std::invalid_argument);
  }

  TEST_CASE("random-sign states at lambda = 0 saturate the first moment") {
    const EnsembleParams p{8, 0.0, 200, 3};
    const std::vector<double> grid{0.0};
    const std::vector<int> ts{1, 2};
    const auto rows = design_scan(p, grid, ts);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].t == 1);
    CHECK(rows[0].k == 200);
    CHECK(std::abs(rows[0].log_phi_tilde_dt - std::log(199.0 / 200.0)) < 4.0 * rows[0].log_stderr);
  }

  TEST_CASE("estimates at K and 2K agree; standard error tracks the spread") {
    std::vector<double> reps;
    double mean_se = 0;
    const int n_rep = 30;
    for (int r = 0; r < n_rep; ++r) {
      const auto m = frame_potential(pairwise_overlaps(ensemble(6, 0.8, 40, 100 + r)), 2);
      reps.push_back(m.phi_tilde);
      mean_se += m.phi_tilde_stderr / n_rep;
    }
    const auto s = summarize(reps);
    const double spread = std::sqrt(s.variance);
    CHECK(mean_se > 0.6 * spread);
    CHECK(mean_se < 1.6 * spread);

    const auto small = frame_potential(pairwise_overlaps(ensemble(6, 0.8, 100, 7)), 2);
    const auto large = frame_potential(pairwise_overlaps(ensemble(6, 0.8, 200, 8)), 2);
    const double k_ratio = (99.0 / 100.0) / (199.0 / 200.0);
    CHECK(std::abs(small.phi_tilde / k_ratio - large.phi_tilde) <
          4.0 * std::hypot(small.phi_tilde_stderr, large.phi_tilde_stderr));
  }

  TEST_CASE("scan ordering and validation") {
    const EnsembleParams p{5, 0.0, 10, 1};
    const std::vector<double> grid{0.0, 0.5};
    const std::vector<int> ts{1, 3};
    const auto a = design_scan(p, grid, ts, 1);
    const auto b = design_scan(p, grid, ts, 3);
    REQUIRE(a.size() == 4);
    CHECK(a[1].lambda == 0.0);
    CHECK(a[1].t == 3);
    CHECK(a[2].lambda == 0.5);
    for (std::size_t i = 0; i < 4; ++i) CHECK(a[i].log_phi_tilde_dt == b[i].log_phi_tilde_dt);
    const EnsembleParams single{5, 0.0, 1, 1};
    CHECK_THROWS_AS(design_scan(single, grid, ts), ConfigError);
  }
}
