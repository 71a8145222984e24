#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "app.hpp"
#include "rks/csv.hpp"
#include "rks/scaling.hpp"
#include "rks/scan_result.hpp"
#include "rks/state_io.hpp"

namespace fs = std::filesystem;
using rks::app::run;

namespace {

// Fresh scratch directory per test case, removed afterwards.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) {
    dir = fs::temp_directory_path() / ("rkslab_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& rel) const { return (dir / rel).string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

rks::CsvTable table(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return rks::read_csv(in);
}

std::vector<std::string> scan_args(const std::string& sub, const std::string& out) {
  return {sub, "--qubits", "4,6", "--lambda-grid", "0,0.5,1", "--samples", "5", "--seed", "11", "--out", out};
}

std::vector<std::string> with(std::vector<std::string> args, std::initializer_list<std::string> extra) {
  args.insert(args.end(), extra);
  return args;
}

// Synthetic scan-result table: mean(N, lambda) = N f_N(lambda).
template <class F>
void write_scan(const fs::path& p, const std::vector<int>& ns, const std::vector<double>& grid, F f) {
  rks::ScanResult r;
  for (int n : ns)
    for (double l : grid) {
      rks::ScanRow row;
      row.experiment = "entropy-scan";
      row.n_qubits = n;
      row.lambda = l;
      row.statistic = "S_half_bits";
      row.mean = f(n, l);
      row.stderr_mean = 0.01;
      row.variance = std::exp2(-0.5 * n) * n * n;
      row.n_samples = 10;
      row.master_seed = 1;
      r.rows.push_back(row);
    }
  std::ofstream out(p, std::ios::binary);
  r.write_csv(out);
}

std::vector<double> grid_points(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * i / (n - 1));
  return g;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("entropy scan writes one row per cell and a resolved config") {
    Scratch s("scan");
    REQUIRE(run(scan_args("entropy-scan", s / "a")) == 0);
    const auto t = table(s / "a/entropy-scan.csv");
    CHECK(t.header == rks::ScanResult::header());
    REQUIRE(t.rows.size() == 6);
    CHECK(t.text(0, "N") == "4");
    CHECK(t.number(1, "lambda") == 0.5);
    CHECK(t.text(5, "N") == "6");
    CHECK(t.text(3, "experiment") == "entropy-scan");
    for (std::size_t i = 0; i < 6; ++i) CHECK(t.number(i, "mean") > 0.0);
    const auto j = nlohmann::json::parse(slurp(s / "a/entropy-scan.resolved.json"));
    CHECK(j["seed"] == 11);
    CHECK(j["samples"] == 5);
    CHECK(j["lambda_grid_resolved"].size() == 3);
    CHECK(j["experiment"] == "entropy-scan");
  }

  TEST_CASE("reruns are byte identical and worker independent") {
    Scratch s("determinism");
    for (const std::string sub : {"entropy-scan", "fidelity-scan", "ess", "magic", "frame-potential"}) {
      CAPTURE(sub);
      REQUIRE(run(scan_args(sub, s / "a")) == 0);
      REQUIRE(run(scan_args(sub, s / "b")) == 0);
      REQUIRE(run(with(scan_args(sub, s / "c"), {"--workers", "3"})) == 0);
      const auto a = slurp(s / ("a/" + sub + ".csv"));
      CHECK(!a.empty());
      CHECK(a == slurp(s / ("b/" + sub + ".csv")));
      CHECK(a == slurp(s / ("c/" + sub + ".csv")));
    }
  }

  TEST_CASE("resume after an interruption equals a single pass") {
    Scratch s("resume");
    REQUIRE(run(scan_args("fluctuations", s / "full")) == 0);
    const std::string full = slurp(s / "full/fluctuations.csv");
    // Header, first two complete cells and a torn third line.
    std::istringstream lines(full);
    std::string line, partial;
    for (int i = 0; i < 3 && std::getline(lines, line); ++i) partial += line + "\n";
    std::getline(lines, line);
    partial += line.substr(0, line.size() / 2);
    fs::create_directories(s.dir / "part");
    spit(s / "part/fluctuations.csv", partial);
    REQUIRE(run(with(scan_args("fluctuations", s / "part"), {"--resume"})) == 0);
    CHECK(slurp(s / "part/fluctuations.csv") == full);

    // Frame potential: several rows per cell; a cell with missing rows is recomputed.
    REQUIRE(run(with(scan_args("frame-potential", s / "fp"), {"--t", "1,2"})) == 0);
    const std::string fp = slurp(s / "fp/frame-potential.csv");
    std::istringstream fl(fp);
    std::string fpart;
    for (int i = 0; i < 4 && std::getline(fl, line); ++i) fpart += line + "\n";
    spit(s / "fp/frame-potential.csv", fpart);
    REQUIRE(run(with(scan_args("frame-potential", s / "fp"), {"--t", "1,2", "--resume"})) == 0);
    CHECK(slurp(s / "fp/frame-potential.csv") == fp);
  }

  TEST_CASE("every experiment runs") {
    Scratch s("smoke");
    REQUIRE(run({"generate", "--qubits", "4", "--lambda-grid", "0.5", "--samples", "2", "--out", s / "g"}) == 0);
    const auto gen = table(s / "g/generate.csv");
    REQUIRE(gen.rows.size() == 2);
    const auto state = rks::load_state(s.dir / "g" / gen.text(1, "file"));
    CHECK(state.n_qubits == 4);
    CHECK(state.lambda == 0.5);

    REQUIRE(run({"disentangle", "--qubits", "4", "--lambda-grid", "0,1.5", "--samples", "3", "--tmax", "200",
                 "--out", s / "d"}) == 0);
    const auto d = table(s / "d/disentangle.csv");
    REQUIRE(d.rows.size() == 2);
    CHECK(d.text(0, "schedule_descriptor") == "const(beta0=400)");
    CHECK(d.text(0, "t_max") == "200");

    REQUIRE(run({"disentangle", "--input", s / ("g/" + gen.text(1, "file")), "--samples", "2", "--tmax", "100",
                 "--out", s / "di"}) == 0);
    CHECK(table(s / "di/disentangle.csv").rows.size() == 1);

    REQUIRE(run({"ess", "--qubits", "6", "--lambda-grid", "0", "--samples", "4", "--bins", "12", "--out",
                 s / "e"}) == 0);
    CHECK(table(s / "e/ess_hist_N6_lambda0.csv").rows.size() == 13);
    CHECK(table(s / "e/ess.csv").number(0, "n_ratios") > 0);

    REQUIRE(run({"frame-potential", "--qubits", "5", "--lambda-grid", "0,1", "--samples", "6", "--t", "2,4",
                 "--out", s / "f"}) == 0);
    const auto f = table(s / "f/frame-potential.csv");
    REQUIRE(f.rows.size() == 4);
    CHECK(f.text(1, "t") == "4");
    CHECK(f.text(1, "K") == "6");
  }

  TEST_CASE("config file sections apply per subcommand") {
    Scratch s("config");
    spit(s / "run.ini", "[entropy-scan]\nsamples = 3\nqubits = [4]\nlambda-grid = [0.25]\n[magic]\nsamples = 9\n");
    REQUIRE(run({"--config", s / "run.ini", "entropy-scan", "--out", s / "o"}) == 0);
    const auto t = table(s / "o/entropy-scan.csv");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.text(0, "n_samples") == "3");
    CHECK(t.number(0, "lambda") == 0.25);
  }

  TEST_CASE("fit recovers a planted derivative minimum") {
    Scratch s("fit");
    const std::vector<int> ns{8, 10, 12, 14, 16};
    const auto grid = grid_points(0.0, 1.5, 31);
    // d(S/N)/dlambda = (lambda - m_N)^2 - 1 is smallest at m_N = 0.2 exp(-10/N) + 0.28.
    auto planted = [](int n) { return 0.2 * std::exp(-10.0 / n) + 0.28; };
    write_scan(s.dir / "scan.csv", ns, grid, [&](int n, double l) {
      return n * (std::pow(l - planted(n), 3) / 3.0 - l);
    });
    REQUIRE(run({"fit", "--in", s / "scan.csv", "--out", s / "o"}) == 0);
    const auto fit = rks::fit_from_json(nlohmann::json::parse(slurp(s / "o/fit.json")));
    for (int n : ns) CHECK(fit.param("lambda_min[N=" + std::to_string(n) + "]").value == doctest::Approx(planted(n)).epsilon(1e-6));
    CHECK(fit.param("A+C").value == doctest::Approx(0.48).epsilon(1e-4));
    CHECK(fit.param("B").value == doctest::Approx(10.0).epsilon(1e-3));
    CHECK(fit.inputs.find("N={8,10,12,14,16}") != std::string::npos);

    // Size-independent minimum: the exponential law is degenerate.
    write_scan(s.dir / "flat.csv", ns, grid, [](int, double l) { return std::pow(l - 0.48, 3) / 3.0 - l; });
    REQUIRE(run({"fit", "--in", s / "flat.csv", "--normalize", "none", "--out", s / "flat"}) == 0);
    const auto flat = rks::fit_from_json(nlohmann::json::parse(slurp(s / "flat/fit.json")));
    CHECK(flat.degenerate);
    CHECK(flat.param("lambda_min_mean").value == doctest::Approx(0.48).epsilon(1e-6));
    CHECK(flat.param("A+C").value == doctest::Approx(0.48).epsilon(1e-6));
  }

  TEST_CASE("theta and inverse-N fits") {
    Scratch s("fit2");
    const std::vector<int> ns{8, 10, 12, 14};
    write_scan(s.dir / "scan.csv", ns, std::vector<double>{0.0, 1.5},
               [](int n, double l) { return n * (0.5 - 0.2 * l) + 1.0; });
    REQUIRE(run({"fit", "--in", s / "scan.csv", "--model", "theta", "--lambda", "1.5", "--out", s / "t"}) == 0);
    const auto theta = rks::fit_from_json(nlohmann::json::parse(slurp(s / "t/fit.json")));
    CHECK(theta.param("theta").value == doctest::Approx(0.5).epsilon(1e-10));

    REQUIRE(run({"fit", "--in", s / "scan.csv", "--model", "inverse-n", "--column", "mean", "--normalize", "none",
                 "--lambda", "0", "--out", s / "i"}) == 0);
    const auto inv = rks::fit_from_json(nlohmann::json::parse(slurp(s / "i/fit.json")));
    // mean = 0.5 N + 1 is not linear in 1/N; per qubit it is.
    REQUIRE(run({"fit", "--in", s / "scan.csv", "--model", "inverse-n", "--lambda", "0", "--out", s / "p"}) == 0);
    const auto per = rks::fit_from_json(nlohmann::json::parse(slurp(s / "p/fit.json")));
    CHECK(per.param("intercept").value == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(inv.r2 < per.r2);
    CHECK(run({"fit", "--in", s / "scan.csv", "--model", "theta", "--lambda", "0.7", "--out", s / "x"}) == 2);
  }

  TEST_CASE("exit codes") {
    Scratch s("exit");
    CHECK(run({"entropy-scan", "--lambda-min", "-1", "--out", s / "a"}) == 2);
    CHECK(run({"entropy-scan", "--samples", "0", "--out", s / "a"}) == 2);
    CHECK(run({"nonsense"}) == 2);
    CHECK(run({"entropy-scan", "--bogus-flag"}) == 2);
    CHECK(run({"fidelity-scan", "--scheme", "sideways", "--out", s / "a"}) == 2);
    CHECK(run({"magic", "--qubits", "14", "--out", s / "a"}) == 3);
    CHECK(run({"entropy-scan", "--qubits", "22", "--out", s / "a"}) == 3);
    CHECK(run({"fit", "--in", s / "missing.csv", "--out", s / "a"}) == 4);
    spit(s / "torn.csv", "N,lambda,other\n1,2\n");
    CHECK(run({"fit", "--in", s / "torn.csv", "--column", "other", "--out", s / "a"}) == 4);
    fs::create_directories(s.dir / "r");
    spit(s / "r/entropy-scan.csv", "N,lambda,something_else\n4,0,1\n");
    CHECK(run(with(scan_args("entropy-scan", s / "r"), {"--resume"})) == 4);
    spit(s / "blocker", "");
    CHECK(run(with(scan_args("entropy-scan", s / "blocker/sub"), {})) == 4);
  }
}
