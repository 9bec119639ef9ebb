#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "flexp2/benchmark.hpp"
#include "flexp2/commands.hpp"
#include "flexp2/errors.hpp"
#include "flexp2/io.hpp"
#include "flexp2/synth.hpp"
#include "test_util.hpp"

using namespace flexp2;
namespace fs = std::filesystem;

namespace {
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("flexp2_io_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RaggedTensor wild_tensor(std::uint64_t seed) {
  rng::Stream stream(seed);
  const Index n = 2 + static_cast<Index>(stream.next_u64() % 4);
  const Index K = 1 + static_cast<Index>(stream.next_u64() % 3);
  std::vector<Matrix> slices;
  for (Index k = 0; k < K; ++k) {
    const Index m = 1 + static_cast<Index>(stream.next_u64() % 5);
    Matrix s(n, m);
    for (Index j = 0; j < m; ++j)
      for (Index i = 0; i < n; ++i) {
        const int exponent = static_cast<int>(stream.next_u64() % 601) - 300;
        s(i, j) = (stream.next_unit() - 0.5) * std::ldexp(1.0, exponent);
      }
    slices.push_back(std::move(s));
  }
  return RaggedTensor::from_slices(std::move(slices));
}
}  // namespace

TEST_CASE("format_double round-trips exactly") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e300, 0.0, -0.0, 123456789.123456789}) {
    const std::string s = format_double(x);
    std::istringstream in(s);
    double back = 0.0;
    in >> back;
    CHECK(std::signbit(back) == std::signbit(x));
    CHECK(back == x);
  }
}

TEST_CASE("P2RT round-trip is bit exact") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RaggedTensor t = wild_tensor(seed);
    std::stringstream buf;
    write_p2rt(t, buf);
    const RaggedTensor back = read_p2rt(buf);
    REQUIRE(back.num_slices() == t.num_slices());
    for (std::size_t k = 0; k < t.slices.size(); ++k) CHECK(back.slices[k] == t.slices[k]);
    CHECK(back.total_norm == t.total_norm);
  }
}

TEST_CASE("ground truth round-trips bit exactly") {
  SynthSpec spec;
  spec.n = 5;
  spec.m = 4;
  spec.K = 3;
  spec.rank = 2;
  spec.sigma = 2.5e-4;
  spec.seed = 99;
  auto [tensor, truth] = gen_dataset(spec);
  std::stringstream buf;
  write_truth(truth, buf);
  const SynthGroundTruth back = read_truth(buf);
  CHECK(back.A == truth.A);
  CHECK(back.C == truth.C);
  for (std::size_t k = 0; k < truth.B.size(); ++k) CHECK(back.B[k] == truth.B[k]);
  CHECK(back.sigma == truth.sigma);
  CHECK(back.seed == truth.seed);
}

TEST_CASE("parse errors carry line numbers") {
  SUBCASE("wrong magic") {
    std::istringstream in("P3RT 1\n");
    CHECK_THROWS_AS(read_p2rt(in), flexp2::ParseError);
  }
  SUBCASE("bad value line") {
    std::istringstream in("P2RT 1\n2 1\n2\n1.0 2.0\n1.0 oops\n");
    try {
      read_p2rt(in);
      FAIL("expected a parse error");
    } catch (const flexp2::ParseError& e) {
      CHECK(e.line == 5);
    }
  }
  SUBCASE("truncated file") {
    std::istringstream in("P2RT 1\n3 1\n2\n1.0 2.0\n");
    CHECK_THROWS_AS(read_p2rt(in), flexp2::ParseError);
  }
  SUBCASE("truth section with bad dimensions") {
    std::istringstream in("A -2 1\n");
    CHECK_THROWS_AS(read_truth(in), flexp2::ParseError);
  }
}

TEST_CASE("cmd_simulate round-trips the generated dataset") {
  TempDir dir;
  SynthSpec spec;
  spec.n = 6;
  spec.m = 5;
  spec.K = 4;
  spec.rank = 2;
  spec.sigma = 1e-3;
  spec.seed = 123;
  const auto path = dir.file("data.p2rt");
  CHECK(cmd_simulate(spec, path, false) == 123);

  auto [expected, truth] = gen_dataset(spec);
  const RaggedTensor loaded = load_p2rt(path);
  for (std::size_t k = 0; k < expected.slices.size(); ++k) CHECK(loaded.slices[k] == expected.slices[k]);
  const SynthGroundTruth truth_back = load_truth(path + ".truth");
  CHECK(truth_back.A == truth.A);

  SUBCASE("refuses to overwrite without force") {
    CHECK_THROWS_AS(cmd_simulate(spec, path, false), RefusedOverwrite);
    CHECK_NOTHROW(cmd_simulate(spec, path, true));
  }
}

TEST_CASE("cmd_simulate rejects a bad spec before writing") {
  TempDir dir;
  SynthSpec spec;
  spec.m = 2;
  spec.rank = 3;
  const auto path = dir.file("never.p2rt");
  CHECK_THROWS_AS(cmd_simulate(spec, path, false), ShapeMismatch);
  CHECK_FALSE(fs::exists(path));
}

TEST_CASE("cmd_decompose writes factors and is deterministic") {
  TempDir dir;
  SynthSpec spec;
  spec.n = 8;
  spec.m = 6;
  spec.K = 3;
  spec.rank = 2;
  spec.sigma = 1e-3;
  spec.seed = 7;
  const auto data = dir.file("data.p2rt");
  cmd_simulate(spec, data, false);

  SolverConfig config;
  config.rank = 2;
  config.max_iter = 30;
  config.seed = 11;

  const auto out1 = dir.file("run1");
  const auto out2 = dir.file("run2");
  const auto res1 = cmd_decompose(data, config, SolverKind::Flexible, 2, out1, false);
  const auto res2 = cmd_decompose(data, config, SolverKind::Flexible, 2, out2, false);

  for (const std::string name : {"A.csv", "C.csv", "Bstar.csv", "B_1.csv", "B_3.csv", "P_2.csv", "report.csv",
                                 "residuals.csv"}) {
    CAPTURE(name);
    CHECK(read_bytes(out1 + "/" + name) == read_bytes(out2 + "/" + name));
  }
  CHECK(res1.relative_fit == res2.relative_fit);
  CHECK(res1.factors.A.minCoeff() >= 0.0);

  SUBCASE("refuses to overwrite an existing decomposition") {
    CHECK_THROWS_AS(cmd_decompose(data, config, SolverKind::Flexible, 1, out1, false), RefusedOverwrite);
  }

  SUBCASE("classic solver writes the same layout") {
    const auto out3 = dir.file("classic");
    cmd_decompose(data, config, SolverKind::Classic, 1, out3, false);
    CHECK(fs::exists(out3 + "/A.csv"));
    CHECK(fs::exists(out3 + "/run.json"));
    const std::string report = read_bytes(out3 + "/report.csv");
    CHECK(report.rfind("iter,objective", 0) == 0);
  }
}

TEST_CASE("cmd_decompose recovers a noiseless simulated file") {
  TempDir dir;
  SynthSpec spec;
  spec.n = 14;
  spec.m = 12;
  spec.K = 6;
  spec.rank = 2;
  spec.sigma = 0.0;
  spec.seed = 71;
  const auto data = dir.file("clean.p2rt");
  cmd_simulate(spec, data, false);

  SolverConfig config;
  config.rank = 2;
  config.snr_db = 60.0;  // noiseless data
  config.seed = 2;
  const auto result = cmd_decompose(data, config, SolverKind::Flexible, 5, dir.file("out"), false);
  CHECK(result.relative_fit < 1e-3);
}

TEST_CASE("cmd_decompose rejects an over-wide rank with a precondition error") {
  TempDir dir;
  SynthSpec spec;
  spec.n = 6;
  spec.m = 3;
  spec.K = 2;
  spec.rank = 2;
  spec.sigma = 0.0;
  spec.seed = 15;
  const auto data = dir.file("data.p2rt");
  cmd_simulate(spec, data, false);
  SolverConfig config;
  config.rank = 4;  // wider than every slice
  CHECK_THROWS_AS(cmd_decompose(data, config, SolverKind::Flexible, 1, dir.file("out"), false), ShapeMismatch);
}

TEST_CASE("benchmark emits one row per cell and ordered summaries") {
  BenchmarkGrid grid;
  grid.sigmas = {1e-3};
  grid.replicates = 2;
  grid.inits_per_run = 2;
  grid.base_seed = 3;
  grid.spec.n = 8;
  grid.spec.m = 6;
  grid.spec.K = 3;
  grid.spec.rank = 2;

  SolverConfig config;
  config.max_iter = 25;
  const auto rows = run_benchmark(grid, config, 2);
  CHECK(rows.size() == 4);

  const auto summaries = summarize(rows);
  CHECK(summaries.size() == 2);
  for (const auto& s : summaries) {
    CHECK(s.q20_best <= s.median_best + 1e-15);
    CHECK(s.median_best <= s.q80_best + 1e-15);
    CHECK(s.q20_single <= s.median_single + 1e-15);
    CHECK(s.median_single <= s.q80_single + 1e-15);
  }

  SUBCASE("csv files carry the documented headers") {
    TempDir dir;
    write_benchmark_csv(rows, dir.file("detail.csv"));
    write_summary_csv(summaries, dir.file("summary.csv"));
    CHECK(read_bytes(dir.file("detail.csv"))
              .rfind("sigma,replicate,solver,best_error,single_init_error,best_fit,iterations,seconds", 0) == 0);
    CHECK(read_bytes(dir.file("summary.csv")).rfind("sigma,solver,mean_best", 0) == 0);
  }

  SUBCASE("jobs do not change the rows") {
    const auto serial = run_benchmark(grid, config, 1);
    REQUIRE(serial.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(serial[i].best_error == rows[i].best_error);
      CHECK(serial[i].single_init_error == rows[i].single_init_error);
    }
  }
}

TEST_CASE("quantile interpolates linearly") {
  std::vector<double> v = {4.0, 1.0, 3.0, 2.0};
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 4.0);
  CHECK(quantile(v, 0.5) == doctest::Approx(2.5));
  CHECK(quantile(v, 0.2) == doctest::Approx(1.6));
}
