#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "flad/io.hpp"
#include "flad/runner.hpp"
#include "flad/simulate.hpp"
#include "flad/solver.hpp"
#include "support/oracles.hpp"

using namespace flad;
namespace fs = std::filesystem;

namespace {

// fresh scratch directory under the system temp root
struct TempDir {
  fs::path path;

  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("flad-test-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("ingest splits outcomes from covariates and prepends the intercept") {
  TempDir dir("ingest");
  write_file(dir.path / "d.csv", "1,2,3,4\n5,6,7,8\n9,10,11,12\n");
  const Dataset d = ingest(dir.path / "d.csv", false, OutcomeSpec::first(2));
  CHECK(d.n() == 3);
  CHECK(d.q() == 2);
  CHECK(d.p() == 2);
  CHECK(d.Y()(1, 0) == 5.0);
  CHECK(d.X()(1, 0) == 1.0);
  CHECK(d.X()(1, 1) == 7.0);
}

TEST_CASE("header plus tab delimiter parses like the comma variant") {
  TempDir dir("header");
  write_file(dir.path / "a.csv", "1,2,3\n4,5,6\n");
  write_file(dir.path / "b.tsv", "u\tv\tw\n1\t2\t3\n4\t5\t6\n");
  CHECK_FALSE(detect_header(dir.path / "a.csv"));
  CHECK(detect_header(dir.path / "b.tsv"));
  const Dataset a = ingest(dir.path / "a.csv", false, OutcomeSpec::first(1));
  const Dataset b = ingest(dir.path / "b.tsv", true, OutcomeSpec::first(1));
  CHECK(a.Y() == b.Y());
  CHECK(a.X() == b.X());
}

TEST_CASE("explicit outcome columns can sit anywhere in the table") {
  TempDir dir("cols");
  write_file(dir.path / "d.csv", "1,2,3\n4,5,6\n");
  const Dataset d = ingest(dir.path / "d.csv", false, OutcomeSpec::list({2}));
  CHECK(d.q() == 1);
  CHECK(d.Y()(0, 0) == 2.0);
  CHECK(d.X()(0, 1) == 1.0);  // remaining columns keep their order
  CHECK(d.X()(0, 2) == 3.0);
}

TEST_CASE("non-numeric cells are located precisely") {
  TempDir dir("bad");
  write_file(dir.path / "d.csv", "1,2,3\n4,5,abc\n");
  try {
    ingest(dir.path / "d.csv", false, OutcomeSpec::first(1));
    FAIL("expected NonNumericCell");
  } catch (const NonNumericCell& e) {
    CHECK(e.row() == 2);
    CHECK(e.col() == 3);
  }

  write_file(dir.path / "empty.csv", "\n\n");
  CHECK_THROWS_AS(ingest(dir.path / "empty.csv", false, OutcomeSpec::first(1)),
                  EmptyFile);
  write_file(dir.path / "ragged.csv", "1,2,3\n4,5\n");
  CHECK_THROWS_AS(ingest(dir.path / "ragged.csv", false, OutcomeSpec::first(1)),
                  ParseError);
}

TEST_CASE("asinh transform hits the selected columns only") {
  Rng rng(91);
  const auto inst = oracle::random_instance(rng, 10, 3, 2);
  const Dataset t = asinh_transform(inst.data, {2}, false);
  CHECK(t.X().col(1) == inst.data.X().col(1));
  for (Index i = 0; i < 10; ++i) {
    CHECK(t.X()(i, 2) ==
          doctest::Approx(std::asinh(inst.data.X()(i, 2))).epsilon(1e-15));
  }
  CHECK(t.Y() == inst.data.Y());

  CHECK(std::asinh(0.0) == 0.0);
  CHECK(std::asinh(std::sinh(2.0)) == doctest::Approx(2.0).epsilon(1e-12));
  // odd symmetry
  for (Index i = 0; i < 10; ++i) {
    const double x = inst.data.X()(i, 3);
    CHECK(std::asinh(-x) == doctest::Approx(-std::asinh(x)).epsilon(1e-14));
  }
}

TEST_CASE("formatted doubles round-trip exactly through text") {
  Rng rng(92);
  TempDir dir("roundtrip");
  Matrix M(20, 3);
  for (Index r = 0; r < 20; ++r) {
    for (Index c = 0; c < 3; ++c) {
      M(r, c) = rng.normal() * std::pow(10.0, static_cast<double>(rng.below(13)) - 6.0);
    }
  }
  write_matrix_csv(dir.path / "m.csv", M, {"y1", "x1", "x2"});
  const Dataset d = ingest(dir.path / "m.csv", true, OutcomeSpec::first(1));
  CHECK(d.Y().col(0) == M.col(0));
  CHECK(d.X().col(1) == M.col(1));
  CHECK(d.X().col(2) == M.col(2));
}

TEST_CASE("simulate then ingest reproduces the dataset exactly") {
  TempDir dir("sim");
  RunConfig config;
  config.command = RunConfig::Command::simulate;
  config.seed = 17;
  config.out_dir = dir.path;
  CHECK(run(config) == 0);

  const SimData sim = generate(SimSpec::defaults(17));
  const Dataset d = ingest(dir.path / "data.csv", true, OutcomeSpec::first(2));
  CHECK(d.Y() == sim.data.Y());
  CHECK(d.X() == sim.data.X());
}

TEST_CASE("simulate output is byte-identical per seed") {
  TempDir a("sim-a"), b("sim-b");
  RunConfig config;
  config.command = RunConfig::Command::simulate;
  config.seed = 3;
  config.out_dir = a.path;
  CHECK(run(config) == 0);
  config.out_dir = b.path;
  CHECK(run(config) == 0);
  for (const char* name : {"Y.csv", "X.csv", "B_true.csv", "data.csv", "manifest.json"}) {
    CHECK(slurp(a.path / name) == slurp(b.path / name));
  }
}

TEST_CASE("fit command reproduces the in-memory fit at zero penalties") {
  TempDir dir("fit");
  RunConfig simconf;
  simconf.command = RunConfig::Command::simulate;
  simconf.seed = 4;
  simconf.out_dir = dir.path;
  REQUIRE(run(simconf) == 0);

  RunConfig fitconf;
  fitconf.command = RunConfig::Command::fit;
  fitconf.input = dir.path / "data.csv";
  fitconf.outcomes = OutcomeSpec::first(2);
  fitconf.out_dir = dir.path / "fit";
  REQUIRE(run(fitconf) == 0);

  const SimData sim = generate(SimSpec::defaults(4));
  const FitResult fit = fit_lad(sim.data);

  const Dataset coefs =
      ingest(dir.path / "fit" / "coefficients.csv", true, OutcomeSpec::first(1));
  // covariate index, b1, b2, active, group -> X columns: intercept, b1, b2, active, group
  REQUIRE(coefs.n() == 51);
  for (Index j = 0; j < 51; ++j) {
    CHECK(coefs.X()(j, 1) == fit.B_hat.B(j, 0));
    CHECK(coefs.X()(j, 2) == fit.B_hat.B(j, 1));
  }
}

TEST_CASE("path command sweeps one tuning axis and writes trajectories") {
  TempDir dir("path");
  RunConfig simconf;
  simconf.command = RunConfig::Command::simulate;
  simconf.seed = 6;
  simconf.out_dir = dir.path;
  REQUIRE(run(simconf) == 0);

  RunConfig pathconf;
  pathconf.command = RunConfig::Command::path;
  pathconf.input = dir.path / "data.csv";
  pathconf.outcomes = OutcomeSpec::first(2);
  pathconf.grid1 = GridSpec::parse("0:0.4:3,lin");
  pathconf.out_dir = dir.path / "path";
  REQUIRE(run(pathconf) == 0);

  std::ifstream in(dir.path / "path" / "path.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "lambda,covariate,outcome,value");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
  }
  CHECK(rows == 3 * 51 * 2);  // grid points x coefficient rows x outcomes

  // both sweep axes given is inconsistent
  pathconf.grid2 = GridSpec::parse("0:0.4:3,lin");
  CHECK_THROWS_AS(run(pathconf), ConfigError);
}

TEST_CASE("config errors carry exit code 2, data errors 3") {
  TempDir dir("codes");
  RunConfig config;
  config.command = RunConfig::Command::fit;
  config.out_dir = dir.path;
  // missing input
  try {
    run(config);
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(exit_code_for(e) == 2);
  }

  write_file(dir.path / "bad.csv", "1,2\n3,nope\n");
  config.input = dir.path / "bad.csv";
  config.outcomes = OutcomeSpec::first(1);
  try {
    run(config);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(exit_code_for(e) == 3);
  }
  // partial outputs are cleaned up
  CHECK_FALSE(fs::exists(dir.path / "coefficients.csv"));

  // cv without grids is a configuration error
  write_file(dir.path / "ok.csv", "1,2\n3,4\n5,7\n2,1\n");
  config.command = RunConfig::Command::cv;
  config.input = dir.path / "ok.csv";
  CHECK_THROWS_AS(run(config), ConfigError);
}

TEST_CASE("grid spec parsing") {
  const GridSpec lin = GridSpec::parse("0:1:5,lin");
  const auto lv = lin.values();
  REQUIRE(lv.size() == 5);
  CHECK(lv.front() == 0.0);
  CHECK(lv[2] == doctest::Approx(0.5));
  CHECK(lv.back() == 1.0);

  const GridSpec log = GridSpec::parse("0.01:1:3,log");
  const auto gv = log.values();
  REQUIRE(gv.size() == 3);
  CHECK(gv[1] == doctest::Approx(0.1).epsilon(1e-12));

  CHECK_THROWS_AS(GridSpec::parse("1:2"), ConfigError);
  CHECK_THROWS_AS(GridSpec::parse("0:1:4,geometric"), ConfigError);
  CHECK_THROWS_AS(GridSpec::parse("0:1:0,lin"), ConfigError);
  CHECK_THROWS_AS(GridSpec::parse("-1:1:3,log").values(), ConfigError);
}

}  // TEST_SUITE
