#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli/cli_main.hpp"
#include "cli/config.hpp"
#include "qhall/errors.hpp"
#include "qhall/lattice_model.hpp"

using namespace qhall;
using namespace qhall::cli;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int rc = -1;
  std::string out;
};

// cout is redirected only for the duration of the call so doctest assertion
// output stays on the real stream.
CliRun run_cli(const std::vector<std::string>& args) {
  CliRun r;
  std::ostringstream oss;
  std::streambuf* old = std::cout.rdbuf(oss.rdbuf());
  try {
    r.rc = cli_main(args);
  } catch (...) {
    std::cout.rdbuf(old);
    throw;
  }
  std::cout.rdbuf(old);
  r.out = oss.str();
  return r;
}

fs::path fresh_dir(const std::string& leaf) {
  const fs::path p = fs::temp_directory_path() / "qhall_cli_tests" / leaf;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_file(const fs::path& dir, const std::string& name,
                       const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream out(p);
  out << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream oss;
  oss << in.rdbuf();
  return oss.str();
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

// The stock grid tops out at 10^-0.5, just above the conservative validity
// radius, so a config keeping that grid must widen the radius explicitly.
const std::string kGoodConfig =
    "# minimal commensurate torus\n"
    "model.name = tmp_model\n"
    "lattice.L1 = 6\n"
    "lattice.L2 = 6\n"
    "flux.p = 1\n"
    "flux.q = 3\n"
    "gap.filled_bands = 1\n"
    "eps.max_allowed = 0.32\n"
    "stages = spectrum\n";

}  // namespace

TEST_CASE("eps grid is geometric between its endpoints") {
  const ExperimentConfig cfg = default_config();
  const std::vector<Real> pts = cfg.eps.points();
  REQUIRE(static_cast<int>(pts.size()) == cfg.eps.count);
  CHECK(std::abs(pts.front() - cfg.eps.min) <= 1e-15);
  CHECK(std::abs(pts.back() - cfg.eps.max) <= 1e-15);
  const Real ratio = std::pow(cfg.eps.max / cfg.eps.min, 1.0 / (cfg.eps.count - 1));
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    CHECK(pts[i] < pts[i + 1]);
    CHECK(std::abs(pts[i + 1] / pts[i] - ratio) <= 1e-12);
  }
}

TEST_CASE("key-value parser rejects malformed files") {
  const fs::path dir = fresh_dir("parse");
  const std::string dup =
      write_file(dir, "dup.cfg", "lattice.L1 = 6\nlattice.L1 = 12\n");
  CHECK_THROWS_AS(parse_key_values(dup), ConfigError);
  const std::string noeq = write_file(dir, "noeq.cfg", "lattice.L1 6\n");
  CHECK_THROWS_AS(parse_key_values(noeq), ConfigError);
  CHECK_THROWS_AS(parse_key_values((dir / "absent.cfg").string()), IoError);

  const std::string ok = write_file(dir, "ok.cfg", "a = 1 2 3 # trailing comment\n\n");
  const KeyValues kv = parse_key_values(ok);
  REQUIRE(kv.count("a") == 1);
  CHECK(kv.at("a") == std::vector<std::string>{"1", "2", "3"});
}

TEST_CASE("config loading enforces the schema") {
  const fs::path dir = fresh_dir("load");
  const std::string good = write_file(dir, "good.cfg", kGoodConfig);
  const ExperimentConfig cfg = load_config(good);
  CHECK(cfg.name == "tmp_model");
  CHECK(cfg.L1 == 6);
  CHECK(cfg.flux.q == 3);
  REQUIRE(cfg.filled_bands.has_value());
  CHECK(*cfg.filled_bands == 1);

  const std::string unknown =
      write_file(dir, "unknown.cfg", kGoodConfig + "wat.key = 1\n");
  CHECK_THROWS_AS(load_config(unknown), ConfigError);
  const std::string missing =
      write_file(dir, "missing.cfg", "lattice.L1 = 6\nflux.p = 1\nflux.q = 3\n");
  CHECK_THROWS_WITH_AS(load_config(missing),
                       doctest::Contains("missing required keys"), ConfigError);
}

TEST_CASE("semantic validation rejects inconsistent experiments") {
  const auto expect_reject = [](void (*mutate)(ExperimentConfig&)) {
    ExperimentConfig cfg = default_config();
    mutate(cfg);
    CHECK_THROWS_AS(validate(cfg), ConfigError);
  };
  expect_reject([](ExperimentConfig& c) { c.stages = {"bogus"}; });
  expect_reject([](ExperimentConfig& c) { c.stages = {"spectrum", "spectrum"}; });
  expect_reject([](ExperimentConfig& c) { c.stages.clear(); });
  expect_reject([](ExperimentConfig& c) { c.gap_hint = 0.5; });  // both gap selectors
  expect_reject([](ExperimentConfig& c) { c.filled_bands.reset(); });  // neither selector
  expect_reject([](ExperimentConfig& c) { c.neass_order = 0; });
  expect_reject([](ExperimentConfig& c) { c.neass_order = 7; });
  expect_reject([](ExperimentConfig& c) { c.contour_nodes = 7; });
  expect_reject([](ExperimentConfig& c) { c.localize_eps = c.eps.max_allowed; });
  expect_reject([](ExperimentConfig& c) { c.eps.max = c.eps.max_allowed; });
  expect_reject([](ExperimentConfig& c) { c.eps.count = 4; });
  expect_reject([](ExperimentConfig& c) { c.flux = {3, 2}; });
  expect_reject([](ExperimentConfig& c) { c.potential.v = {1.0}; });
  expect_reject([](ExperimentConfig& c) { c.output_dir.clear(); });
}

TEST_CASE("bundled models validate and build") {
  const auto models = bundled_models();
  REQUIRE(models.size() == 6);
  CHECK(models[0].name == "hofstadter_q3_n2");
  for (const auto& m : models) {
    CHECK_NOTHROW(validate(m));
    CHECK_NOTHROW(lattice::build_geometry(m.L1, m.L2, m.flux, m.a));
  }
  CHECK(default_config().name == models[0].name);
}

TEST_CASE("version, usage errors, and the chern oracle") {
  CHECK(run_cli({"--version"}).rc == 0);
  CHECK(run_cli({"--bogus"}).rc == 2);
  CHECK(run_cli({}).rc == 2);

  const CliRun oracle = run_cli({"oracle", "--p", "1", "--q", "3", "--bands", "1"});
  CHECK(oracle.rc == 0);
  CHECK(oracle.out == "1\n");
  const CliRun oracle2 = run_cli({"oracle", "--p", "1", "--q", "3", "--bands", "2"});
  CHECK(oracle2.rc == 0);
  CHECK(oracle2.out == "-1\n");

  CHECK(run_cli({"oracle", "--p", "1", "--q", "2", "--bands", "1"}).rc == 15);
  CHECK(run_cli({"oracle", "--p", "1", "--q", "3"}).rc == 2);
  CHECK(run_cli({"--threads", "0", "spectrum"}).rc == 2);
}

TEST_CASE("config subcommands validate files and print the schema") {
  const fs::path dir = fresh_dir("configcmd");
  const std::string good = write_file(dir, "good.cfg", kGoodConfig);
  const CliRun ok = run_cli({"config", "validate", good});
  CHECK(ok.rc == 0);
  CHECK(contains(ok.out, "OK:"));
  CHECK(contains(ok.out, "tmp_model"));

  // 2/4 passes the range checks but the geometry requires a reduced fraction.
  const std::string unreduced = write_file(
      dir, "unreduced.cfg",
      "lattice.L1 = 8\nlattice.L2 = 8\nflux.p = 2\nflux.q = 4\ngap.filled_bands = 1\n");
  CHECK(run_cli({"config", "validate", unreduced}).rc == 2);
  CHECK(run_cli({"config", "validate"}).rc == 2);

  const CliRun schema = run_cli({"config", "schema"});
  CHECK(schema.rc == 0);
  CHECK(contains(schema.out, "lattice.L1"));
  CHECK(contains(schema.out, "gap.filled_bands"));
  CHECK(contains(schema.out, "eps.max_allowed"));
}

TEST_CASE("spectrum stage writes the frozen gap table") {
  const fs::path dir = fresh_dir("spectrum");
  const CliRun r = run_cli({"spectrum", "--out-dir", dir.string()});
  CHECK(r.rc == 0);
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "spectrum.csv"));
  REQUIRE(fs::exists(dir / "gap.csv"));

  const std::string spectrum = slurp(dir / "spectrum.csv");
  // Header plus one row per site.
  CHECK(std::count(spectrum.begin(), spectrum.end(), '\n') == 145);

  std::ifstream gap(dir / "gap.csv");
  std::string header, row;
  REQUIRE(std::getline(gap, header));
  CHECK(header == "lower_edge,upper_edge,width,mu,rank");
  REQUIRE(std::getline(gap, row));
  std::istringstream cells(row);
  std::string cell;
  std::vector<std::string> v;
  while (std::getline(cells, cell, ',')) v.push_back(cell);
  REQUIRE(v.size() == 5);
  CHECK(std::abs(std::stod(v[0]) - (-2.0)) <= 1e-11);
  CHECK(std::abs(std::stod(v[1]) - (-0.732050807568885)) <= 1e-11);
  CHECK(std::abs(std::stod(v[2]) - 1.267949192431115) <= 1e-11);
  CHECK(std::abs(std::stod(v[3]) - (-1.366025403784442)) <= 1e-11);
  CHECK(v[4] == "48");

  CHECK(contains(slurp(dir / "report.json"), "\"gap_width\""));
}

TEST_CASE("neass stage at order 1 meets its slope band") {
  const fs::path dir = fresh_dir("neass1");
  const CliRun r = run_cli({"neass", "--order", "1", "--out-dir", dir.string()});
  CHECK(r.rc == 0);
  CHECK(contains(r.out, "[PASS] neass residual slope"));
  CHECK(fs::exists(dir / "neass_sweep.csv"));
}

TEST_CASE("full run reports the order-2 seam ceiling honestly") {
  const fs::path dir = fresh_dir("fullrun");
  const CliRun r = run_cli({"run", "--out-dir", dir.string()});
  CHECK(r.rc == 1);
  CHECK(contains(r.out, "[FAIL] neass residual slope"));
  CHECK(contains(r.out, "run failed"));
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "response_sweep.csv"));

  const fs::path dir2 = fresh_dir("fullrun_badstage");
  // The config parses, but an unknown stage must be rejected before work starts.
  const std::string worse =
      write_file(dir2, "worse.cfg",
                 "lattice.L1 = 6\nlattice.L2 = 6\nflux.p = 1\nflux.q = 3\n"
                 "gap.filled_bands = 1\neps.max_allowed = 0.32\n"
                 "stages = spectrum warp\n");
  CHECK(run_cli({"run", "--config", worse, "--out-dir", dir2.string()}).rc == 2);
}

TEST_CASE("grid sweeps are byte-identical across thread counts") {
  const fs::path a = fresh_dir("threads1");
  const fs::path b = fresh_dir("threads4");
  const CliRun ra = run_cli({"--threads", "1", "response", "--out-dir", a.string()});
  const CliRun rb = run_cli({"--threads", "4", "response", "--out-dir", b.string()});
  CHECK(ra.rc == rb.rc);
  const std::string csv_a = slurp(a / "response_sweep.csv");
  const std::string csv_b = slurp(b / "response_sweep.csv");
  REQUIRE(!csv_a.empty());
  CHECK(csv_a == csv_b);
}
