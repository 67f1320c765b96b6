#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cpe/driver.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cpe;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::vector<double> csv_row(const std::string& line) {
  std::vector<double> out;
  std::istringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(std::strtod(cell.c_str(), nullptr));
  return out;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::path("io_test_tmp") / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

bool contains(const std::exception& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("config defaults and full override") {
  const RunConfig d = parse_config("");
  CHECK(d.dim_h == 1);
  CHECK(d.nx == 64);
  CHECK(d.ny == 0);
  CHECK(d.nz == 32);
  CHECK(d.gamma == 2.0);
  CHECK(d.g == 1.0);
  CHECK(d.mu == 1.0);
  CHECK(d.lambda == 1.0);
  CHECK(d.variant == Variant::conservative);
  CHECK(d.eps == 1e-3);
  CHECK(d.seed == 1);
  CHECK_FALSE(d.zero_momentum);
  CHECK(d.dt == 1e-3);
  CHECK(d.scheme == Scheme::imex_midpoint);
  CHECK(d.t_end == 1.0);
  CHECK(d.diag_every == 10);
  CHECK(d.snapshot_every == 0);
  CHECK(d.out_dir == "out");

  const RunConfig c = parse_config(
      "dim_h = 2\nnx = 32\nny = 16\nnz = 8\ngamma = 1.5\ng = 2.5\nmu = 0.5\n"
      "lambda = 0\nvariant = nonconservative\neps = 1e-4\nseed = 77\n"
      "zero_momentum = true\ndt = 5e-4\nscheme = explicit_rk2\nt_end = 2\n"
      "diag_every = 5\nsnapshot_every = 100\nout_dir = runs/a\n");
  CHECK(c.dim_h == 2);
  CHECK(c.nx == 32);
  CHECK(c.ny == 16);
  CHECK(c.nz == 8);
  CHECK(c.gamma == 1.5);
  CHECK(c.g == 2.5);
  CHECK(c.mu == 0.5);
  CHECK(c.lambda == 0.0);
  CHECK(c.variant == Variant::nonconservative);
  CHECK(c.eps == 1e-4);
  CHECK(c.seed == 77);
  CHECK(c.zero_momentum);
  CHECK(c.dt == 5e-4);
  CHECK(c.scheme == Scheme::explicit_rk2);
  CHECK(c.t_end == 2.0);
  CHECK(c.diag_every == 5);
  CHECK(c.snapshot_every == 100);
  CHECK(c.out_dir == "runs/a");
}

TEST_CASE("config tolerates comments and flags bad input") {
  const RunConfig c = parse_config("  # leading comment\n\n   nx = 16  \n");
  CHECK(c.nx == 16);

  try {
    parse_config("foo = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(contains(e, "foo"));
  }
  try {
    parse_config("nx 64\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(contains(e, "malformed"));
  }
  try {
    parse_config("nx = abc\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(contains(e, "nx"));
  }
  CHECK_THROWS_AS(parse_config("scheme = rk9\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("variant = newtonian\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("zero_momentum = yes\n"), ConfigError);
  CHECK(parse_config("zero_momentum = 1\n").zero_momentum);
  CHECK_FALSE(parse_config("zero_momentum = 0\n").zero_momentum);
}

TEST_CASE("shortest round-trip float formatting") {
  for (double x : {1.0 / 3.0, 1e-300, 3.14159265358979323846, 0.0}) {
    const std::string s = format_g17(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
}

TEST_CASE("snapshot files survive a write-read cycle bitwise") {
  const fs::path dir = fresh_dir("snap");
  auto grid = make_grid(1, 8, 1, 4, 1.0);
  Params<double> pr;
  pr.dim_h = 1;
  pr.gamma = 2;
  State<double> st = perturbed_ic(grid, pr, 0.05, {}, {}, 5);
  st.t = 0.625;
  const ArrayXX<double> W = vertical_velocity(st);
  const std::string path = (dir / "s.bin").string();
  write_snapshot(path, st, W);

  const SnapshotData s = read_snapshot(path);
  CHECK(s.dim_h == 1);
  CHECK(s.nx == 8);
  CHECK(s.ny == 1);
  CHECK(s.nz == 4);
  CHECK(s.time == st.t);
  CHECK((s.Z == st.Z).all());
  CHECK((s.v[0] == st.v[0]).all());
  CHECK((s.W == W).all());
}

TEST_CASE("snapshot reader rejects damaged files") {
  const fs::path dir = fresh_dir("snapbad");
  auto grid = make_grid(1, 8, 1, 4, 1.0);
  Params<double> pr;
  pr.dim_h = 1;
  pr.gamma = 2;
  const State<double> st = equilibrium_state(grid, pr);
  const ArrayXX<double> W = ArrayXX<double>::Zero(grid->nh, grid->nz);
  const std::string path = (dir / "s.bin").string();
  write_snapshot(path, st, W);

  CHECK_THROWS_AS(read_snapshot((dir / "missing.bin").string()), std::runtime_error);

  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.put('X');
  }
  try {
    read_snapshot(path);
    FAIL("expected bad magic");
  } catch (const std::runtime_error& e) {
    CHECK(contains(e, "magic"));
  }

  const std::string full = slurp(dir / "s.bin");
  const std::string cut_path = (dir / "cut.bin").string();
  {
    std::ofstream out(cut_path, std::ios::binary);
    out.write("CPE1", 4);
    out.write(full.data() + 4, 36);
  }
  try {
    read_snapshot(cut_path);
    FAIL("expected truncation");
  } catch (const std::runtime_error& e) {
    CHECK(contains(e, "truncated"));
  }
}

TEST_CASE("short simulation writes the expected diagnostics") {
  const fs::path dir = fresh_dir("run");
  const std::string text =
      "nx = 8\nnz = 4\nt_end = 0.05\ndt = 1e-2\ndiag_every = 2\nout_dir = " +
      (dir / "out").string() + "\n";
  RunConfig cfg = parse_config(text);
  CHECK(run_simulation(cfg, text) == 0);

  CHECK(slurp(dir / "out" / "config.txt") == text);
  const auto rows = lines_of(slurp(dir / "out" / "diagnostics.csv"));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == diag_csv_header());
  const double expected_t[] = {0.0, 0.02, 0.04, 0.05};
  for (int i = 0; i < 4; ++i) {
    const auto cells = csv_row(rows[static_cast<size_t>(i) + 1]);
    REQUIRE(cells.size() == 13);
    CHECK(std::abs(cells[0] - expected_t[i]) <= 1e-12);
    CHECK(cells[1] > 0.0);
    CHECK(cells[11] <= cells[12]);
  }
}

TEST_CASE("resting initial data stays at zero energy") {
  const fs::path dir = fresh_dir("rest");
  const std::string text =
      "nx = 8\nnz = 4\neps = 0\nt_end = 0.05\ndt = 1e-2\ndiag_every = 1\nout_dir = " +
      (dir / "out").string() + "\n";
  CHECK(run_simulation(parse_config(text), text) == 0);
  const auto rows = lines_of(slurp(dir / "out" / "diagnostics.csv"));
  for (size_t i = 1; i < rows.size(); ++i)
    CHECK(std::abs(csv_row(rows[i])[4]) <= 1e-13);
}

TEST_CASE("identical configs reproduce the diagnostics byte for byte") {
  const fs::path dir = fresh_dir("repeat");
  auto run = [&](const std::string& sub) {
    const std::string text =
        "nx = 16\nnz = 8\neps = 1e-3\nseed = 9\nt_end = 0.02\ndt = 1e-3\n"
        "diag_every = 5\nout_dir = " +
        (dir / sub).string() + "\n";
    CHECK(run_simulation(parse_config(text), text) == 0);
    return slurp(dir / sub / "diagnostics.csv");
  };
  CHECK(run("a") == run("b"));
}

TEST_CASE("initial-condition generator is reproducible and projects momentum") {
  const fs::path dir = fresh_dir("icgen");
  const std::string text = "nx = 16\nnz = 8\nseed = 4\nzero_momentum = true\n";
  const RunConfig cfg = parse_config(text);
  const std::string p1 = (dir / "ic1.bin").string();
  const std::string p2 = (dir / "ic2.bin").string();
  CHECK(run_icgen(cfg, p1) == 0);
  CHECK(run_icgen(cfg, p2) == 0);
  CHECK(slurp(p1) == slurp(p2));

  const SnapshotData s = read_snapshot(p1);
  State<double> st;
  st.grid = make_grid(s.dim_h, s.nx, s.ny, s.nz, params_from_config(cfg).alpha());
  st.params = params_from_config(cfg);
  st.Z = s.Z;
  st.v = s.v;
  CHECK(std::abs(momentum(st)[0]) <= 1e-14);
}

TEST_CASE("driver rejects degenerate run lengths") {
  const RunConfig base = parse_config("nx = 8\nnz = 4\n");
  RunConfig bad = base;
  bad.t_end = 0;
  CHECK_THROWS_AS(run_simulation(bad, ""), ConfigError);
  bad = base;
  bad.diag_every = 0;
  CHECK_THROWS_AS(run_simulation(bad, ""), ConfigError);
}

TEST_CASE("a blown-up run exits through the validity path") {
  const fs::path dir = fresh_dir("blowup");
  const std::string text =
      "nx = 8\nnz = 4\neps = 0.1\nscheme = explicit_rk2\ndt = 0.5\nt_end = 2\n"
      "diag_every = 1\nout_dir = " +
      (dir / "out").string() + "\n";
  CHECK(run_simulation(parse_config(text), text) == 2);
}
