#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "carnot/cli_audit.hpp"
#include "carnot/io.hpp"

using namespace carnot;
namespace fs = std::filesystem;

namespace {

const char* cli() { return CARNOT_CLI_PATH; }

struct RunResult {
  int exit_code;
  std::string stdout_text;
};

RunResult run(const std::string& args, const std::string& workdir) {
  fs::create_directories(workdir);
  std::string outfile = workdir + "/stdout.txt";
  std::string cmdline = std::string(cli()) + " " + args + " > " + outfile + " 2>&1";
  int rc = std::system(cmdline.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream in(outfile);
  std::stringstream ss;
  ss << in.rdbuf();
  r.stdout_text = ss.str();
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("audit: every operation is owned by exactly one subcommand") {
  // canonical operation list from the design, one entry per operation
  const std::set<std::string> ops = {
      "multiply", "inverse", "left_quotient", "dilate", "quasi_metric",
      "left_invariant_frame", "contact_coframe", "lie_differential_d0", "validate",
      "build_extension", "potential_form", "graded_hom_compose", "hom_obstruction",
      "top_wedge_coefficient",
      "endpoint", "line_integral", "horizontal_lift", "closed_loop_defect", "lift_map",
      "fiber_hom_extract", "pansu_quotient", "contact_generator_check",
      "symplectic_defect", "lambda_from_det", "quaternionic_structure",
      "quaternionic_rigidity_check", "poincare_primitive", "moser_correct",
      "area_preserving_check",
      "group_convolve", "pullback_derivative", "decay_slope", "hoelder_seminorm",
      "weierstrass", "young_integral", "run"};
  std::set<std::string> seen;
  for (const auto& route : kOpRoutes) {
    CHECK_MESSAGE(ops.count(std::string(route.op)) == 1, "unknown op ", route.op);
    CHECK_MESSAGE(seen.insert(std::string(route.op)).second, "duplicate op ", route.op);
    bool known_sub = route.subcommand == "cli";
    for (auto s : kSubcommands)
      if (s == route.subcommand) known_sub = true;
    CHECK_MESSAGE(known_sub, "unknown subcommand ", route.subcommand);
  }
  CHECK(seen.size() == ops.size());
}

TEST_CASE("cli: worked product and exit codes") {
  std::string dir = (fs::temp_directory_path() / "carnot_cli_t1").string();
  auto r = run("mul --group heisenberg:1 --p 1,0,0 --q 0,1,0 --out " + dir, dir);
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text == "1,1,0.5\n");

  auto r2 = run("frobnicate", dir);
  CHECK(r2.exit_code == 64);

  std::string bad = dir + "/bad.json";
  std::ofstream(bad) << "{ not json";
  auto r3 = run("check-lift --group heisenberg:1 --map " + bad + " --out " + dir, dir);
  CHECK(r3.exit_code == 65);

  // validation failure: a group file with inconsistent antisymmetry
  std::string badgroup = dir + "/badgroup.json";
  std::ofstream(badgroup)
      << R"({"name":"bad","layers":[2,1],"brackets":[{"i":1,"j":2,"k":3,"c":1.0},{"i":2,"j":1,"k":3,"c":1.0}]})";
  auto r4 = run("validate-algebra --group " + badgroup + " --out " + dir, dir);
  CHECK(r4.exit_code == 2);
}

TEST_CASE("cli: liftability gate exit code 3 with a witness artifact") {
  std::string dir = (fs::temp_directory_path() / "carnot_cli_t2").string();
  fs::remove_all(dir);
  auto r = run("check-lift --group heisenberg:1 --map a2b --out " + dir, dir);
  CHECK(r.exit_code == 3);
  CHECK(fs::exists(dir + "/witness_loop.csv"));
  CHECK(fs::exists(dir + "/check-lift_summary.json"));

  auto r2 = run("check-lift --group heisenberg:1 --map identity:2 --out " + dir, dir);
  CHECK(r2.exit_code == 0);
}

TEST_CASE("cli: identical manifest and seed reproduce byte-identical artifacts") {
  std::string dir1 = (fs::temp_directory_path() / "carnot_cli_d1").string();
  std::string dir2 = (fs::temp_directory_path() / "carnot_cli_d2").string();
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  std::string args =
      "check-lift --group heisenberg:1 --map parabolic-shear --seed 7 --jobs 2 --out ";
  auto a = run(args + dir1, dir1);
  auto b = run(args + dir2, dir2);
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  CHECK(slurp(dir1 + "/worst_loop.csv") == slurp(dir2 + "/worst_loop.csv"));

  std::string dargs =
      "decay-experiment --group heisenberg:1 --map lift-shear-abs "
      "--eps-grid 0.0625,0.03125,0.015625,0.0078125 --beta 1 --seed 7 --out ";
  auto c = run(dargs + dir1, dir1);
  auto d = run(dargs + dir2, dir2);
  CHECK(c.exit_code == 0);
  CHECK(slurp(dir1 + "/decay.csv") == slurp(dir2 + "/decay.csv"));
}

TEST_CASE("cli: CARNOT_LIFT_OUT overrides --out") {
  std::string flagged = (fs::temp_directory_path() / "carnot_cli_flag").string();
  std::string forced = (fs::temp_directory_path() / "carnot_cli_env").string();
  fs::remove_all(flagged);
  fs::remove_all(forced);
  fs::create_directories(flagged);
  std::string cmdline = std::string("CARNOT_LIFT_OUT=") + forced + " " + cli() +
                        " weierstrass --y 0 --N 3 --out " + flagged + " > /dev/null 2>&1";
  int rc = std::system(cmdline.c_str());
  CHECK(WEXITSTATUS(rc) == 0);
  CHECK(fs::exists(forced + "/weierstrass_summary.json"));
  CHECK_FALSE(fs::exists(flagged + "/weierstrass_summary.json"));
}

TEST_CASE("file formats: group JSON, map grid and curve CSV round trips") {
  std::string dir = (fs::temp_directory_path() / "carnot_cli_io").string();
  fs::create_directories(dir);

  // group JSON round trip through the loader
  std::string gpath = dir + "/h1.json";
  std::ofstream(gpath)
      << R"({"name":"h1","layers":[2,1],"brackets":[{"i":1,"j":2,"k":3,"c":1.0}]})";
  auto g = load_group(gpath);
  CHECK(g.same_as(StratifiedAlgebra::heisenberg(1)));

  // extension JSON
  std::string epath = dir + "/ext.json";
  std::ofstream(epath)
      << R"({"base":"abelian:2","fiber_layers":[0,1],"cocycle":[{"i":1,"j":2,"v":1,"c":1.0}]})";
  auto ext = load_extension(epath);
  CHECK(ext.extended().same_as(StratifiedAlgebra::heisenberg(1)));

  // map grid file round trip
  Box box;
  box.lo = VectorXd::Constant(2, -1.0);
  box.hi = VectorXd::Constant(2, 1.0);
  auto m = SampledMap::sample(builtin_map("parabolic-shear").fn, box, {9, 9}, 2);
  save_map_file(m, dir + "/m.json");
  auto m2 = load_map_file(dir + "/m.json");
  REQUIRE(m2.node_count() == m.node_count());
  for (std::int64_t t = 0; t < m.node_count(); ++t)
    CHECK((m.node_value(t) - m2.node_value(t)).cwiseAbs().maxCoeff() == 0.0);

  // curve CSV round trip
  auto h1 = StratifiedAlgebra::heisenberg(1);
  HorizontalCurve c;
  c.algebra = &h1;
  c.times = VectorXd::LinSpaced(5, 0, 1);
  c.points.resize(5, 3);
  Rng rng(5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) c.points(i, j) = rng.uniform(-1, 1);
  save_curve_csv(c, dir + "/c.csv");
  auto c2 = load_curve_csv(dir + "/c.csv", h1);
  CHECK((c.points - c2.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK((c.times - c2.times).cwiseAbs().maxCoeff() == 0.0);

  // malformed rows carry line diagnostics
  std::ofstream(dir + "/badcurve.csv") << "t,x1,x2,x3\n0,1,2\n";
  try {
    (void)load_curve_csv(dir + "/badcurve.csv", h1);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}
