#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <numbers>

#include "commands.hpp"
#include "multilens/errors.hpp"
#include "multilens/rhie.hpp"
#include "multilens/solver.hpp"
#include "output.hpp"
#include "scene.hpp"

using namespace multilens;
using namespace mltool;
using nlohmann::json;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = std::string("/tmp/mltest_") + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("rhie shorthand expands to the library ensemble") {
  const auto path = write_temp("shorthand.json", R"({
    "planes": [{"rhie": 2}],
    "source": [0.0, 0.0]
  })");
  const Scene scene = load_scene(path);
  const auto [plane, cfg] = rhie_plane(2);
  REQUIRE(scene.lens.num_planes() == 1);
  REQUIRE(scene.lens.plane(0).size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(distance(scene.lens.plane(0).masses()[i].position,
                   plane.masses()[i].position) == 0.0);
  }
}

TEST_CASE("mass lists and scales load") {
  const auto path = write_temp("masses.json", R"({
    "planes": [
      {"masses": [{"b": 1.0, "position": [1.0, 0.0]},
                   {"b": 0.5, "position": [-1.0, 0.0]}], "scale": 2.0}
    ],
    "source": [0.1, -0.2],
    "solve": {"grid_n": 64}
  })");
  const Scene scene = load_scene(path);
  CHECK(scene.lens.plane(0).masses()[0].position.u == 2.0);
  CHECK(scene.lens.plane(0).masses()[0].einstein_radius == 2.0);
  CHECK(scene.lens.plane(0).masses()[1].einstein_radius == 1.0);
  CHECK(scene.lens.source().v == -0.2);
  CHECK(scene.solve.grid_n == 64);
}

TEST_CASE("epsilon length mismatch is a validation error") {
  const auto path = write_temp("badeps.json", R"({
    "planes": [{"rhie": 2}, {"rhie": 2, "scale": 0.1}],
    "source": [0, 0],
    "epsilons": [0.1, 0.2]
  })");
  CHECK_THROWS_AS(load_scene(path), ValidationError);
}

TEST_CASE("parse errors carry a line number") {
  const auto path = write_temp("broken.json", "{\n  \"planes\": [\n  broken\n}");
  try {
    load_scene(path);
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line >= 2);
  }
}

TEST_CASE("negative mass and duplicate positions are rejected") {
  const auto bad_b = write_temp("badb.json", R"({
    "planes": [{"masses": [{"b": -1.0, "position": [0, 0]}]}],
    "source": [0, 0]
  })");
  CHECK_THROWS_AS(load_scene(bad_b), ValidationError);

  const auto dup = write_temp("dup.json", R"({
    "planes": [{"masses": [{"b": 1.0, "position": [1, 0]},
                             {"b": 1.0, "position": [1, 0]}]}],
    "source": [0, 0]
  })");
  CHECK_THROWS_AS(load_scene(dup), ValidationError);
}

TEST_CASE("save(load(s)) is byte-identical for canonical scenes") {
  const auto path = write_temp("roundtrip.json", R"({
    "planes": [
      {"rhie": {"g": 2, "rotation": 1.5707963267948966}},
      {"rhie": 2, "scale": 0.1}
    ],
    "source": [0.0, 0.0],
    "epsilons": [0.01],
    "solve": {"grid_n": 128}
  })");
  const Scene first = load_scene(path);
  const std::string canon = save_scene(first);
  const auto canon_path = write_temp("canon.json", canon);
  const Scene second = load_scene(canon_path);
  CHECK(save_scene(second) == canon);
}

TEST_CASE("csv formatting is round-trip exact at 17 significant digits") {
  CHECK(fmt17(1.0 / 3.0) == "0.33333333333333331");
  const double x = 0.1 + 0.2;
  CHECK(std::stod(fmt17(x)) == x);
}

TEST_CASE("image tables are deterministic across runs") {
  const auto path = write_temp("det.json", R"({
    "planes": [{"rhie": 2}],
    "source": [0.03, 0.01],
    "solve": {"grid_n": 128}
  })");
  const Scene scene = load_scene(path);
  const auto gs = std::vector<int>{2};
  const auto run = [&] {
    const SolveResult r = find_images(scene.lens, scene.solve);
    return image_table_csv(scene.lens, r, image_count_bounds(gs));
  };
  const std::string a = run();
  const std::string b = run();
  CHECK(a == b);
  CHECK(a.find("count=5") != std::string::npos);
}

TEST_CASE("exit-code mapping follows the exception taxonomy") {
  CHECK(run_command([]() -> int { throw ParseError("bad", 3); }) ==
        kParseError);
  CHECK(run_command([]() -> int { throw ValidationError("bad"); }) ==
        kValidationError);
  CHECK(run_command([]() -> int { throw ObstructionError(1, 0, 0); }) ==
        kSolverError);
  CHECK(run_command([]() -> int { throw SolverError("bad"); }) ==
        kSolverError);
  CHECK(run_command([]() -> int { throw ConstructionError("bad"); }) ==
        kConstructionError);
  CHECK(run_command([]() -> int { throw std::runtime_error("bad"); }) ==
        kInternalError);
  CHECK(run_command([]() -> int { return 0; }) == kOk);
}

TEST_CASE("cmd_solve writes the image table") {
  const auto path = write_temp("cmdsolve.json", R"({
    "planes": [{"rhie": 2}],
    "source": [0.0, 0.0],
    "solve": {"grid_n": 128}
  })");
  CommonFlags flags;
  flags.scene_path = path;
  flags.out_dir = "/tmp/mltest_out";
  CHECK(cmd_solve(flags) == 0);
  std::ifstream in("/tmp/mltest_out/images.csv");
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "index,x1_u,x1_v,residual,det,parity,morse");
  int rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') ++rows;
  }
  CHECK(rows == 5);
}

TEST_CASE("cmd_curves emits aligned csv/svg artifacts") {
  const auto path = write_temp("cmdcurves.json", R"({
    "planes": [{"rhie": 2}],
    "source": [0.0, 0.0],
    "solve": {"grid_n": 128},
    "curves": {"grid_n": 256, "window": 3.0}
  })");
  CommonFlags flags;
  flags.scene_path = path;
  flags.out_dir = "/tmp/mltest_curves";
  CHECK(cmd_curves(flags) == 0);
  CHECK(std::ifstream("/tmp/mltest_curves/critical_000.csv").good());
  CHECK(std::ifstream("/tmp/mltest_curves/caustic_000.csv").good());
  CHECK(std::ifstream("/tmp/mltest_curves/critical.svg").good());
  CHECK(std::ifstream("/tmp/mltest_curves/caustic.svg").good());
  CHECK(std::ifstream("/tmp/mltest_curves/summary.json").good());

  std::ifstream meta("/tmp/mltest_curves/summary.json");
  const json doc = json::parse(meta);
  CHECK(doc["components"].get<int>() >= 1);
  CHECK(doc["images"].get<int>() == 5);
}

TEST_CASE("cmd_build writes a loadable scene that reproduces its count") {
  CHECK(cmd_build({2, 2}, {0.1}, {0.01}, "/tmp/mltest_build") == 0);
  const Scene scene = load_scene("/tmp/mltest_build/scene.json");
  CHECK(scene.lens.num_planes() == 2);
  CHECK(scene.lens.epsilons()[0] == 0.01);
  const SolveResult r = find_images(scene.lens, scene.solve);
  CHECK(r.images.size() == 25);

  std::ifstream rep("/tmp/mltest_build/report.json");
  const json doc = json::parse(rep);
  CHECK(doc["achieved_count_eps0"].get<long long>() == 25);
  CHECK(doc["expected_count"].get<long long>() == 25);
}
