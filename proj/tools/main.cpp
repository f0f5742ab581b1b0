#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"multilens: multiplane point-mass lens systems with extremal "
               "image counts"};
  app.require_subcommand(1);

  mltool::CommonFlags flags;
  std::vector<int> g_list;
  std::vector<double> lambdas, eps_values, redshifts;
  double omega_m = 1.0, omega_lambda = 0.0;
  double eps_max = 0.01;
  int steps = 10;
  int tune_g = 4;

  auto add_common = [&](CLI::App* cmd, bool needs_scene) {
    auto* scene =
        cmd->add_option("--scene", flags.scene_path, "scene JSON file");
    if (needs_scene) scene->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--grid", flags.grid, "seed/contour lattice size");
    cmd->add_option("--tol", flags.tol, "newton residual tolerance");
    cmd->add_option("--window", flags.window, "window half-width");
  };

  auto* solve = app.add_subcommand("solve", "find all lensed images");
  add_common(solve, true);

  auto* curves =
      app.add_subcommand("curves", "critical curves, caustics, renderings");
  add_common(curves, true);
  curves->add_option("--format", flags.format, "csv|svg|both")
      ->check(CLI::IsMember({"csv", "svg", "both"}));

  auto* build =
      app.add_subcommand("build", "construct an extremal K-plane scene");
  build->add_option("g", g_list, "masses per plane (front to back)")
      ->required();
  build->add_option("--lambda", lambdas,
                    "explicit scale factors for planes 2..K");
  build->add_option("--eps", eps_values,
                    "interplane couplings (single value is broadcast)");
  build->add_option("--out", flags.out_dir, "output directory");

  auto* cosmo =
      app.add_subcommand("cosmo", "distances and plane couplings from FLRW");
  cosmo->add_option("--omega-m", omega_m, "matter density")->required();
  cosmo->add_option("--omega-lambda", omega_lambda, "cosmological constant")
      ->required();
  cosmo->add_option("z", redshifts, "plane redshifts then source redshift")
      ->required();

  auto* bounds = app.add_subcommand("bounds", "image-count bounds");
  bounds->add_option("g", g_list, "masses per plane")->required();

  auto* tune = app.add_subcommand("tune", "central-mass tuning (g >= 4)");
  tune->add_option("g", tune_g, "mass count")->required();

  auto* scan = app.add_subcommand("eps-scan", "image count versus epsilon");
  add_common(scan, true);
  scan->add_option("--max", eps_max, "largest epsilon")->required();
  scan->add_option("--steps", steps, "number of steps");

  CLI11_PARSE(app, argc, argv);

  return mltool::run_command([&]() -> int {
    if (solve->parsed()) return mltool::cmd_solve(flags);
    if (curves->parsed()) return mltool::cmd_curves(flags);
    if (build->parsed()) {
      return mltool::cmd_build(g_list, lambdas, eps_values, flags.out_dir);
    }
    if (cosmo->parsed()) {
      return mltool::cmd_cosmo(omega_m, omega_lambda, redshifts);
    }
    if (bounds->parsed()) return mltool::cmd_bounds(g_list);
    if (tune->parsed()) return mltool::cmd_tune(tune_g);
    if (scan->parsed()) return mltool::cmd_eps_scan(flags, eps_max, steps);
    return mltool::kUsage;
  });
}
