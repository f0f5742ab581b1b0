#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "multilens/builder.hpp"
#include "multilens/cosmology.hpp"
#include "multilens/errors.hpp"
#include "multilens/rhie.hpp"
#include "output.hpp"
#include "scene.hpp"

namespace mltool {

namespace fs = std::filesystem;
using namespace multilens;

namespace {

Scene load_with_overrides(const CommonFlags& flags) {
  Scene scene = load_scene(flags.scene_path);
  if (flags.grid) {
    scene.solve.grid_n = *flags.grid;
    scene.curves.grid_n = *flags.grid;
  }
  if (flags.tol) scene.solve.newton_tol = *flags.tol;
  if (flags.window) {
    scene.solve.window_half_width = *flags.window;
    scene.curves.window.half_width = *flags.window;
  }
  return scene;
}

std::vector<int> image_g_list(const MultiplaneLens& lens) {
  std::vector<int> gs;
  for (const auto& p : lens.planes()) {
    gs.push_back(static_cast<int>(p.size()));
  }
  return gs;
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

}  // namespace

int cmd_solve(const CommonFlags& flags) {
  const Scene scene = load_with_overrides(flags);
  const SolveResult result = find_images(scene.lens, scene.solve);
  const auto gs = image_g_list(scene.lens);
  const BoundsReport bounds = image_count_bounds(gs);
  const std::string table = image_table_csv(scene.lens, result, bounds);
  if (flags.out_dir.empty()) {
    std::cout << table;
  } else {
    ensure_dir(flags.out_dir);
    write_text_file(flags.out_dir + "/images.csv", table);
    std::cout << "images: " << result.images.size()
              << " (suspects: " << result.suspects.size() << ") -> "
              << flags.out_dir << "/images.csv\n";
  }
  if (!result.suspects.empty()) {
    std::cerr << "warning: " << result.suspects.size()
              << " degenerate roots (|det| below margin); source may sit on a"
                 " caustic\n";
  }
  return kOk;
}

int cmd_curves(const CommonFlags& flags) {
  const Scene scene = load_with_overrides(flags);
  const CurveSet curves = extract_curves(scene.lens, scene.curves);
  const SolveResult result = find_images(scene.lens, scene.solve);

  ensure_dir(flags.out_dir.empty() ? "." : flags.out_dir);
  const std::string dir = flags.out_dir.empty() ? "." : flags.out_dir;

  const bool want_csv = flags.format == "csv" || flags.format == "both";
  const bool want_svg = flags.format == "svg" || flags.format == "both";

  if (want_csv) {
    for (std::size_t i = 0; i < curves.critical.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "critical_%03zu.csv", i);
      write_text_file(dir + "/" + name,
                      polyline_csv(curves.critical[i], "image",
                                   static_cast<int>(i)));
      std::snprintf(name, sizeof name, "caustic_%03zu.csv", i);
      write_text_file(dir + "/" + name,
                      polyline_csv(curves.caustic[i], "source",
                                   static_cast<int>(i)));
    }
  }
  if (want_svg) {
    SvgPanel panel{scene.curves.window, 800};
    write_text_file(dir + "/critical.svg",
                    critical_svg(scene.lens, curves, result.images, panel));
    write_text_file(dir + "/caustic.svg", caustic_svg(scene.lens, curves, panel));
  }

  nlohmann::json meta;
  meta["components"] = curves.critical.size();
  meta["group_tolerance"] = curves.group_tolerance;
  meta["groups"] = curves.multiplicity_groups;
  std::vector<int> open;
  for (std::size_t i = 0; i < curves.critical.size(); ++i) {
    if (!curves.critical[i].closed) open.push_back(static_cast<int>(i));
  }
  meta["open_components"] = open;
  meta["dropped_caustic_points"] = curves.dropped_points;
  meta["images"] = result.images.size();
  write_text_file(dir + "/summary.json", meta.dump(2) + "\n");

  std::cout << "components: " << curves.critical.size() << "  groups:";
  for (const auto& g : curves.multiplicity_groups) {
    std::cout << ' ' << g.size();
  }
  std::cout << "  (tol " << curves.group_tolerance << ")\n";
  if (!open.empty()) {
    std::cerr << "warning: " << open.size()
              << " contour(s) exit the window and stay open\n";
  }
  if (curves.dropped_points > 0) {
    std::cerr << "warning: " << curves.dropped_points
              << " caustic vertices dropped (obstructed)\n";
  }
  return kOk;
}

int cmd_build(const std::vector<int>& g_list,
              const std::vector<double>& lambdas,
              const std::vector<double>& eps, const std::string& out_dir) {
  BuildOptions opts;
  if (!lambdas.empty()) opts.lambdas = lambdas;
  auto [lens, report] = build_preliminary(g_list, opts);
  if (!eps.empty()) {
    if (eps.size() == 1 && g_list.size() > 2) {
      lens = perturb_epsilon(
          lens, std::vector<double>(g_list.size() - 1, eps[0]));
    } else {
      lens = perturb_epsilon(lens, eps);
    }
  }

  Scene scene{lens, {}, {}, {}};
  scene.normalized = lens_to_json(lens);
  // re-normalize through the loader so saved scenes are canonical
  scene = scene_from_json(scene.normalized);

  nlohmann::json rep;
  rep["g_list"] = report.g_list;
  rep["lambdas"] = report.lambdas;
  rep["step_lambdas"] = report.step_lambdas;
  rep["deltas"] = report.deltas;
  rep["radii"] = report.radii;
  rep["expected_count"] = report.expected_count;
  rep["achieved_count_eps0"] = report.achieved_count_eps0;
  rep["epsilon_used"] = lens.epsilons();

  const std::string dir = out_dir.empty() ? "." : out_dir;
  ensure_dir(dir);
  save_scene_file(scene, dir + "/scene.json");
  write_text_file(dir + "/report.json", rep.dump(2) + "\n");
  std::cout << "built K=" << g_list.size() << " system: "
            << report.achieved_count_eps0 << " images at eps=0 (expected "
            << report.expected_count << ") -> " << dir << "/scene.json\n";
  return kOk;
}

int cmd_cosmo(double omega_m, double omega_lambda,
              const std::vector<double>& redshifts) {
  const Cosmology c = Cosmology::make(omega_m, omega_lambda);
  const PlaneRedshifts zr(redshifts);
  std::cout << "omega_m=" << fmt17(omega_m)
            << " omega_lambda=" << fmt17(omega_lambda)
            << " omega_k=" << fmt17(c.omega_k) << "\n";
  std::cout << "z,dC,dM,dA\n";
  for (double z : zr.zs) {
    std::cout << fmt17(z) << ',' << fmt17(comoving_distance(c, 0, z)) << ','
              << fmt17(transverse_comoving_between(c, 0, z)) << ','
              << fmt17(angular_diameter(c, 0, z)) << "\n";
  }
  const PlaneParameters p = plane_parameters(c, zr);
  std::cout << "plane,beta,epsilon\n";
  for (int i = 0; i < zr.num_planes(); ++i) {
    std::cout << (i + 1) << ',' << fmt17(p.betas[i]) << ','
              << fmt17(p.epsilons[i]) << "\n";
  }
  if (c.flat()) {
    // additivity of transverse comoving distances across the plane stack
    bool pass = true;
    for (std::size_t i = 0; i + 2 < zr.zs.size(); ++i) {
      const double a = transverse_comoving_between(c, zr.zs[i], zr.zs[i + 1]);
      const double b =
          transverse_comoving_between(c, zr.zs[i + 1], zr.zs[i + 2]);
      const double whole =
          transverse_comoving_between(c, zr.zs[i], zr.zs[i + 2]);
      if (std::abs(a + b - whole) > 1e-9) pass = false;
    }
    {
      const double a = transverse_comoving_between(c, 0, zr.zs[0]);
      const double b = transverse_comoving_between(c, zr.zs[0], zr.zs[1]);
      const double whole = transverse_comoving_between(c, 0, zr.zs[1]);
      if (std::abs(a + b - whole) > 1e-9) pass = false;
    }
    std::cout << "additivity_check " << (pass ? "PASS" : "FAIL") << "\n";
  }
  return kOk;
}

int cmd_bounds(const std::vector<int>& g_list) {
  const BoundsReport r = image_count_bounds(g_list);
  std::cout << "lower=" << r.lower << " even_sum=" << r.even_sum
            << " odd_sum=" << r.odd_sum << " upper=" << r.upper_eq1;
  if (r.conjectured_max) std::cout << " conjectured=" << *r.conjectured_max;
  if (r.petters_special) std::cout << " petters_special=" << *r.petters_special;
  std::cout << "\n";
  return kOk;
}

int cmd_tune(int g) {
  const double b = tune_central_mass(g);
  const auto [plane, cfg] = rhie_plane(g, 0.0, b);
  const SolveResult r = find_images(MultiplaneLens({plane}, {0, 0}));
  std::cout << "g=" << g << " central_b=" << fmt17(b)
            << " polygon_radius=" << fmt17(cfg.polygon_radius)
            << " images=" << r.images.size() << "\n";
  return kOk;
}

int cmd_eps_scan(const CommonFlags& flags, double eps_max, int steps) {
  const Scene scene = load_with_overrides(flags);
  if (scene.lens.num_planes() < 2) {
    throw ValidationError("eps-scan needs a multiplane scene");
  }
  if (!(eps_max > 0.0) || steps < 1) {
    throw ValidationError("eps-scan needs --max > 0 and --steps >= 1");
  }
  std::cout << "eps,count,min_abs_det\n";
  for (int s = 0; s <= steps; ++s) {
    const double eps = eps_max * s / steps;
    const MultiplaneLens lens = scene.lens.with_epsilons(
        std::vector<double>(scene.lens.num_planes() - 1, eps));
    const SolveResult r = find_images(lens, scene.solve);
    double min_det = std::numeric_limits<double>::infinity();
    for (const auto& img : r.images) {
      min_det = std::min(min_det, std::abs(img.lens_map_jacobian_det));
    }
    if (r.images.empty()) min_det = 0.0;
    std::cout << fmt17(eps) << ',' << r.images.size() << ',' << fmt17(min_det)
              << "\n";
  }
  return kOk;
}

int run_mapped(int (*body)(void*), void* ctx) {
  try {
    return body(ctx);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidationError;
  } catch (const ObstructionError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolverError;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolverError;
  } catch (const ConstructionError& e) {
    std::cerr << "construction error: " << e.what() << "\n";
    return kConstructionError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace mltool
