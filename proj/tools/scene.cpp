#include "scene.hpp"

#include <fstream>
#include <sstream>

#include "multilens/builder.hpp"
#include "multilens/errors.hpp"
#include "multilens/rhie.hpp"

namespace mltool {

using multilens::LensPlane;
using multilens::MultiplaneLens;
using multilens::PointMass;
using multilens::ValidationError;
using multilens::Vec2;
using nlohmann::json;

namespace {

Vec2 parse_point(const json& node, const std::string& field) {
  if (!node.is_array() || node.size() != 2 || !node[0].is_number() ||
      !node[1].is_number()) {
    throw ValidationError(field + " must be a [u, v] pair of numbers");
  }
  return {node[0].get<double>(), node[1].get<double>()};
}

double require_number(const json& obj, const std::string& field,
                      double fallback, bool* present = nullptr) {
  if (!obj.contains(field)) {
    if (present) *present = false;
    return fallback;
  }
  if (present) *present = true;
  if (!obj[field].is_number()) {
    throw ValidationError(field + " must be a number");
  }
  return obj[field].get<double>();
}

json normalize_plane(const json& node, LensPlane* out) {
  if (!node.is_object()) {
    throw ValidationError("each plane must be an object");
  }
  const double scale = require_number(node, "scale", 1.0);
  if (!(scale > 0.0)) throw ValidationError("plane scale must be > 0");

  json norm;
  if (node.contains("rhie")) {
    int g = 0;
    double rotation = 0.0;
    double central_b = -1.0;
    const json& r = node["rhie"];
    if (r.is_number_integer()) {
      g = r.get<int>();
    } else if (r.is_object()) {
      if (!r.contains("g") || !r["g"].is_number_integer()) {
        throw ValidationError("rhie.g must be an integer");
      }
      g = r["g"].get<int>();
      rotation = require_number(r, "rotation", 0.0);
      central_b = require_number(r, "central_b", -1.0);
    } else {
      throw ValidationError("rhie must be an integer or an object");
    }
    rotation = require_number(node, "rotation", rotation);
    auto [plane, cfg] = multilens::rhie_plane(g, rotation, central_b);
    *out = multilens::scale_plane(plane, scale);
    norm["rhie"] = {{"g", cfg.g},
                    {"rotation", cfg.rotation},
                    {"central_b", cfg.central_b}};
    norm["scale"] = scale;
    return norm;
  }

  if (!node.contains("masses") || !node["masses"].is_array() ||
      node["masses"].empty()) {
    throw ValidationError("plane needs either a rhie shorthand or masses");
  }
  std::vector<PointMass> masses;
  for (const json& m : node["masses"]) {
    if (!m.is_object()) throw ValidationError("masses entries must be objects");
    PointMass pm;
    pm.einstein_radius = require_number(m, "b", -1.0);
    if (pm.einstein_radius < 0.0) {
      throw ValidationError("mass b must be present and >= 0");
    }
    if (!m.contains("position")) {
      throw ValidationError("mass needs a position");
    }
    pm.position = parse_point(m["position"], "mass position");
    pm.position = scale * pm.position;
    pm.einstein_radius *= scale;
    masses.push_back(pm);
  }
  *out = LensPlane(masses);  // validates separation, finiteness
  json mass_list = json::array();
  for (const auto& m : out->masses()) {
    mass_list.push_back(
        {{"b", m.einstein_radius}, {"position", {m.position.u, m.position.v}}});
  }
  norm["masses"] = mass_list;
  return norm;
}

}  // namespace

json lens_to_json(const MultiplaneLens& lens) {
  json doc;
  json planes = json::array();
  for (const auto& p : lens.planes()) {
    json mass_list = json::array();
    for (const auto& m : p.masses()) {
      mass_list.push_back({{"b", m.einstein_radius},
                           {"position", {m.position.u, m.position.v}}});
    }
    planes.push_back({{"masses", mass_list}});
  }
  doc["planes"] = planes;
  doc["source"] = {lens.source().u, lens.source().v};
  doc["epsilons"] = lens.epsilons();
  doc["betas"] = lens.betas();
  return doc;
}

Scene scene_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("scene root must be an object");
  if (!doc.contains("planes") || !doc["planes"].is_array() ||
      doc["planes"].empty()) {
    throw ValidationError("scene needs a nonempty planes array");
  }

  std::vector<LensPlane> planes;
  json norm_planes = json::array();
  for (const json& p : doc["planes"]) {
    LensPlane plane({{{0, 0}, 0.0}});
    norm_planes.push_back(normalize_plane(p, &plane));
    planes.push_back(plane);
  }
  const std::size_t k = planes.size();

  Vec2 source{0, 0};
  if (doc.contains("source")) source = parse_point(doc["source"], "source");

  std::vector<double> eps;
  if (doc.contains("epsilons")) {
    if (!doc["epsilons"].is_array()) {
      throw ValidationError("epsilons must be an array");
    }
    for (const json& e : doc["epsilons"]) {
      if (!e.is_number()) throw ValidationError("epsilons must be numbers");
      eps.push_back(e.get<double>());
    }
    if (eps.size() != k - 1) {
      throw ValidationError("epsilons must have K-1 = " +
                            std::to_string(k - 1) + " entries, got " +
                            std::to_string(eps.size()));
    }
  }
  std::vector<double> betas;
  if (doc.contains("betas")) {
    if (!doc["betas"].is_array()) throw ValidationError("betas must be an array");
    for (const json& b : doc["betas"]) {
      if (!b.is_number()) throw ValidationError("betas must be numbers");
      betas.push_back(b.get<double>());
    }
    if (betas.size() != k) {
      throw ValidationError("betas must have K entries");
    }
  }

  Scene scene{MultiplaneLens(planes, source, eps, betas), {}, {}, {}};

  if (doc.contains("solve")) {
    const json& s = doc["solve"];
    if (!s.is_object()) throw ValidationError("solve must be an object");
    scene.solve.grid_n =
        static_cast<int>(require_number(s, "grid_n", scene.solve.grid_n));
    scene.solve.window_half_width =
        require_number(s, "window", scene.solve.window_half_width);
    if (s.contains("center")) {
      scene.solve.window_center = parse_point(s["center"], "solve.center");
    }
    scene.solve.newton_tol =
        require_number(s, "newton_tol", scene.solve.newton_tol);
    scene.solve.newton_max_iter = static_cast<int>(
        require_number(s, "newton_max_iter", scene.solve.newton_max_iter));
    scene.solve.dedup_radius =
        require_number(s, "dedup_radius", scene.solve.dedup_radius);
    scene.solve.nondegeneracy_margin =
        require_number(s, "margin", scene.solve.nondegeneracy_margin);
    if (s.contains("cascade")) {
      if (!s["cascade"].is_boolean()) {
        throw ValidationError("solve.cascade must be a boolean");
      }
      scene.solve.cascade_seeds = s["cascade"].get<bool>();
    }
    if (scene.solve.grid_n < 2 || !(scene.solve.newton_tol > 0) ||
        scene.solve.newton_max_iter < 1 || !(scene.solve.dedup_radius > 0) ||
        !(scene.solve.nondegeneracy_margin > 0)) {
      throw ValidationError("solve options must be positive");
    }
  }

  scene.curves.window.half_width = 3.0;
  if (doc.contains("curves")) {
    const json& cv = doc["curves"];
    if (!cv.is_object()) throw ValidationError("curves must be an object");
    scene.curves.grid_n =
        static_cast<int>(require_number(cv, "grid_n", scene.curves.grid_n));
    scene.curves.window.half_width =
        require_number(cv, "window", scene.curves.window.half_width);
    if (cv.contains("center")) {
      scene.curves.window.center = parse_point(cv["center"], "curves.center");
    }
    scene.curves.group_tol =
        require_number(cv, "group_tol", scene.curves.group_tol);
    if (scene.curves.grid_n < 64 || !(scene.curves.window.half_width > 0)) {
      throw ValidationError("curves.grid_n must be >= 64 and window > 0");
    }
  }

  json norm;
  norm["planes"] = norm_planes;
  norm["source"] = {source.u, source.v};
  norm["epsilons"] = scene.lens.epsilons();
  norm["betas"] = scene.lens.betas();
  norm["solve"] = {
      {"grid_n", scene.solve.grid_n},
      {"window", scene.solve.window_half_width},
      {"center", {scene.solve.window_center.u, scene.solve.window_center.v}},
      {"newton_tol", scene.solve.newton_tol},
      {"newton_max_iter", scene.solve.newton_max_iter},
      {"dedup_radius", scene.solve.dedup_radius},
      {"margin", scene.solve.nondegeneracy_margin},
      {"cascade", scene.solve.cascade_seeds}};
  norm["curves"] = {
      {"grid_n", scene.curves.grid_n},
      {"window", scene.curves.window.half_width},
      {"center", {scene.curves.window.center.u, scene.curves.window.center.v}},
      {"group_tol", scene.curves.group_tol}};
  scene.normalized = std::move(norm);
  return scene;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scene file " + path, 0);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') ++line;
    }
    throw ParseError(e.what(), line);
  }
  return scene_from_json(doc);
}

std::string save_scene(const Scene& scene) {
  return scene.normalized.dump(2) + "\n";
}

void save_scene_file(const Scene& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scene file " + path);
  out << save_scene(scene);
}

}  // namespace mltool
