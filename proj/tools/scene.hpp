#ifndef MULTILENS_TOOLS_SCENE_HPP
#define MULTILENS_TOOLS_SCENE_HPP

#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>

#include "multilens/caustics.hpp"
#include "multilens/core.hpp"
#include "multilens/solver.hpp"

namespace mltool {

/// Scene file failed to parse as JSON.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line(line) {}
  int line;
};

/// A lens system plus solver/curve settings, loadable from JSON.
struct Scene {
  multilens::MultiplaneLens lens;
  multilens::SolveOptions solve;
  multilens::CurveOptions curves;
  nlohmann::json normalized;  // canonical description, save() emits this
};

Scene scene_from_json(const nlohmann::json& doc);
Scene load_scene(const std::string& path);

/// Canonical formatting: sorted keys, two-space indent, trailing newline.
std::string save_scene(const Scene& scene);
void save_scene_file(const Scene& scene, const std::string& path);

/// Scene description for an already-built lens (mass lists spelled out).
nlohmann::json lens_to_json(const multilens::MultiplaneLens& lens);

}  // namespace mltool

#endif
