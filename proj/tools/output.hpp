#ifndef MULTILENS_TOOLS_OUTPUT_HPP
#define MULTILENS_TOOLS_OUTPUT_HPP

#include <string>
#include <vector>

#include "multilens/caustics.hpp"
#include "multilens/core.hpp"
#include "multilens/solver.hpp"

namespace mltool {

/// %.17g — round-trip exact for doubles.
std::string fmt17(double x);

std::string image_table_csv(const multilens::MultiplaneLens& lens,
                            const multilens::SolveResult& result,
                            const multilens::BoundsReport& bounds);

std::string polyline_csv(const multilens::Polyline& poly,
                         const std::string& plane_tag, int component_id);

struct SvgPanel {
  multilens::CurveWindow window;
  int size_px = 800;
};

/// Critical-curve panel: curves colored by multiplicity group, filled dots
/// for plane-1 masses, open dots for downstream mass projections, +/x image
/// markers by parity.
std::string critical_svg(const multilens::MultiplaneLens& lens,
                         const multilens::CurveSet& curves,
                         const std::vector<multilens::LensedImage>& images,
                         const SvgPanel& panel);

/// Source-plane panel: caustics (group colors) and the source marker.
std::string caustic_svg(const multilens::MultiplaneLens& lens,
                        const multilens::CurveSet& curves,
                        const SvgPanel& panel);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace mltool

#endif
