#include "output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mltool {

using multilens::CurveSet;
using multilens::CurveWindow;
using multilens::LensedImage;
using multilens::MorseType;
using multilens::MultiplaneLens;
using multilens::Polyline;
using multilens::SolveResult;
using multilens::Vec2;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

const char* morse_name(MorseType t) {
  switch (t) {
    case MorseType::minimum: return "minimum";
    case MorseType::saddle: return "saddle";
    case MorseType::maximum: return "maximum";
    default: return "unavailable";
  }
}

}  // namespace

std::string image_table_csv(const MultiplaneLens& lens,
                            const SolveResult& result,
                            const multilens::BoundsReport& bounds) {
  std::ostringstream out;
  const std::size_t k = lens.num_planes();
  out << "index";
  for (std::size_t i = 1; i <= k; ++i) {
    out << ",x" << i << "_u,x" << i << "_v";
  }
  out << ",residual,det,parity,morse\n";
  int idx = 0;
  for (const auto& img : result.images) {
    out << idx++;
    for (const Vec2 p : img.path.impacts) {
      out << ',' << fmt17(p.u) << ',' << fmt17(p.v);
    }
    out << ',' << fmt17(img.path.residual_norm) << ','
        << fmt17(img.lens_map_jacobian_det) << ',' << img.parity << ','
        << morse_name(img.morse_type) << '\n';
  }
  out << "# count=" << result.images.size()
      << " suspects=" << result.suspects.size() << " lower=" << bounds.lower
      << " upper=" << bounds.upper_eq1 << " conjectured=";
  if (bounds.conjectured_max) {
    out << *bounds.conjectured_max;
  } else {
    out << "n/a";
  }
  const long long n = static_cast<long long>(result.images.size());
  out << " within_bounds="
      << ((n >= bounds.lower && n <= bounds.upper_eq1) ? "yes" : "no") << '\n';
  return out.str();
}

std::string polyline_csv(const Polyline& poly, const std::string& plane_tag,
                         int component_id) {
  std::ostringstream out;
  out << "# plane=" << plane_tag << " component=" << component_id
      << " closed=" << (poly.closed ? 1 : 0) << '\n';
  out << "u,v\n";
  for (const Vec2 p : poly.points) {
    out << fmt17(p.u) << ',' << fmt17(p.v) << '\n';
  }
  return out.str();
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
                          "#7f7f7f", "#bcbd22"};

class SvgBuilder {
 public:
  SvgBuilder(const CurveWindow& w, int px) : w_(w), px_(px) {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px_
         << "\" height=\"" << px_ << "\" viewBox=\"0 0 " << px_ << ' ' << px_
         << "\">\n";
    out_ << "<rect width=\"" << px_ << "\" height=\"" << px_
         << "\" fill=\"white\"/>\n";
  }

  double sx(double u) const {
    return (u - (w_.center.u - w_.half_width)) / (2 * w_.half_width) * px_;
  }
  double sy(double v) const {
    return px_ - (v - (w_.center.v - w_.half_width)) / (2 * w_.half_width) * px_;
  }

  void polyline(const Polyline& poly, const std::string& color) {
    out_ << (poly.closed ? "<polygon" : "<polyline") << " points=\"";
    for (const Vec2 p : poly.points) {
      out_ << sx(p.u) << ',' << sy(p.v) << ' ';
    }
    out_ << "\" fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"1.2\"/>\n";
  }

  void dot(Vec2 p, bool filled, const std::string& color = "black") {
    out_ << "<circle cx=\"" << sx(p.u) << "\" cy=\"" << sy(p.v)
         << "\" r=\"4\" fill=\"" << (filled ? color : std::string("white"))
         << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
  }

  void plus(Vec2 p, const std::string& color, double r = 5.0) {
    const double x = sx(p.u), y = sy(p.v);
    out_ << "<path d=\"M" << x - r << ' ' << y << " H" << x + r << " M" << x
         << ' ' << y - r << " V" << y + r << "\" stroke=\"" << color
         << "\" stroke-width=\"1.5\" fill=\"none\"/>\n";
  }

  void cross(Vec2 p, const std::string& color, double r = 4.0) {
    const double x = sx(p.u), y = sy(p.v);
    out_ << "<path d=\"M" << x - r << ' ' << y - r << " L" << x + r << ' '
         << y + r << " M" << x - r << ' ' << y + r << " L" << x + r << ' '
         << y - r << "\" stroke=\"" << color
         << "\" stroke-width=\"1.5\" fill=\"none\"/>\n";
  }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  CurveWindow w_;
  int px_;
  std::ostringstream out_;
};

std::vector<int> group_of_component(const CurveSet& curves) {
  std::vector<int> group(curves.critical.size(), 0);
  for (std::size_t g = 0; g < curves.multiplicity_groups.size(); ++g) {
    for (int idx : curves.multiplicity_groups[g]) {
      group[idx] = static_cast<int>(g);
    }
  }
  return group;
}

}  // namespace

std::string critical_svg(const MultiplaneLens& lens, const CurveSet& curves,
                         const std::vector<LensedImage>& images,
                         const SvgPanel& panel) {
  SvgBuilder svg(panel.window, panel.size_px);
  const auto group = group_of_component(curves);
  for (std::size_t i = 0; i < curves.critical.size(); ++i) {
    svg.polyline(curves.critical[i], kPalette[group[i] % 10]);
  }
  for (std::size_t j = 0; j < lens.num_planes(); ++j) {
    for (const auto& m : lens.plane(j).masses()) {
      svg.dot(m.position, j == 0);
    }
  }
  for (const auto& img : images) {
    if (img.parity > 0) {
      svg.plus(img.position(), "#000000");
    } else {
      svg.cross(img.position(), "#555555");
    }
  }
  return svg.finish();
}

std::string caustic_svg(const MultiplaneLens& lens, const CurveSet& curves,
                        const SvgPanel& panel) {
  SvgBuilder svg(panel.window, panel.size_px);
  const auto group = group_of_component(curves);
  for (std::size_t i = 0; i < curves.caustic.size(); ++i) {
    svg.polyline(curves.caustic[i], kPalette[group[i] % 10]);
  }
  svg.plus(lens.source(), "#d62728", 6.0);
  return svg.finish();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace mltool
