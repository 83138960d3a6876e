#ifndef GAUSS_EMBED_SVG_H_
#define GAUSS_EMBED_SVG_H_

#include <filesystem>
#include <string>
#include <vector>

#include "gauss_embed/pca.h"

namespace gauss_embed {

// Words to draw: 2-D centers (usually PCA-projected means) and the sigma that
// sets each circle's radius, on a square canvas of side `extent` pixels.
struct VizSpec {
  std::vector<std::string> words;
  std::vector<Point2> centers;
  std::vector<double> sigmas;
  double extent = 800.0;
};

struct Circle {
  std::string label;
  double cx = 0.0;
  double cy = 0.0;
  double r = 0.0;
};

// Canvas placement. Radius is linear in sigma, scaled so the median radius is
// 5% of the extent (shrunk uniformly if the largest circle would exceed 45%).
// Centers are scaled uniformly and recentred so every circle lies inside the
// canvas. Throws ConfigError for inconsistent or invalid specs.
std::vector<Circle> layout_circles(const VizSpec& spec);

// Standalone SVG, one labelled <circle> per word, fixed 3-decimal numbers.
std::string render_svg(const VizSpec& spec);
void emit_viz(const VizSpec& spec, const std::filesystem::path& path);

}  // namespace gauss_embed

#endif  // GAUSS_EMBED_SVG_H_
