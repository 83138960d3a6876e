#include "gauss_embed/svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "gauss_embed/errors.h"

namespace gauss_embed {

namespace {

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<Circle> layout_circles(const VizSpec& spec) {
  const std::size_t n = spec.words.size();
  if (n == 0) throw ConfigError("nothing to draw");
  if (spec.centers.size() != n || spec.sigmas.size() != n) {
    throw ConfigError("words, centers and sigmas must have the same length");
  }
  if (!(spec.extent > 0.0)) throw ConfigError("canvas extent must be positive");
  for (double s : spec.sigmas) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("sigmas must be positive and finite");
  }

  double scale_r = 0.05 * spec.extent / median(spec.sigmas);
  const double max_sigma = *std::max_element(spec.sigmas.begin(), spec.sigmas.end());
  scale_r = std::min(scale_r, 0.45 * spec.extent / max_sigma);

  std::vector<Circle> circles(n);
  for (std::size_t i = 0; i < n; ++i) {
    circles[i].label = spec.words[i];
    circles[i].r = scale_r * spec.sigmas[i];
  }

  std::array<double, 2> mid{};
  for (int axis = 0; axis < 2; ++axis) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& c : spec.centers) {
      lo = std::min(lo, c[axis]);
      hi = std::max(hi, c[axis]);
    }
    mid[axis] = 0.5 * (lo + hi);
  }
  const double half = 0.5 * spec.extent;
  double scale = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (int axis = 0; axis < 2; ++axis) {
      const double off = std::abs(spec.centers[i][axis] - mid[axis]);
      if (off > 0.0) scale = std::min(scale, (half - circles[i].r) / off);
    }
  }
  if (!std::isfinite(scale)) scale = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    circles[i].cx = half + scale * (spec.centers[i][0] - mid[0]);
    circles[i].cy = half - scale * (spec.centers[i][1] - mid[1]);
  }
  return circles;
}

std::string render_svg(const VizSpec& spec) {
  const auto circles = layout_circles(spec);
  const std::string e = fixed3(spec.extent);
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + e + "\" height=\"" + e +
         "\" viewBox=\"0 0 " + e + " " + e + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + e + "\" height=\"" + e + "\" fill=\"white\"/>\n";
  for (const auto& c : circles) {
    out += "<g>\n";
    out += "<circle cx=\"" + fixed3(c.cx) + "\" cy=\"" + fixed3(c.cy) + "\" r=\"" + fixed3(c.r) +
           "\" fill=\"steelblue\" fill-opacity=\"0.25\" stroke=\"steelblue\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + fixed3(c.cx) + "\" y=\"" + fixed3(c.cy) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" + xml_escape(c.label) +
           "</text>\n";
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

void emit_viz(const VizSpec& spec, const std::filesystem::path& path) {
  const std::string svg = render_svg(spec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << svg;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace gauss_embed
