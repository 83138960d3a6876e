#ifndef GAUSS_EMBED_PCA_H_
#define GAUSS_EMBED_PCA_H_

#include <array>
#include <span>
#include <vector>

namespace gauss_embed {

using Point2 = std::array<double, 2>;

// Top-2 principal axes of a point set. Each axis is a unit vector whose
// largest-magnitude component is positive.
struct Pca2 {
  std::vector<double> center;
  std::array<std::vector<double>, 2> axes;
  std::array<double, 2> variances{};  // sample variance along each axis

  Point2 project(std::span<const double> x) const;
};

// Fits on `points` (all of one dimension D >= 2). Throws ShapeError on ragged
// input, ConfigError when D < 2, DataError for fewer than two distinct points.
Pca2 fit_pca2(std::span<const std::vector<double>> points);

// Centers the points and projects them onto their own top-2 axes.
std::vector<Point2> pca_project(std::span<const std::vector<double>> points);

}  // namespace gauss_embed

#endif  // GAUSS_EMBED_PCA_H_
