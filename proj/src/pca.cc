#include "gauss_embed/pca.h"

#include <Eigen/Dense>
#include <cmath>

#include "gauss_embed/errors.h"

namespace gauss_embed {

Point2 Pca2::project(std::span<const double> x) const {
  if (x.size() != center.size()) throw ShapeError("point dimension does not match the fitted PCA");
  Point2 p{0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double c = x[i] - center[i];
    p[0] += c * axes[0][i];
    p[1] += c * axes[1][i];
  }
  return p;
}

Pca2 fit_pca2(std::span<const std::vector<double>> points) {
  if (points.size() < 2) throw DataError("PCA needs at least two points");
  const std::size_t dim = points[0].size();
  for (const auto& p : points) {
    if (p.size() != dim) throw ShapeError("PCA input points differ in dimension");
  }
  if (dim < 2) throw ConfigError("PCA projection to 2-D needs dimension >= 2");

  const auto n = static_cast<Eigen::Index>(points.size());
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = points[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  if (x.cwiseAbs().maxCoeff() == 0.0) throw DataError("PCA needs at least two distinct points");

  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw DataError("PCA eigendecomposition failed");

  Pca2 pca;
  pca.center.assign(mean.data(), mean.data() + d);
  for (int k = 0; k < 2; ++k) {
    // Eigenvalues are ascending.
    const Eigen::Index col = d - 1 - k;
    Eigen::VectorXd v = solver.eigenvectors().col(col);
    Eigen::Index argmax = 0;
    v.cwiseAbs().maxCoeff(&argmax);
    if (v(argmax) < 0.0) v = -v;
    pca.axes[static_cast<std::size_t>(k)].assign(v.data(), v.data() + d);
    pca.variances[static_cast<std::size_t>(k)] = std::max(0.0, solver.eigenvalues()(col));
  }
  return pca;
}

std::vector<Point2> pca_project(std::span<const std::vector<double>> points) {
  const Pca2 pca = fit_pca2(points);
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(pca.project(p));
  return out;
}

}  // namespace gauss_embed
