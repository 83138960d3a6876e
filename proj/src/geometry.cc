#include "gauss_embed/geometry.h"

#include <cmath>
#include <string>

#include "gauss_embed/errors.h"

namespace gauss_embed {

namespace {

void check_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw ShapeError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

void check_sigma(double s) {
  if (!(s > 0.0)) throw DomainError("sigma must be positive");
}

void check_diagonal(const DiagonalGaussian& g) {
  check_same_dim(g.mean.size(), g.variances.size());
  for (double v : g.variances) {
    if (!(v > 0.0)) throw DomainError("variances must be positive");
  }
}

EnergyGradient expand(const EnergyTerms& t, GaussianRef w, GaussianRef c) {
  EnergyGradient g;
  const std::size_t d = w.mean.size();
  g.d_mean_w.resize(d);
  g.d_mean_c.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double delta = w.mean[i] - c.mean[i];
    g.d_mean_w[i] = t.mean_coef * delta;
    g.d_mean_c[i] = -t.mean_coef * delta;
  }
  g.d_sigma_w = t.d_sigma_w;
  g.d_sigma_c = t.d_sigma_c;
  g.d_bias = 1.0;
  return g;
}

}  // namespace

double squared_distance(std::span<const double> a, std::span<const double> b) {
  check_same_dim(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  check_same_dim(a.size(), b.size());
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double w2_spherical(GaussianRef a, GaussianRef b) {
  const double ds = a.sigma - b.sigma;
  const double dim = static_cast<double>(a.mean.size());
  return std::sqrt(squared_distance(a.mean, b.mean) + dim * ds * ds);
}

double w2_diagonal(const DiagonalGaussian& a, const DiagonalGaussian& b) {
  check_diagonal(a);
  check_diagonal(b);
  double s = squared_distance(a.mean, b.mean);
  for (std::size_t i = 0; i < a.variances.size(); ++i) {
    const double d = std::sqrt(a.variances[i]) - std::sqrt(b.variances[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

double kl_spherical(GaussianRef a, GaussianRef b) {
  check_sigma(a.sigma);
  check_sigma(b.sigma);
  const double dim = static_cast<double>(a.mean.size());
  const double vb = b.sigma * b.sigma;
  const double ratio = a.sigma * a.sigma / vb;
  return 0.5 * (dim * (ratio - 1.0 - std::log(ratio)) + squared_distance(a.mean, b.mean) / vb);
}

double kl_diagonal(const DiagonalGaussian& a, const DiagonalGaussian& b) {
  check_diagonal(a);
  check_diagonal(b);
  check_same_dim(a.mean.size(), b.mean.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.mean.size(); ++i) {
    const double ratio = a.variances[i] / b.variances[i];
    const double d = b.mean[i] - a.mean[i];
    s += ratio - 1.0 - std::log(ratio) + d * d / b.variances[i];
  }
  return 0.5 * s;
}

EnergyTerms energy_terms_w2(GaussianRef w, GaussianRef c, double bias,
                            const EnergyOptions& options) {
  const double dist2 = squared_distance(w.mean, c.mean);
  const double dim = static_cast<double>(w.mean.size());
  const double ds = w.sigma - c.sigma;
  const double w2sq = dist2 + dim * ds * ds;

  EnergyTerms t;
  if (options.squared_w2) {
    t.energy = -w2sq + bias;
    t.mean_coef = -2.0;
    t.d_sigma_w = -2.0 * dim * ds;
  } else {
    const double w2 = std::sqrt(w2sq);
    t.energy = -w2 + bias;
    const double inv = 1.0 / std::max(w2, options.grad_floor);
    t.mean_coef = -inv;
    t.d_sigma_w = -dim * ds * inv;
  }
  t.d_sigma_c = -t.d_sigma_w;
  return t;
}

EnergyTerms energy_terms_kl(GaussianRef child, GaussianRef parent, double bias) {
  check_sigma(child.sigma);
  check_sigma(parent.sigma);
  const double dim = static_cast<double>(child.mean.size());
  const double dist2 = squared_distance(child.mean, parent.mean);
  const double vp = parent.sigma * parent.sigma;
  const double ratio = child.sigma * child.sigma / vp;
  const double kl = 0.5 * (dim * (ratio - 1.0 - std::log(ratio)) + dist2 / vp);

  EnergyTerms t;
  t.energy = -kl + bias;
  t.mean_coef = -1.0 / vp;
  // dKL/dsigma_child = D (sigma_child / sigma_parent^2 - 1 / sigma_child)
  t.d_sigma_w = -dim * (child.sigma / vp - 1.0 / child.sigma);
  // dKL/dsigma_parent = D / sigma_parent - D sigma_child^2 / sigma_parent^3 - dist2 / sigma_parent^3
  t.d_sigma_c = -(dim * (1.0 - ratio) - dist2 / vp) / parent.sigma;
  return t;
}

double energy_w2(GaussianRef w, GaussianRef c, double bias, const EnergyOptions& options) {
  check_same_dim(w.mean.size(), c.mean.size());
  return energy_terms_w2(w, c, bias, options).energy;
}

double energy_kl(GaussianRef child, GaussianRef parent, double bias) {
  return -kl_spherical(child, parent) + bias;
}

EnergyGradient grad_energy_w2(GaussianRef w, GaussianRef c, const EnergyOptions& options) {
  check_same_dim(w.mean.size(), c.mean.size());
  return expand(energy_terms_w2(w, c, 0.0, options), w, c);
}

EnergyGradient grad_energy_kl(GaussianRef child, GaussianRef parent) {
  check_same_dim(child.mean.size(), parent.mean.size());
  return expand(energy_terms_kl(child, parent, 0.0), child, parent);
}

}  // namespace gauss_embed
