#ifndef GAUSS_EMBED_GEOMETRY_H_
#define GAUSS_EMBED_GEOMETRY_H_

#include <span>
#include <vector>

namespace gauss_embed {

// Spherical Gaussian N(mean, sigma^2 I).
struct GaussianWord {
  std::vector<double> mean;
  double sigma = 1.0;
};

// Non-owning view of a spherical Gaussian, e.g. one row of the embedding table.
struct GaussianRef {
  std::span<const double> mean;
  double sigma;

  GaussianRef(std::span<const double> m, double s) : mean(m), sigma(s) {}
  GaussianRef(const GaussianWord& g) : mean(g.mean), sigma(g.sigma) {}  // NOLINT(implicit)
};

// Gaussian with diagonal covariance diag(variances).
struct DiagonalGaussian {
  std::vector<double> mean;
  std::vector<double> variances;
};

// W2 = sqrt(|mu_a - mu_b|^2 + D (sigma_a - sigma_b)^2).
double w2_spherical(GaussianRef a, GaussianRef b);

// W2 = sqrt(|mu_a - mu_b|^2 + sum_i (sqrt(v_a,i) - sqrt(v_b,i))^2).
double w2_diagonal(const DiagonalGaussian& a, const DiagonalGaussian& b);

// D_KL(a || b) between spherical Gaussians.
double kl_spherical(GaussianRef a, GaussianRef b);

// D_KL(a || b) between diagonal Gaussians.
double kl_diagonal(const DiagonalGaussian& a, const DiagonalGaussian& b);

struct EnergyOptions {
  // Below this, W2 is replaced by the floor in the gradient's 1/W2 factor.
  double grad_floor = 1e-8;
  // Use -W2^2 + b instead of -W2 + b.
  bool squared_w2 = false;
};

// E(w, c) = -W2(w, c) + bias (or -W2^2 + bias with options.squared_w2).
double energy_w2(GaussianRef w, GaussianRef c, double bias, const EnergyOptions& options = {});

// E(child, parent) = -D_KL(child || parent) + bias.
double energy_kl(GaussianRef child, GaussianRef parent, double bias);

// Energy together with its gradient in compact form. The mean gradients of
// both energies are parallel to delta = mu_w - mu_c:
//   dE/dmu_w = mean_coef * delta,  dE/dmu_c = -mean_coef * delta.
struct EnergyTerms {
  double energy = 0.0;
  double mean_coef = 0.0;
  double d_sigma_w = 0.0;
  double d_sigma_c = 0.0;
};

EnergyTerms energy_terms_w2(GaussianRef w, GaussianRef c, double bias,
                            const EnergyOptions& options = {});
EnergyTerms energy_terms_kl(GaussianRef child, GaussianRef parent, double bias);

// Full gradient of an energy with respect to both words and the bias.
struct EnergyGradient {
  std::vector<double> d_mean_w;
  std::vector<double> d_mean_c;
  double d_sigma_w = 0.0;
  double d_sigma_c = 0.0;
  double d_bias = 1.0;
};

EnergyGradient grad_energy_w2(GaussianRef w, GaussianRef c, const EnergyOptions& options = {});
EnergyGradient grad_energy_kl(GaussianRef child, GaussianRef parent);

double squared_distance(std::span<const double> a, std::span<const double> b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace gauss_embed

#endif  // GAUSS_EMBED_GEOMETRY_H_
