#pragma once

#include <span>
#include <vector>

namespace dicoss {

inline constexpr double kAlphaMin = 1e-3;
inline constexpr double kAlphaMax = 1e6;

// Laplacian residual model between a side-information signal and the true
// measurements: density (alpha/2) exp(-alpha |y - mu|), variance 2/alpha^2.
struct LaplacianModel {
  double alpha = 1.0;
  double variance() const { return 2.0 / (alpha * alpha); }
};

struct MixtureWeights {
  std::vector<double> u;  // simplex: u_p >= 0, sum = 1
};

// Maximum-likelihood fit: scale b = mean |r|, alpha = 1/b clamped to
// [kAlphaMin, kAlphaMax]. Throws on empty input.
LaplacianModel fit_laplacian(std::span<const double> residuals);

double laplace_density(double y, double mu, double alpha);
double laplace_cdf(double y, double mu, double alpha);

// Integral of the density over [lo, hi); lo/hi may be +-infinity.
double laplace_mass(double lo, double hi, double mu, double alpha);
// Integral of y * density over the finite interval [lo, hi).
double laplace_first_moment(double lo, double hi, double mu, double alpha);

double mixture_density(double y, std::span<const double> si_values,
                       std::span<const LaplacianModel> models,
                       const MixtureWeights& weights);

// Inverse-variance weighting across side-information hypotheses.
MixtureWeights assign_mixture_weights(std::span<const LaplacianModel> models);

}  // namespace dicoss
