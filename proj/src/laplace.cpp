#include "dicoss/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dicoss {

LaplacianModel fit_laplacian(std::span<const double> residuals) {
  if (residuals.empty()) throw std::invalid_argument("fit_laplacian: empty input");
  double s = 0.0;
  for (double r : residuals) s += std::fabs(r);
  double b = s / static_cast<double>(residuals.size());
  double alpha = (b > 0.0) ? 1.0 / b : kAlphaMax;
  return {std::clamp(alpha, kAlphaMin, kAlphaMax)};
}

double laplace_density(double y, double mu, double alpha) {
  return 0.5 * alpha * std::exp(-alpha * std::fabs(y - mu));
}

double laplace_cdf(double y, double mu, double alpha) {
  if (y <= mu) return 0.5 * std::exp(alpha * (y - mu));
  return 1.0 - 0.5 * std::exp(-alpha * (y - mu));
}

double laplace_mass(double lo, double hi, double mu, double alpha) {
  if (!(hi > lo)) return 0.0;
  const bool lo_inf = std::isinf(lo);
  const bool hi_inf = std::isinf(hi);
  if (lo_inf && hi_inf) return 1.0;
  if (hi_inf) return 1.0 - laplace_cdf(lo, mu, alpha);
  if (lo_inf) return laplace_cdf(hi, mu, alpha);
  // expm1 keeps precision when the interval is narrow relative to 1/alpha
  if (hi <= mu) return -0.5 * std::exp(alpha * (hi - mu)) * std::expm1(-alpha * (hi - lo));
  if (lo >= mu) return -0.5 * std::exp(-alpha * (lo - mu)) * std::expm1(-alpha * (hi - lo));
  return -0.5 * std::expm1(-alpha * (mu - lo)) - 0.5 * std::expm1(-alpha * (hi - mu)) ;
}

namespace {
// Antiderivatives of y * density on each side of the center.
inline double moment_lo(double y, double mu, double alpha) {  // valid for y <= mu
  return 0.5 * std::exp(alpha * (y - mu)) * (y - 1.0 / alpha);
}
inline double moment_hi(double y, double mu, double alpha) {  // valid for y >= mu
  return -0.5 * std::exp(-alpha * (y - mu)) * (y + 1.0 / alpha);
}
}  // namespace

double laplace_first_moment(double lo, double hi, double mu, double alpha) {
  if (!(hi > lo)) return 0.0;
  if (hi <= mu) return moment_lo(hi, mu, alpha) - moment_lo(lo, mu, alpha);
  if (lo >= mu) return moment_hi(hi, mu, alpha) - moment_hi(lo, mu, alpha);
  // split at the center; the two antiderivative constants collapse to +mu
  return moment_hi(hi, mu, alpha) - moment_lo(lo, mu, alpha) + mu;
}

double mixture_density(double y, std::span<const double> si_values,
                       std::span<const LaplacianModel> models,
                       const MixtureWeights& weights) {
  if (si_values.size() != models.size() || si_values.size() != weights.u.size())
    throw std::invalid_argument("mixture_density: length mismatch");
  double s = 0.0;
  for (std::size_t p = 0; p < si_values.size(); ++p)
    s += weights.u[p] * laplace_density(y, si_values[p], models[p].alpha);
  return s;
}

MixtureWeights assign_mixture_weights(std::span<const LaplacianModel> models) {
  if (models.empty()) throw std::invalid_argument("assign_mixture_weights: empty input");
  MixtureWeights w;
  w.u.resize(models.size());
  double total = 0.0;
  for (std::size_t p = 0; p < models.size(); ++p) {
    w.u[p] = 1.0 / models[p].variance();
    total += w.u[p];
  }
  for (double& v : w.u) v /= total;
  return w;
}

}  // namespace dicoss
