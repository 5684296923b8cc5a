#pragma once

#include <span>
#include <vector>

#include "dicoss/solvers.hpp"

namespace dicoss {

// Ordered side-information set; index 0 is always the zero signal.
struct SiSet {
  std::vector<std::vector<double>> signals;

  static SiSet with_zero(std::size_t n) {
    SiSet s;
    s.signals.emplace_back(n, 0.0);
    return s;
  }
  void add(std::vector<double> s) { signals.push_back(std::move(s)); }
  std::size_t count() const { return signals.size(); }
  std::size_t dim() const { return signals.empty() ? 0 : signals[0].size(); }
};

// Diagonal intra-SI weights (one vector per SI signal, each summing to n)
// and inter-SI weights beta (summing to 1 after the first update).
struct WeightState {
  std::vector<std::vector<double>> w;
  std::vector<double> beta;

  // W_0 = I, beta_0 = 1; all other signals start switched off.
  static WeightState initial(std::size_t n, std::size_t signals);
};

// w_i = n * a_i^-1 / sum_l a_l^-1 with a_i = |x_i - xp_i| + epsilon
// (normalized form of the per-index update; sums to n exactly).
std::vector<double> intra_weights(std::span<const double> x, std::span<const double> xp,
                                  double epsilon);

// beta_p = b_p^-1 / sum_l b_l^-1 with b_p = ||W_p (x - x_p)||_1 + epsilon.
std::vector<double> inter_weights(std::span<const double> x, const SiSet& si,
                                  const WeightState& weights, double epsilon);

// Exact scalar prox of 0.5 (x - v)^2 + sum_p coefs[p] |x - breakpoints[p]|
// via sorted breakpoint scan of the piecewise-linear subgradient.
double prox_weighted_nl1_scalar(double v, std::span<const double> breakpoints,
                                std::span<const double> coefs);

// Per-coordinate prox with coefs gamma * beta_p * w_p[i].
void prox_weighted_nl1(std::span<const double> v, const SiSet& si, const WeightState& weights,
                       double gamma, std::span<double> out);

// Objective 0.5 ||Phi x - y||^2 + lambda * sum_p beta_p ||W_p (x - x_p)||_1.
double weighted_nl1_objective(std::span<const double> x, std::span<const double> y, const Mat& phi,
                              const SiSet& si, const WeightState& weights, double lambda);

// One run of the multi-SI weighted recovery: proximal gradient with the
// momentum sequence t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2 and per-iteration
// intra/inter weight updates. x0 optionally warm starts the iterates.
RecoveryResult ramis_recover_one(std::span<const double> y, const Mat& phi, const SiSet& si,
                                 const SolverConfig& cfg, std::span<const double> x0 = {});

// Sequential recovery: source j is recovered with all previously recovered
// sources (plus the zero signal, plus any caller-provided initial set) as
// side information, then appended to the set.
std::vector<std::vector<double>> ramis_recover_all(const std::vector<std::vector<double>>& ys,
                                                   const std::vector<const Mat*>& mats,
                                                   const SolverConfig& cfg,
                                                   const SiSet* initial = nullptr);

}  // namespace dicoss
