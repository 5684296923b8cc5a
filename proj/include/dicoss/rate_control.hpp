#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dicoss/kernels.hpp"
#include "dicoss/quantize.hpp"

namespace dicoss {

struct SiCandidate {
  std::size_t m_si = 0;
  std::uint64_t seed = 0;
};

struct ModeDecision {
  bool prior = false;          // false = Intra
  std::size_t m_si = 0;        // 0 when Intra
  std::uint64_t seed = 0;
  double estimated_bits = 0.0;
};

struct RateEstimate {
  double h_intra = 0.0;  // bits/symbol of quantized y_j
  double h_cond = 0.0;   // bits/symbol of quantized y_j given the rough SI estimate
  double h_prior = 0.0;  // bits/symbol of quantized y_SI
};

// Least-norm preimage of y_si through phi_si, re-projected by phi_j:
// x = phi_si^T (phi_si phi_si^T + 1e-10 I)^-1 y_si, then phi_j x.
std::vector<double> rough_si_estimate(std::span<const double> y_si, const Mat& phi_si,
                                      const Mat& phi_j);

// Conditional entropy of the quantized target given a continuous predictor,
// from a Laplacian fit of the residual (exact cell-mass entropy, averaged
// over positions). Sample-count-free, unlike the plug-in joint table, which
// is badly biased at encoder block lengths.
double model_conditional_entropy(std::span<const double> y, std::span<const double> predictor,
                                 const QuantizerSpec& spec);

RateEstimate estimate_rates(std::span<const double> x, std::span<const double> y, const Mat& phi_j,
                            const SiCandidate& cand, const QuantizerSpec& spec_y);

// Encoder-side Intra/Prior choice: compares m_j * h_intra against
// min over candidates of m_si * h_prior + m_j * h_cond. Ties go to Intra.
ModeDecision decide_mode(std::span<const double> x, std::span<const double> y, const Mat& phi_j,
                         std::span<const SiCandidate> candidates, const QuantizerSpec& spec_y);

// Greedy scan of an increasing m_si ladder: returns the first local minimum
// of the estimated total bits, with the matrix seed derived as seed_base + m.
std::pair<std::size_t, std::uint64_t> greedy_phi_si(std::span<const double> x,
                                                    std::span<const double> y, const Mat& phi_j,
                                                    std::span<const std::size_t> ladder,
                                                    std::uint64_t seed_base,
                                                    const QuantizerSpec& spec_y);

}  // namespace dicoss
