#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dicoss/laplace.hpp"

namespace dicoss {

// Uniform scalar quantizer over [lower, upper) with 2^bit_depth cells.
struct QuantizerSpec {
  int bit_depth = 6;
  double lower = 0.0;
  double upper = 1.0;

  int levels() const { return 1 << bit_depth; }
  double step() const { return (upper - lower) / static_cast<double>(levels()); }
  bool valid() const { return bit_depth >= 1 && bit_depth <= 24 && upper > lower; }
};

struct QuantizedMeasurement {
  std::vector<std::int32_t> indices;  // each in [0, 2^bit_depth)
  QuantizerSpec spec;
};

// MSB-first binary planes of the quantization indices.
struct BitPlanes {
  int bit_depth = 0;
  std::vector<std::vector<std::uint8_t>> planes;  // planes[b][i], b=0 is MSB
};

struct QuantInterval {
  double lower = 0.0;
  double upper = 0.0;
};

// Encoder-side range choice: min/max of the vector expanded by 1% of the
// span on each side (the decoder may still see out-of-range SI values, which
// quantize() clamps).
QuantizerSpec spec_for_range(std::span<const double> values, int bit_depth);

QuantizedMeasurement quantize(std::span<const double> values, const QuantizerSpec& spec);
std::vector<double> dequantize_midpoint(const QuantizedMeasurement& q);

BitPlanes to_bitplanes(const QuantizedMeasurement& q);
std::vector<std::int32_t> recompose(const BitPlanes& planes);

QuantInterval cell_interval(const QuantizerSpec& spec, std::int32_t index);

// Mixture-weighted conditional mean of y over the decoded interval [L, U),
// with one truncated Laplacian per side-information hypothesis. Both
// integrals are closed-form; an underflowing denominator falls back to the
// interval midpoint.
double reconstruct_multihypothesis(const QuantInterval& interval,
                                   std::span<const double> si_values,
                                   std::span<const LaplacianModel> models,
                                   const MixtureWeights& weights);

}  // namespace dicoss
