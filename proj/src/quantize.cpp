#include "dicoss/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dicoss {

QuantizerSpec spec_for_range(std::span<const double> values, int bit_depth) {
  if (values.empty()) throw std::invalid_argument("spec_for_range: empty vector");
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double span = hi - lo;
  double pad = (span > 0.0) ? 0.01 * span : std::max(1e-9, 0.01 * std::max(std::fabs(lo), 1.0));
  QuantizerSpec spec;
  spec.bit_depth = bit_depth;
  spec.lower = lo - pad;
  spec.upper = hi + pad;
  if (!spec.valid()) throw std::invalid_argument("spec_for_range: bad bit depth");
  return spec;
}

QuantizedMeasurement quantize(std::span<const double> values, const QuantizerSpec& spec) {
  if (!spec.valid()) throw std::invalid_argument("quantize: invalid spec");
  QuantizedMeasurement q;
  q.spec = spec;
  q.indices.resize(values.size());
  const double step = spec.step();
  const std::int32_t top = spec.levels() - 1;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double t = std::floor((values[i] - spec.lower) / step);
    q.indices[i] = static_cast<std::int32_t>(std::clamp(t, 0.0, static_cast<double>(top)));
  }
  return q;
}

std::vector<double> dequantize_midpoint(const QuantizedMeasurement& q) {
  std::vector<double> out(q.indices.size());
  const double step = q.spec.step();
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = q.spec.lower + (static_cast<double>(q.indices[i]) + 0.5) * step;
  return out;
}

BitPlanes to_bitplanes(const QuantizedMeasurement& q) {
  BitPlanes bp;
  bp.bit_depth = q.spec.bit_depth;
  bp.planes.assign(static_cast<std::size_t>(bp.bit_depth),
                   std::vector<std::uint8_t>(q.indices.size(), 0));
  for (int b = 0; b < bp.bit_depth; ++b) {
    const int shift = bp.bit_depth - 1 - b;
    for (std::size_t i = 0; i < q.indices.size(); ++i)
      bp.planes[static_cast<std::size_t>(b)][i] =
          static_cast<std::uint8_t>((q.indices[i] >> shift) & 1);
  }
  return bp;
}

std::vector<std::int32_t> recompose(const BitPlanes& bp) {
  if (bp.planes.empty()) return {};
  std::vector<std::int32_t> out(bp.planes[0].size(), 0);
  for (int b = 0; b < bp.bit_depth; ++b) {
    const int shift = bp.bit_depth - 1 - b;
    const auto& plane = bp.planes[static_cast<std::size_t>(b)];
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] |= static_cast<std::int32_t>(plane[i]) << shift;
  }
  return out;
}

QuantInterval cell_interval(const QuantizerSpec& spec, std::int32_t index) {
  const double step = spec.step();
  return {spec.lower + static_cast<double>(index) * step,
          spec.lower + static_cast<double>(index + 1) * step};
}

double reconstruct_multihypothesis(const QuantInterval& interval,
                                   std::span<const double> si_values,
                                   std::span<const LaplacianModel> models,
                                   const MixtureWeights& weights) {
  const double L = interval.lower, U = interval.upper;
  if (!(U > L)) throw std::invalid_argument("reconstruct_multihypothesis: degenerate interval");
  if (si_values.size() != models.size() || si_values.size() != weights.u.size())
    throw std::invalid_argument("reconstruct_multihypothesis: length mismatch");
  double wsum = 0.0;
  for (double u : weights.u) {
    if (u < 0.0) throw std::invalid_argument("reconstruct_multihypothesis: negative weight");
    wsum += u;
  }
  if (std::fabs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("reconstruct_multihypothesis: weights must sum to 1");

  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < si_values.size(); ++p) {
    num += weights.u[p] * laplace_first_moment(L, U, si_values[p], models[p].alpha);
    den += weights.u[p] * laplace_mass(L, U, si_values[p], models[p].alpha);
  }
  double mid = 0.5 * (L + U);
  if (den < 1e-300) return mid;  // all hypotheses too far out: minimax fallback
  double y = num / den;
  if (y < L) y = L;
  if (y >= U) y = std::nextafter(U, L);
  return y;
}

}  // namespace dicoss
