#pragma once

#include <span>
#include <vector>

#include "dicoss/laplace.hpp"
#include "dicoss/quantize.hpp"
#include "dicoss/slepian_wolf.hpp"

namespace dicoss {

// Soft input for one bit plane, conditioned on the already-decoded MSB
// prefix. For each position, P(bit=0) is the mixture probability mass of the
// quantization cells consistent with the prefix and bit=0; cells touching
// the quantizer boundary extend to +-infinity to match clamping. LLRs are
// log(P0/P1) clamped to +-kLlrClamp.
//
// prefix[i] holds the integer formed by planes 0..plane-1 (0 when plane==0).
SoftInput bitplane_llrs(int plane, std::span<const std::int32_t> prefix,
                        const QuantizerSpec& spec,
                        const std::vector<std::vector<double>>& si_values,
                        std::span<const LaplacianModel> models, const MixtureWeights& weights);

}  // namespace dicoss
