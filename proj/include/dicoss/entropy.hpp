#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dicoss {

struct Bitstream {
  std::vector<std::uint8_t> bytes;  // byte-aligned coded payload
  std::size_t bit_length = 0;       // <= 8 * bytes.size()
};

struct SymbolAlphabet {
  std::uint32_t size = 2;  // K; indices use K = 2^bit_depth
};

// Adaptive arithmetic coding with per-symbol counts initialized to one.
// The model is rebuilt identically by the decoder, so only the payload and
// the symbol count travel. 32-bit range coder registers, carry-propagating.
Bitstream entropy_encode(std::span<const std::int32_t> symbols, const SymbolAlphabet& alphabet);
std::vector<std::int32_t> entropy_decode(const Bitstream& bs, std::size_t count,
                                         const SymbolAlphabet& alphabet);

// Order-0 plug-in entropy, bits/symbol.
double empirical_entropy(std::span<const std::int32_t> symbols, const SymbolAlphabet& alphabet);
// Plug-in H(S|T) = H(S,T) - H(T) over the joint empirical table.
double conditional_entropy(std::span<const std::int32_t> symbols,
                           std::span<const std::int32_t> side, const SymbolAlphabet& alphabet);

}  // namespace dicoss
