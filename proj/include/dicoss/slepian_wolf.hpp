#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace dicoss {

inline constexpr double kLlrClamp = 30.0;

// Per-position log(P(bit=0) / P(bit=1)), clamped to +-kLlrClamp.
struct SoftInput {
  std::vector<double> llrs;
};

// Rate-adaptive syndrome code: a seeded parity graph with every variable
// node of degree exactly 3 over m check rows, followed by an accumulator.
// Nested prefixes of the accumulated syndrome are exposed at syndrome counts
// {1/16, ..., 16/16} * m. The construction rejects seeds whose parity matrix
// is singular over GF(2), so the final step is exactly invertible and
// decoding always terminates losslessly.
struct SyndromeLadder {
  std::size_t block_length = 0;
  std::uint64_t code_seed = 0;
  std::vector<std::size_t> rate_steps;                  // strictly increasing, last = m
  std::vector<std::array<std::uint32_t, 3>> var_rows;   // check rows of each variable node
  std::vector<std::uint32_t> tx_order;                  // transmission order of accumulated bits
};

SyndromeLadder build_ladder(std::size_t m, std::uint64_t code_seed);

// Deterministic transmission order of the accumulated syndrome: the last
// accumulated bit first (every prefix then closes the final segment), then
// bit-reversed counting for near-uniform nested subsampling.
std::vector<std::uint32_t> syndrome_tx_order(std::size_t m);

struct SwEncoding {
  std::vector<std::uint8_t> accumulated;  // full accumulated syndrome, one bit per entry
  std::uint32_t checksum = 0;             // CRC-32 of the packed source plane
};

SwEncoding sw_encode(std::span<const std::uint8_t> plane, const SyndromeLadder& ladder);

struct DecodeOutcome {
  std::vector<std::uint8_t> bits;
  double rate_used = 0.0;         // (syndrome bits pulled + 32 CRC bits) / m
  bool success = false;
  std::size_t syndrome_bits = 0;  // syndrome bits pulled through the feedback channel
  int rate_step = -1;             // index into rate_steps at which decoding stopped
};

// Walks the rate ladder, running belief propagation (<= max_bp_iters) on the
// de-accumulated syndrome constraints at each step and stopping at the first
// step whose hard decision passes the checksum. The last step reads the
// plane exactly by solving the full-rank parity system.
DecodeOutcome sw_decode(const SwEncoding& enc, const SoftInput& soft,
                        const SyndromeLadder& ladder, int max_bp_iters = 100);

// Tries every candidate at each rate step (candidate-major inner loop) and
// returns the first success, i.e. the outcome of minimal rate.
DecodeOutcome best_soft_input(std::span<const SoftInput> candidates, const SwEncoding& enc,
                              const SyndromeLadder& ladder, int max_bp_iters = 100);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

// MSB-first bit packing, zero-padded to a whole byte.
std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes, std::size_t nbits);

}  // namespace dicoss
