#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dicoss/entropy.hpp"
#include "dicoss/quantize.hpp"
#include "dicoss/sensing.hpp"
#include "dicoss/slepian_wolf.hpp"
#include "dicoss/solvers.hpp"

namespace dicoss {

enum class Codec { Dicoss, Baseline };
enum class Method { Jsm, Ramis };

enum class SourceMode : std::uint8_t { Baseline = 0, Intra = 1, Prior = 2 };

struct PipelineConfig {
  std::size_t m = 300;  // high-resolution measurements per source
  int bit_depth = 6;
  double si_fraction = 0.25;  // m_si/m when rate control is off (Prior forced)
  std::size_t si_count = 0;   // absolute m_si override (capped at m); 0 = use si_fraction
  bool rate_control = false;
  std::vector<double> rc_fractions = {0.125, 0.25, 0.375, 0.5};
  Method method = Method::Ramis;
  SolverConfig solver;
  int sw_bp_iters = 100;
  int si_passes = 2;  // sequential SI recovery passes (RAMIS stage 1)
};

// One source's share of the wire stream. Syndrome sections hold the full
// accumulated syndrome so a file is decodable standalone; the decoder still
// pulls nested prefixes, and reported bits count only what it consumed (the
// feedback-channel cost).
struct SourceStream {
  SourceMode mode = SourceMode::Baseline;
  std::uint32_t m = 0;
  std::uint32_t m_si = 0;  // 0 unless Prior
  std::uint64_t seed_y = 0;
  std::uint64_t seed_si = 0;
  QuantizerSpec spec_y;
  QuantizerSpec spec_si;            // Prior only
  std::uint32_t symbol_count = 0;   // symbols in the entropy section
  Bitstream entropy_payload;        // prior indices (Prior) or y indices (Intra/Baseline)
  std::vector<SwEncoding> planes;   // Prior only, bit_depth entries, MSB first
};

struct EncodedStream {
  std::uint32_t n = 0;
  std::vector<SourceStream> sources;
};

EncodedStream encode_dicoss(const std::vector<std::vector<double>>& sources,
                            const PipelineConfig& cfg, std::uint64_t stream_seed);
EncodedStream encode_baseline(const std::vector<std::vector<double>>& sources,
                              const PipelineConfig& cfg, std::uint64_t stream_seed);

struct DecodeResult {
  std::vector<std::vector<double>> sources;
  std::vector<std::size_t> bits;  // reported per-source bits (feedback accounting)
  std::vector<SourceMode> modes;
  std::vector<std::vector<std::size_t>> plane_bits;  // per source, per plane (CRC + pulled syndromes)
  std::vector<std::vector<double>> measurements;     // reconstructed y used by the final recovery
};

DecodeResult decode_dicoss(const EncodedStream& stream, const PipelineConfig& cfg);
DecodeResult decode_baseline(const EncodedStream& stream, const PipelineConfig& cfg);

// Wire format (little-endian): "DCSS", version byte, J, n, then per source
// the header fields and length-prefixed sections.
std::vector<std::uint8_t> serialize_stream(const EncodedStream& stream);
std::vector<std::uint8_t> serialize_source(const SourceStream& s);
EncodedStream parse_stream(std::span<const std::uint8_t> bytes);
void write_stream_file(const std::string& path, const EncodedStream& stream);
EncodedStream read_stream_file(const std::string& path);

// Reported-bit bookkeeping (header and entropy-section components).
std::size_t source_header_bits(const SourceStream& s);
std::size_t entropy_section_bits(const SourceStream& s);

// Shared code seed convention: one ladder per block length.
std::uint64_t code_seed_for(std::size_t m);
const SyndromeLadder& ladder_for(std::size_t m);

struct ExperimentConfig {
  SourceConfig source;
  Method method = Method::Ramis;
  Codec codec = Codec::Dicoss;
  std::vector<std::size_t> rate_points = {150, 200, 250, 300, 350, 400};
  std::size_t trials = 100;
  double threshold = 0.04;
  std::uint64_t master_seed = 1;
  PipelineConfig pipe;
};

struct CameraStats {
  double mean_bits = 0.0;
  double pr_success = 0.0;
  double mean_rel_error = 0.0;
};

struct RatePointResult {
  std::size_t m = 0;
  std::vector<CameraStats> cameras;
};

// Seeded Monte-Carlo sweep: per rate point, `trials` independent ensembles
// are encoded, decoded and scored. Trials run in parallel; per-trial seeds
// derive from (master_seed, rate index, trial), so results do not depend on
// the thread count.
std::vector<RatePointResult> run_experiment(const ExperimentConfig& cfg);

void write_experiment_csv(std::ostream& out, std::span<const RatePointResult> rows);

}  // namespace dicoss
