#include "dicoss/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include "dicoss/correlation.hpp"
#include "dicoss/laplace.hpp"
#include "dicoss/ramis.hpp"
#include "dicoss/rate_control.hpp"
#include "dicoss/rng.hpp"

namespace dicoss {

namespace {

constexpr std::uint8_t kVersion = 1;

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

struct Reader {
  std::span<const std::uint8_t> data;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > data.size()) throw std::runtime_error("malformed-stream: truncated");
  }
  std::uint8_t u8() {
    need(1);
    return data[pos++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data[pos++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data[pos++]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::vector<std::uint8_t> bytes(std::size_t n) {
    need(n);
    std::vector<std::uint8_t> out(data.begin() + static_cast<std::ptrdiff_t>(pos),
                                  data.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
    return out;
  }
};

void append_quantizer(std::vector<std::uint8_t>& out, const QuantizerSpec& q) {
  put_u8(out, static_cast<std::uint8_t>(q.bit_depth));
  put_f64(out, q.lower);
  put_f64(out, q.upper);
}

QuantizerSpec read_quantizer(Reader& r) {
  QuantizerSpec q;
  q.bit_depth = r.u8();
  q.lower = r.f64();
  q.upper = r.f64();
  if (!q.valid()) throw std::runtime_error("malformed-stream: bad quantizer header");
  return q;
}

std::size_t si_count_for(double fraction, std::size_t m, std::size_t n) {
  auto m_si = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(m)));
  return std::clamp<std::size_t>(m_si, 8, n);
}

SourceStream encode_one(std::span<const double> x, std::size_t j, const PipelineConfig& cfg,
                        std::uint64_t stream_seed, bool baseline) {
  SourceStream s;
  s.m = static_cast<std::uint32_t>(cfg.m);
  s.seed_y = mix_seed(stream_seed, j, 1);
  const MeasurementMatrix phi = make_matrix(cfg.m, x.size(), s.seed_y);
  std::vector<double> y(cfg.m);
  matvec(phi.entries, x, y);
  s.spec_y = spec_for_range(y, cfg.bit_depth);
  const QuantizedMeasurement qy = quantize(y, s.spec_y);
  const SymbolAlphabet alphabet{static_cast<std::uint32_t>(s.spec_y.levels())};

  bool prior = false;
  std::size_t m_si = 0;
  std::uint64_t seed_si = 0;
  if (!baseline) {
    const std::uint64_t seed_base = mix_seed(stream_seed, j, 2);
    if (cfg.rate_control) {
      std::vector<SiCandidate> cands;
      for (double f : cfg.rc_fractions) {
        const std::size_t ms = si_count_for(f, cfg.m, x.size());
        if (!cands.empty() && cands.back().m_si == ms) continue;
        cands.push_back({ms, seed_base + ms});
      }
      const ModeDecision d = decide_mode(x, y, phi.entries, cands, s.spec_y);
      prior = d.prior;
      m_si = d.m_si;
      seed_si = d.seed;
    } else {
      prior = true;
      m_si = cfg.si_count > 0 ? std::min({cfg.si_count, cfg.m, x.size()})
                              : si_count_for(cfg.si_fraction, cfg.m, x.size());
      seed_si = seed_base + m_si;
    }
  }

  if (prior) {
    s.mode = SourceMode::Prior;
    s.m_si = static_cast<std::uint32_t>(m_si);
    s.seed_si = seed_si;
    const MeasurementMatrix phi_si = make_matrix(m_si, x.size(), seed_si);
    std::vector<double> y_si(m_si);
    matvec(phi_si.entries, x, y_si);
    s.spec_si = spec_for_range(y_si, cfg.bit_depth);
    s.symbol_count = static_cast<std::uint32_t>(m_si);
    s.entropy_payload = entropy_encode(quantize(y_si, s.spec_si).indices, alphabet);
    const SyndromeLadder& ladder = ladder_for(cfg.m);
    const BitPlanes bp = to_bitplanes(qy);
    s.planes.reserve(static_cast<std::size_t>(cfg.bit_depth));
    for (int b = 0; b < cfg.bit_depth; ++b)
      s.planes.push_back(sw_encode(bp.planes[static_cast<std::size_t>(b)], ladder));
  } else {
    s.mode = baseline ? SourceMode::Baseline : SourceMode::Intra;
    s.symbol_count = static_cast<std::uint32_t>(cfg.m);
    s.entropy_payload = entropy_encode(qy.indices, alphabet);
  }
  return s;
}

EncodedStream encode_common(const std::vector<std::vector<double>>& sources,
                            const PipelineConfig& cfg, std::uint64_t stream_seed, bool baseline) {
  if (sources.empty() || sources.size() > 255)
    throw std::invalid_argument("encode: need between 1 and 255 sources");
  const std::size_t n = sources[0].size();
  for (const auto& x : sources)
    if (x.size() != n) throw std::invalid_argument("encode: inconsistent source dimensions");
  if (cfg.m == 0 || cfg.m > n) throw std::invalid_argument("encode: need 1 <= m <= n");

  EncodedStream stream;
  stream.n = static_cast<std::uint32_t>(n);
  stream.sources.reserve(sources.size());
  // each per-source encoder sees only its own signal
  for (std::size_t j = 0; j < sources.size(); ++j)
    stream.sources.push_back(encode_one(sources[j], j, cfg, stream_seed, baseline));
  return stream;
}

double mean_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::fabs(x);
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double relative_error(std::span<const double> est, std::span<const double> truth) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = est[i] - truth[i];
    num += d * d;
    den += truth[i] * truth[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
}

}  // namespace

std::uint64_t code_seed_for(std::size_t m) { return mix_seed(0x51adc0deULL, m); }

const SyndromeLadder& ladder_for(std::size_t m) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<SyndromeLadder>> cache;
  std::scoped_lock lock(mu);
  auto& slot = cache[m];
  if (!slot) slot = std::make_unique<SyndromeLadder>(build_ladder(m, code_seed_for(m)));
  return *slot;
}

EncodedStream encode_dicoss(const std::vector<std::vector<double>>& sources,
                            const PipelineConfig& cfg, std::uint64_t stream_seed) {
  return encode_common(sources, cfg, stream_seed, false);
}

EncodedStream encode_baseline(const std::vector<std::vector<double>>& sources,
                              const PipelineConfig& cfg, std::uint64_t stream_seed) {
  return encode_common(sources, cfg, stream_seed, true);
}

std::size_t source_header_bits(const SourceStream& s) {
  std::size_t bytes = 1 + 4 + 4 + 8 + 17;  // mode, m, m_si, seed_y, spec_y
  if (s.mode == SourceMode::Prior) bytes += 8 + 17;  // seed_si, spec_si
  return 8 * bytes;
}

std::size_t entropy_section_bits(const SourceStream& s) {
  return 8 * (4 + 4 + s.entropy_payload.bytes.size());  // length, symbol count, payload
}

std::vector<std::uint8_t> serialize_source(const SourceStream& s) {
  std::vector<std::uint8_t> out;
  put_u8(out, static_cast<std::uint8_t>(s.mode));
  put_u32(out, s.m);
  put_u32(out, s.m_si);
  put_u64(out, s.seed_y);
  append_quantizer(out, s.spec_y);
  if (s.mode == SourceMode::Prior) {
    put_u64(out, s.seed_si);
    append_quantizer(out, s.spec_si);
  }
  put_u32(out, static_cast<std::uint32_t>(4 + s.entropy_payload.bytes.size()));
  put_u32(out, s.symbol_count);
  out.insert(out.end(), s.entropy_payload.bytes.begin(), s.entropy_payload.bytes.end());
  if (s.mode == SourceMode::Prior) {
    const std::vector<std::uint32_t> order = syndrome_tx_order(s.m);
    for (const SwEncoding& plane : s.planes) {
      std::vector<std::uint8_t> bits(s.m);
      for (std::size_t i = 0; i < order.size(); ++i) bits[i] = plane.accumulated[order[i]];
      const std::vector<std::uint8_t> packed = pack_bits(bits);
      put_u32(out, static_cast<std::uint32_t>(4 + packed.size()));
      put_u32(out, plane.checksum);
      out.insert(out.end(), packed.begin(), packed.end());
    }
  }
  return out;
}

std::vector<std::uint8_t> serialize_stream(const EncodedStream& stream) {
  std::vector<std::uint8_t> out = {'D', 'C', 'S', 'S'};
  put_u8(out, kVersion);
  put_u8(out, static_cast<std::uint8_t>(stream.sources.size()));
  put_u32(out, stream.n);
  for (const SourceStream& s : stream.sources) {
    const std::vector<std::uint8_t> block = serialize_source(s);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

EncodedStream parse_stream(std::span<const std::uint8_t> bytes) {
  Reader r{bytes};
  const auto magic = r.bytes(4);
  if (std::memcmp(magic.data(), "DCSS", 4) != 0)
    throw std::runtime_error("malformed-stream: bad magic");
  if (r.u8() != kVersion) throw std::runtime_error("malformed-stream: unsupported version");
  const std::size_t J = r.u8();
  if (J == 0) throw std::runtime_error("malformed-stream: no sources");

  EncodedStream stream;
  stream.n = r.u32();
  stream.sources.resize(J);
  for (SourceStream& s : stream.sources) {
    const std::uint8_t mode = r.u8();
    if (mode > 2) throw std::runtime_error("malformed-stream: bad mode byte");
    s.mode = static_cast<SourceMode>(mode);
    s.m = r.u32();
    s.m_si = r.u32();
    s.seed_y = r.u64();
    s.spec_y = read_quantizer(r);
    if (s.mode == SourceMode::Prior) {
      s.seed_si = r.u64();
      s.spec_si = read_quantizer(r);
    }
    const std::uint32_t len = r.u32();
    if (len < 4) throw std::runtime_error("malformed-stream: bad section length");
    s.symbol_count = r.u32();
    s.entropy_payload.bytes = r.bytes(len - 4);
    s.entropy_payload.bit_length = 8 * s.entropy_payload.bytes.size();
    if (s.mode == SourceMode::Prior) {
      const std::vector<std::uint32_t> order = syndrome_tx_order(s.m);
      s.planes.resize(static_cast<std::size_t>(s.spec_y.bit_depth));
      for (SwEncoding& plane : s.planes) {
        const std::uint32_t plen = r.u32();
        if (plen != 4 + (s.m + 7) / 8)
          throw std::runtime_error("malformed-stream: bad syndrome section length");
        plane.checksum = r.u32();
        const auto packed = r.bytes(plen - 4);
        const auto bits = unpack_bits(packed, s.m);
        plane.accumulated.assign(s.m, 0);
        for (std::size_t i = 0; i < order.size(); ++i) plane.accumulated[order[i]] = bits[i];
      }
    }
  }
  return stream;
}

void write_stream_file(const std::string& path, const EncodedStream& stream) {
  const std::vector<std::uint8_t> bytes = serialize_stream(stream);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("io-error: cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("io-error: failed writing " + path);
}

EncodedStream read_stream_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("io-error: cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_stream(bytes);
}

DecodeResult decode_dicoss(const EncodedStream& stream, const PipelineConfig& cfg) {
  const std::size_t J = stream.sources.size();
  const std::size_t n = stream.n;
  if (J == 0 || n == 0) throw std::invalid_argument("decode: empty stream");

  DecodeResult out;
  out.sources.resize(J);
  out.bits.assign(J, 0);
  out.modes.resize(J);
  out.plane_bits.assign(J, {});

  std::vector<MeasurementMatrix> phi(J);
  std::vector<MeasurementMatrix> phi_si(J);
  std::vector<std::vector<double>> ybar(J);
  std::vector<std::vector<double>> yhat_si(J);
  std::vector<std::size_t> prior_ids;

  for (std::size_t j = 0; j < J; ++j) {
    const SourceStream& s = stream.sources[j];
    out.modes[j] = s.mode;
    phi[j] = make_matrix(s.m, n, s.seed_y);
    if (s.mode == SourceMode::Prior) {
      const SymbolAlphabet a_si{static_cast<std::uint32_t>(s.spec_si.levels())};
      QuantizedMeasurement q;
      q.indices = entropy_decode(s.entropy_payload, s.symbol_count, a_si);
      q.spec = s.spec_si;
      yhat_si[j] = dequantize_midpoint(q);
      phi_si[j] = make_matrix(s.m_si, n, s.seed_si);
      prior_ids.push_back(j);
    } else {
      const SymbolAlphabet a_y{static_cast<std::uint32_t>(s.spec_y.levels())};
      QuantizedMeasurement q;
      q.indices = entropy_decode(s.entropy_payload, s.symbol_count, a_y);
      q.spec = s.spec_y;
      ybar[j] = dequantize_midpoint(q);
    }
    out.bits[j] = source_header_bits(s) + entropy_section_bits(s);
  }

  // Stage 1: joint side-information recovery from the decoded priors.
  const std::size_t P = prior_ids.size();
  std::vector<std::vector<double>> x_si(P);
  std::vector<double> jsm_si_stacked;
  if (P > 0) {
    std::vector<const Mat*> mats;
    std::vector<std::vector<double>> ys;
    for (std::size_t p : prior_ids) {
      mats.push_back(&phi_si[p].entries);
      ys.push_back(yhat_si[p]);
    }
    if (cfg.method == Method::Jsm) {
      const StackedSystem sys = build_stacked(mats, ys);
      JsmResult jr = solve_jsm(sys, cfg.solver);
      for (std::size_t p = 0; p < P; ++p) x_si[p] = std::move(jr.per_source[p].solution);
      jsm_si_stacked = std::move(jr.stacked);
    } else {
      // sequential pass, then refinement passes so the first sources also
      // see cross-source side information (Gauss-Seidel over the set)
      x_si = ramis_recover_all(ys, mats, cfg.solver);
      for (int pass = 1; pass < cfg.si_passes && P > 1; ++pass) {
        for (std::size_t p = 0; p < P; ++p) {
          SiSet si = SiSet::with_zero(n);
          for (std::size_t q = 0; q < P; ++q)
            if (q != p) si.add(x_si[q]);
          x_si[p] = ramis_recover_one(ys[p], *mats[p], si, cfg.solver, x_si[p]).solution;
        }
      }
    }
  }

  // Stage 2: per prior source, Slepian-Wolf decode the bit planes with
  // mixture soft inputs, then multi-hypothesis dequantization.
  for (std::size_t jp = 0; jp < P; ++jp) {
    const std::size_t j = prior_ids[jp];
    const SourceStream& s = stream.sources[j];
    const std::size_t m = s.m;
    const int depth = s.spec_y.bit_depth;

    std::vector<std::vector<double>> si_y(P, std::vector<double>(m));
    std::vector<LaplacianModel> models(P);
    for (std::size_t p = 0; p < P; ++p) {
      matvec(phi[j].entries, x_si[p], si_y[p]);
      // hypothesis quality measured in j's prior domain (where decoded
      // ground truth exists), rescaled to the measurement domain
      std::vector<double> pred(s.m_si);
      matvec(phi_si[j].entries, x_si[p], pred);
      for (std::size_t i = 0; i < pred.size(); ++i) pred[i] -= yhat_si[j][i];
      double b = mean_abs(pred) *
                 std::sqrt(static_cast<double>(s.m_si) / static_cast<double>(m));
      const double alpha = (b > 0.0) ? 1.0 / b : kAlphaMax;
      models[p] = {std::clamp(alpha, kAlphaMin, kAlphaMax)};
    }
    const MixtureWeights u = assign_mixture_weights(models);
    std::size_t best_p = 0;
    for (std::size_t p = 1; p < P; ++p)
      if (models[p].alpha > models[best_p].alpha) best_p = p;

    const SyndromeLadder& ladder = ladder_for(m);
    std::vector<std::int32_t> prefix(m, 0);
    for (int b = 0; b < depth; ++b) {
      std::vector<SoftInput> cands;
      cands.push_back(bitplane_llrs(b, prefix, s.spec_y, si_y, models, u));
      if (P > 1) {
        MixtureWeights single;
        single.u.assign(P, 0.0);
        single.u[best_p] = 1.0;
        cands.push_back(bitplane_llrs(b, prefix, s.spec_y, si_y, models, single));
      }
      const DecodeOutcome oc =
          best_soft_input(cands, s.planes[static_cast<std::size_t>(b)], ladder, cfg.sw_bp_iters);
      out.plane_bits[j].push_back(32 + oc.syndrome_bits);
      out.bits[j] += 32 + oc.syndrome_bits;
      for (std::size_t i = 0; i < m; ++i)
        prefix[i] = static_cast<std::int32_t>((prefix[i] << 1) | oc.bits[i]);
    }

    ybar[j].resize(m);
    std::vector<double> vals(P);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t p = 0; p < P; ++p) vals[p] = si_y[p][i];
      ybar[j][i] = reconstruct_multihypothesis(cell_interval(s.spec_y, prefix[i]), vals, models, u);
    }
  }

  // Stage 3: final joint recovery from the reconstructed measurements.
  std::vector<const Mat*> mats_all;
  std::vector<std::vector<double>> ys_all;
  for (std::size_t j = 0; j < J; ++j) {
    mats_all.push_back(&phi[j].entries);
    ys_all.push_back(ybar[j]);
  }
  out.measurements = ys_all;
  if (cfg.method == Method::Jsm) {
    const StackedSystem sys = build_stacked(mats_all, ys_all);
    std::span<const double> warm;
    if (P == J && jsm_si_stacked.size() == sys.unknowns()) warm = jsm_si_stacked;
    JsmResult jr = solve_jsm(sys, cfg.solver, warm);
    for (std::size_t j = 0; j < J; ++j) out.sources[j] = std::move(jr.per_source[j].solution);
  } else {
    SiSet si = SiSet::with_zero(n);
    for (std::size_t p = 0; p < P; ++p) si.add(x_si[p]);
    for (std::size_t j = 0; j < J; ++j) {
      std::span<const double> x0;
      for (std::size_t p = 0; p < P; ++p)
        if (prior_ids[p] == j) x0 = x_si[p];
      RecoveryResult r = ramis_recover_one(ys_all[j], *mats_all[j], si, cfg.solver, x0);
      out.sources[j] = std::move(r.solution);
      si.add(out.sources[j]);
    }
  }
  return out;
}

DecodeResult decode_baseline(const EncodedStream& stream, const PipelineConfig& cfg) {
  return decode_dicoss(stream, cfg);
}

std::vector<RatePointResult> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials == 0) throw std::invalid_argument("run_experiment: trials must be positive");
  if (cfg.threshold <= 0.0) throw std::invalid_argument("run_experiment: threshold must be positive");
  if (cfg.rate_points.empty()) throw std::invalid_argument("run_experiment: no rate points");

  const std::size_t J = cfg.source.sources;
  std::vector<RatePointResult> out;
  out.reserve(cfg.rate_points.size());

  for (std::size_t ri = 0; ri < cfg.rate_points.size(); ++ri) {
    const std::size_t m = cfg.rate_points[ri];
    std::vector<double> bits(cfg.trials * J, 0.0);
    std::vector<double> rel(cfg.trials * J, 0.0);

    const std::int64_t trials = static_cast<std::int64_t>(cfg.trials);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t t = 0; t < trials; ++t) {
      SourceConfig sc = cfg.source;
      sc.seed = mix_seed(cfg.master_seed, ri + 1, static_cast<std::uint64_t>(t));
      const JsmEnsemble ens = generate_ensemble(sc);
      PipelineConfig pc = cfg.pipe;
      pc.m = m;
      pc.method = cfg.method;
      const std::uint64_t stream_seed = mix_seed(sc.seed, 0xd1c0);
      const EncodedStream es = (cfg.codec == Codec::Dicoss)
                                   ? encode_dicoss(ens.sources, pc, stream_seed)
                                   : encode_baseline(ens.sources, pc, stream_seed);
      const DecodeResult dr = decode_dicoss(es, pc);
      for (std::size_t j = 0; j < J; ++j) {
        bits[static_cast<std::size_t>(t) * J + j] = static_cast<double>(dr.bits[j]);
        rel[static_cast<std::size_t>(t) * J + j] = relative_error(dr.sources[j], ens.sources[j]);
      }
    }

    RatePointResult rp;
    rp.m = m;
    rp.cameras.resize(J);
    for (std::size_t j = 0; j < J; ++j) {
      CameraStats& cs = rp.cameras[j];
      std::size_t successes = 0;
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        cs.mean_bits += bits[t * J + j];
        cs.mean_rel_error += rel[t * J + j];
        if (rel[t * J + j] <= cfg.threshold) ++successes;
      }
      cs.mean_bits /= static_cast<double>(cfg.trials);
      cs.mean_rel_error /= static_cast<double>(cfg.trials);
      cs.pr_success = static_cast<double>(successes) / static_cast<double>(cfg.trials);
    }
    out.push_back(std::move(rp));
  }
  return out;
}

void write_experiment_csv(std::ostream& out, std::span<const RatePointResult> rows) {
  out << "rate_point,camera,mean_bits,pr_success,mean_rel_error\n";
  char buf[160];
  for (const RatePointResult& rp : rows) {
    for (std::size_t j = 0; j < rp.cameras.size(); ++j) {
      const CameraStats& cs = rp.cameras[j];
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.3f,%.2f,%.6f\n", rp.m, j + 1, cs.mean_bits,
                    cs.pr_success, cs.mean_rel_error);
      out << buf;
    }
  }
}

}  // namespace dicoss
