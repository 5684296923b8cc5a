// Command-line front end: synthetic data generation, single-shot
// encode/decode, rate sweeps, and the oracle-backed selftest.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dicoss/config.hpp"
#include "dicoss/rng.hpp"
#include "dicoss/pipeline.hpp"
#include "dicoss/selftest.hpp"

namespace {

using namespace dicoss;

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::string in_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

RunConfig load_config(const CommonArgs& args) {
  RunConfig cfg = parse_config(args.config_path, args.overrides);
  if (args.seed_set) cfg.master_seed = args.seed;
  return cfg;
}

// Writes via a temp file and renames, removing the temp on failure.
void atomic_write(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  try {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("io-error: cannot write " + tmp);
    out << contents;
    out.close();
    if (!out) throw std::runtime_error("io-error: failed writing " + tmp);
    std::filesystem::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

int cmd_generate(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  SourceConfig sc = cfg.source;
  sc.seed = cfg.master_seed;
  const JsmEnsemble ens = generate_ensemble(sc);
  write_histograms(args.out_path, ens.sources);
  std::printf("wrote %zu sources (n=%zu) to %s\n", ens.sources.size(), sc.n,
              args.out_path.c_str());
  return 0;
}

int cmd_encode(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  const std::string in = args.in_path.empty() ? cfg.histograms : args.in_path;
  if (in.empty()) throw std::runtime_error("encode: need --in or histograms= in the config");
  const auto sources = load_histograms(in);
  const PipelineConfig pc = cfg.pipeline();
  const std::uint64_t stream_seed = mix_seed(cfg.master_seed, 0xd1c0);
  const EncodedStream stream = (cfg.codec == Codec::Dicoss)
                                   ? encode_dicoss(sources, pc, stream_seed)
                                   : encode_baseline(sources, pc, stream_seed);
  write_stream_file(args.out_path, stream);
  const auto bytes = serialize_stream(stream);
  std::printf("encoded %zu sources as %s (%zu bytes) to %s\n", sources.size(),
              codec_name(cfg.codec).c_str(), bytes.size(), args.out_path.c_str());
  return 0;
}

int cmd_decode(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  if (args.in_path.empty()) throw std::runtime_error("decode: need --in stream file");
  const EncodedStream stream = read_stream_file(args.in_path);
  const PipelineConfig pc = cfg.pipeline();
  const DecodeResult res = decode_dicoss(stream, pc);
  write_histograms(args.out_path, res.sources);
  for (std::size_t j = 0; j < res.sources.size(); ++j)
    std::printf("source %zu: mode=%d reported_bits=%zu\n", j + 1,
                static_cast<int>(res.modes[j]), res.bits[j]);
  std::printf("recovered %zu sources to %s\n", res.sources.size(), args.out_path.c_str());
  return 0;
}

// First rate point at which every camera reaches Pr(success) = 1; returns
// the mean per-camera bits there, or a negative value if never reached.
std::pair<double, std::size_t> bits_at_full_success(const std::vector<RatePointResult>& rows) {
  for (const RatePointResult& rp : rows) {
    bool all = true;
    double mean = 0.0;
    for (const CameraStats& cs : rp.cameras) {
      all = all && cs.pr_success >= 1.0;
      mean += cs.mean_bits;
    }
    if (all && !rp.cameras.empty()) return {mean / static_cast<double>(rp.cameras.size()), rp.m};
  }
  return {-1.0, 0};
}

int cmd_sweep(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  std::ostringstream csv;
  csv << "codec,method,rate_point,camera,mean_bits,pr_success,mean_rel_error\n";

  struct ComboResult {
    Codec codec;
    Method method;
    std::vector<RatePointResult> rows;
  };
  std::vector<ComboResult> combos;
  for (Codec c : cfg.codecs)
    for (Method meth : cfg.methods) {
      const ExperimentConfig ec = cfg.experiment(c, meth);
      ComboResult combo{c, meth, run_experiment(ec)};
      char buf[192];
      for (const RatePointResult& rp : combo.rows)
        for (std::size_t j = 0; j < rp.cameras.size(); ++j) {
          const CameraStats& cs = rp.cameras[j];
          std::snprintf(buf, sizeof buf, "%s,%s,%zu,%zu,%.3f,%.2f,%.6f\n",
                        codec_name(c).c_str(), method_name(meth).c_str(), rp.m, j + 1,
                        cs.mean_bits, cs.pr_success, cs.mean_rel_error);
          csv << buf;
        }
      combos.push_back(std::move(combo));
      std::printf("finished %s-%s\n", codec_name(c).c_str(), method_name(meth).c_str());
    }

  atomic_write(args.out_path, csv.str());
  std::printf("wrote %s\n\nper-camera bits at Pr(success)=1:\n", args.out_path.c_str());
  for (const ComboResult& combo : combos) {
    const auto [bits, m] = bits_at_full_success(combo.rows);
    if (bits < 0.0)
      std::printf("  %-8s %-5s  not reached on this ladder\n", codec_name(combo.codec).c_str(),
                  method_name(combo.method).c_str());
    else
      std::printf("  %-8s %-5s  %10.1f bits  (m=%zu)\n", codec_name(combo.codec).c_str(),
                  method_name(combo.method).c_str(), bits, m);
  }
  for (Method meth : cfg.methods) {
    double dicoss_bits = -1.0, baseline_bits = -1.0;
    for (const ComboResult& combo : combos) {
      if (combo.method != meth) continue;
      if (combo.codec == Codec::Dicoss) dicoss_bits = bits_at_full_success(combo.rows).first;
      if (combo.codec == Codec::Baseline) baseline_bits = bits_at_full_success(combo.rows).first;
    }
    if (dicoss_bits > 0.0 && baseline_bits > 0.0)
      std::printf("saving (%s): %.1f%% per camera at Pr(success)=1\n",
                  method_name(meth).c_str(),
                  100.0 * (baseline_bits - dicoss_bits) / baseline_bits);
  }
  return 0;
}

int cmd_selftest() {
  const std::vector<CheckResult> results = run_selftest();
  for (const CheckResult& r : results)
    std::printf("[%s] %-36s tolerance: %-28s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.tolerance.c_str(), r.detail.c_str());
  const bool ok = all_passed(results);
  std::printf("%zu checks, %s\n", results.size(), ok ? "all passed" : "FAILURES present");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DICOSS: distributed coding of correlated sparse sources with joint recovery"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* sub, bool needs_out, bool has_in) {
    sub->add_option("--config", args.config_path, "key=value config file");
    sub->add_option("--set", args.overrides, "config override key=value (repeatable)");
    auto* seed = sub->add_option("--seed", args.seed, "master seed override");
    seed->each([&](const std::string&) { args.seed_set = true; });
    auto* out = sub->add_option("--out", args.out_path, "output path");
    if (needs_out) out->required();
    if (has_in) sub->add_option("--in", args.in_path, "input path");
  };

  auto* gen = app.add_subcommand("generate", "emit a synthetic histogram CSV");
  add_common(gen, true, false);
  auto* enc = app.add_subcommand("encode", "encode histograms into a stream file");
  add_common(enc, true, true);
  auto* dec = app.add_subcommand("decode", "decode a stream file into histograms");
  add_common(dec, true, true);
  auto* swp = app.add_subcommand("sweep", "rate-vs-success sweep, CSV output");
  add_common(swp, true, false);
  auto* self = app.add_subcommand("selftest", "run the oracle-backed invariant suite");
  add_common(self, false, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(args);
    if (enc->parsed()) return cmd_encode(args);
    if (dec->parsed()) return cmd_decode(args);
    if (swp->parsed()) return cmd_sweep(args);
    if (self->parsed()) return cmd_selftest();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
