#include "dicoss/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dicoss {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw std::runtime_error("parse-error at " + where + ": " + msg);
}

double to_double(const std::string& v, const std::string& where) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) fail(where, "bad number '" + v + "'");
    return d;
  } catch (const std::logic_error&) {
    fail(where, "bad number '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& v, const std::string& where) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) fail(where, "bad integer '" + v + "'");
  return out;
}

bool to_bool(const std::string& v, const std::string& where) {
  if (v == "1" || v == "on" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "off" || v == "false" || v == "no") return false;
  fail(where, "bad boolean '" + v + "'");
}

std::vector<std::string> split_commas(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

Codec to_codec(const std::string& v, const std::string& where) {
  if (v == "dicoss") return Codec::Dicoss;
  if (v == "baseline") return Codec::Baseline;
  fail(where, "unknown codec '" + v + "' (want dicoss|baseline)");
}

Method to_method(const std::string& v, const std::string& where) {
  if (v == "jsm") return Method::Jsm;
  if (v == "ramis") return Method::Ramis;
  fail(where, "unknown method '" + v + "' (want jsm|ramis)");
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value,
               const std::string& where) {
  if (key == "n") cfg.source.n = to_u64(value, where);
  else if (key == "sources") cfg.source.sources = to_u64(value, where);
  else if (key == "k_common") cfg.source.k_common = to_u64(value, where);
  else if (key == "k_innov") cfg.source.k_innov = to_u64(value, where);
  else if (key == "amp_low") cfg.source.amp_low = to_double(value, where);
  else if (key == "amp_high") cfg.source.amp_high = to_double(value, where);
  else if (key == "trials") cfg.trials = to_u64(value, where);
  else if (key == "threshold") cfg.threshold = to_double(value, where);
  else if (key == "bit_depth") cfg.bit_depth = static_cast<int>(to_u64(value, where));
  else if (key == "m") cfg.m = to_u64(value, where);
  else if (key == "rate_points") {
    cfg.rate_points.clear();
    for (const std::string& s : split_commas(value)) cfg.rate_points.push_back(to_u64(s, where));
  } else if (key == "si_fraction") cfg.si_fraction = to_double(value, where);
  else if (key == "rate_control") cfg.rate_control = to_bool(value, where);
  else if (key == "codecs") {
    cfg.codecs.clear();
    for (const std::string& s : split_commas(value)) cfg.codecs.push_back(to_codec(s, where));
  } else if (key == "methods") {
    cfg.methods.clear();
    for (const std::string& s : split_commas(value)) cfg.methods.push_back(to_method(s, where));
  } else if (key == "codec") cfg.codec = to_codec(value, where);
  else if (key == "method") cfg.method = to_method(value, where);
  else if (key == "master_seed" || key == "seed") cfg.master_seed = to_u64(value, where);
  else if (key == "lambda") cfg.solver.lambda = to_double(value, where);
  else if (key == "lambda_scale") cfg.solver.lambda_scale = to_double(value, where);
  else if (key == "epsilon") cfg.solver.epsilon = to_double(value, where);
  else if (key == "epsilon_scale") cfg.solver.epsilon_scale = to_double(value, where);
  else if (key == "max_iters") cfg.solver.max_iters = to_u64(value, where);
  else if (key == "tol") cfg.solver.tol = to_double(value, where);
  else if (key == "lipschitz_iters") cfg.solver.lipschitz_iters = to_u64(value, where);
  else if (key == "histograms") cfg.histograms = value;
  else throw std::runtime_error("unknown-key at " + where + ": '" + key + "'");
}

void apply_line(RunConfig& cfg, std::string line, const std::string& where) {
  const std::size_t hash = line.find('#');
  if (hash != std::string::npos) line = line.substr(0, hash);
  line = trim(line);
  if (line.empty()) return;
  const std::size_t eq = line.find('=');
  if (eq == std::string::npos) fail(where, "expected key=value");
  const std::string key = trim(line.substr(0, eq));
  const std::string value = trim(line.substr(eq + 1));
  if (key.empty()) fail(where, "empty key");
  apply_key(cfg, key, value, where);
}

void validate(const RunConfig& cfg) {
  auto bad = [](const std::string& msg) {
    throw std::runtime_error("parse-error: invalid config: " + msg);
  };
  if (cfg.source.n == 0) bad("n must be positive");
  if (cfg.source.sources == 0) bad("sources must be positive");
  if (cfg.source.k_common + cfg.source.k_innov > cfg.source.n) bad("k_common + k_innov > n");
  if (cfg.source.amp_low < 0.0 || cfg.source.amp_high < cfg.source.amp_low)
    bad("bad amplitude range");
  if (cfg.trials == 0) bad("trials must be positive");
  if (cfg.threshold <= 0.0) bad("threshold must be positive");
  if (cfg.bit_depth < 1 || cfg.bit_depth > 16) bad("bit_depth out of range [1,16]");
  if (cfg.rate_points.empty()) bad("rate_points must be nonempty");
  if (cfg.si_fraction <= 0.0 || cfg.si_fraction > 1.0) bad("si_fraction out of (0,1]");
  if (cfg.solver.tol <= 0.0 || cfg.solver.tol >= 1.0) bad("tol out of (0,1)");
  if (cfg.solver.max_iters == 0) bad("max_iters must be positive");
  if (cfg.solver.epsilon <= 0.0 && cfg.solver.epsilon_scale <= 0.0)
    bad("need epsilon or epsilon_scale positive");
  if (cfg.solver.lambda_scale <= 0.0 && cfg.solver.lambda <= 0.0)
    bad("need lambda or lambda_scale positive");
  if (cfg.codecs.empty() || cfg.methods.empty()) bad("codecs/methods must be nonempty");
}

}  // namespace

PipelineConfig RunConfig::pipeline() const {
  PipelineConfig pc;
  pc.m = m;
  pc.bit_depth = bit_depth;
  pc.si_fraction = si_fraction;
  pc.rate_control = rate_control;
  pc.method = method;
  pc.solver = solver;
  return pc;
}

ExperimentConfig RunConfig::experiment(Codec c, Method meth) const {
  ExperimentConfig ec;
  ec.source = source;
  ec.method = meth;
  ec.codec = c;
  ec.rate_points = rate_points;
  ec.trials = trials;
  ec.threshold = threshold;
  ec.master_seed = master_seed;
  ec.pipe = pipeline();
  ec.pipe.method = meth;
  return ec;
}

RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    apply_line(cfg, line, "line " + std::to_string(lineno));
  }
  for (std::size_t i = 0; i < overrides.size(); ++i)
    apply_line(cfg, overrides[i], "override " + std::to_string(i + 1));
  validate(cfg);
  return cfg;
}

RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::string text;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("io-error: cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return parse_config_text(text, overrides);
}

std::string codec_name(Codec c) { return c == Codec::Dicoss ? "dicoss" : "baseline"; }
std::string method_name(Method m) { return m == Method::Jsm ? "jsm" : "ramis"; }

}  // namespace dicoss
