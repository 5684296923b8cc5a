#pragma once

#include <string>
#include <vector>

#include "dicoss/pipeline.hpp"

namespace dicoss {

// Plain key=value run configuration ('#' comments, blank lines ignored).
// Defaults follow the reference experiment: n=1000, J=3, B=6, threshold=0.04,
// trials=100. Overrides ("key=value" strings) win over file contents.
struct RunConfig {
  SourceConfig source;
  std::size_t trials = 100;
  double threshold = 0.04;
  int bit_depth = 6;
  std::size_t m = 300;  // single-shot encode/decode measurement count
  std::vector<std::size_t> rate_points = {150, 200, 250, 300, 350, 400};
  double si_fraction = 0.25;
  bool rate_control = false;
  std::vector<Codec> codecs = {Codec::Dicoss, Codec::Baseline};
  std::vector<Method> methods = {Method::Ramis, Method::Jsm};
  Codec codec = Codec::Dicoss;    // encode subcommand
  Method method = Method::Ramis;  // encode/decode subcommands
  std::uint64_t master_seed = 1;
  SolverConfig solver;
  std::string histograms;  // optional CSV input for encode

  PipelineConfig pipeline() const;
  ExperimentConfig experiment(Codec c, Method meth) const;
};

RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides);
// Empty path: defaults plus overrides only.
RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides);

std::string codec_name(Codec c);
std::string method_name(Method m);

}  // namespace dicoss
