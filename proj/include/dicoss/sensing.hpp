#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dicoss/kernels.hpp"

namespace dicoss {

// Configuration for a synthetic ensemble of correlated sparse histograms:
// every source is common + innovation, with disjoint supports so the nominal
// per-source sparsity k_common + k_innov is exact.
struct SourceConfig {
  std::size_t n = 1000;
  std::size_t sources = 3;  // J
  std::size_t k_common = 40;
  std::size_t k_innov = 10;
  double amp_low = 0.0;
  double amp_high = 1.0;
  std::uint64_t seed = 0;
};

struct JsmEnsemble {
  std::vector<double> common;
  std::vector<std::vector<double>> innovations;
  std::vector<std::vector<double>> sources;  // sources[j] = common + innovations[j]
};

// Seeded i.i.d. Gaussian sensing matrix with entry variance 1/rows. Encoder
// and decoder share it by (rows, cols, seed) alone; regeneration is
// bit-exact.
struct MeasurementMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::uint64_t seed = 0;
  Mat entries;
};

struct Measurement {
  std::vector<double> values;
  std::uint64_t matrix_seed = 0;
};

JsmEnsemble generate_ensemble(const SourceConfig& cfg);

// One source per CSV row, comma-separated nonnegative numbers, no header.
std::vector<std::vector<double>> load_histograms(const std::string& path);
void write_histograms(const std::string& path, const std::vector<std::vector<double>>& rows);

MeasurementMatrix make_matrix(std::size_t m, std::size_t n, std::uint64_t seed);
Measurement project(const MeasurementMatrix& mat, std::span<const double> x);

}  // namespace dicoss
