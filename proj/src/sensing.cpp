#include "dicoss/sensing.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dicoss/rng.hpp"

namespace dicoss {

namespace {

// Draws `k` distinct indices from `pool` (partial Fisher-Yates) and removes
// them from it.
std::vector<std::size_t> draw_support(std::vector<std::size_t>& pool, std::size_t k, Rng& rng) {
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = rng.index(pool.size());
    out.push_back(pool[j]);
    pool[j] = pool.back();
    pool.pop_back();
  }
  return out;
}

}  // namespace

JsmEnsemble generate_ensemble(const SourceConfig& cfg) {
  if (cfg.n == 0 || cfg.sources == 0)
    throw std::invalid_argument("generate_ensemble: n and J must be positive");
  if (cfg.k_common + cfg.k_innov > cfg.n)
    throw std::invalid_argument("generate_ensemble: k_common + k_innov exceeds n");
  if (cfg.amp_low < 0.0 || cfg.amp_high < cfg.amp_low)
    throw std::invalid_argument("generate_ensemble: bad amplitude range");

  Rng rng(mix_seed(cfg.seed, 0x5e45)); // sensing stream

  JsmEnsemble ens;
  ens.common.assign(cfg.n, 0.0);

  std::vector<std::size_t> pool(cfg.n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i : draw_support(pool, cfg.k_common, rng))
    ens.common[i] = rng.uniform(cfg.amp_low, cfg.amp_high);

  ens.innovations.resize(cfg.sources);
  ens.sources.resize(cfg.sources);
  for (std::size_t j = 0; j < cfg.sources; ++j) {
    auto& z = ens.innovations[j];
    z.assign(cfg.n, 0.0);
    // innovation supports avoid the common support but may overlap each other
    std::vector<std::size_t> inno_pool = pool;
    for (std::size_t i : draw_support(inno_pool, cfg.k_innov, rng))
      z[i] = rng.uniform(cfg.amp_low, cfg.amp_high);

    auto& x = ens.sources[j];
    x = ens.common;
    for (std::size_t i = 0; i < cfg.n; ++i) x[i] += z[i];
  }
  return ens;
}

std::vector<std::vector<double>> load_histograms(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("io-error: cannot open " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      // trim whitespace
      std::size_t b = cell.find_first_not_of(" \t\r");
      std::size_t e = cell.find_last_not_of(" \t\r");
      if (b == std::string::npos)
        throw std::runtime_error("parse-error: empty field at line " + std::to_string(lineno));
      cell = cell.substr(b, e - b + 1);
      double v = 0.0;
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || p != cell.data() + cell.size())
        throw std::runtime_error("parse-error: bad number '" + cell + "' at line " +
                                 std::to_string(lineno));
      if (v < 0.0)
        throw std::runtime_error("parse-error: negative histogram bin at line " +
                                 std::to_string(lineno));
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("parse-error: ragged row at line " + std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("parse-error: no histogram rows in " + path);
  return rows;
}

void write_histograms(const std::string& path, const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("io-error: cannot write " + path);
  out.precision(17);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("io-error: failed writing " + path);
}

MeasurementMatrix make_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (m == 0 || m > n) throw std::invalid_argument("make_matrix: invalid dims (need 1 <= m <= n)");
  MeasurementMatrix mm;
  mm.rows = m;
  mm.cols = n;
  mm.seed = seed;
  mm.entries = Mat(m, n);
  Rng rng(mix_seed(seed, 0x3a7));
  const double sd = 1.0 / std::sqrt(static_cast<double>(m));
  for (double& e : mm.entries.a) e = sd * rng.gaussian();
  return mm;
}

Measurement project(const MeasurementMatrix& mat, std::span<const double> x) {
  if (x.size() != mat.cols) throw std::invalid_argument("project: dimension mismatch");
  Measurement y;
  y.values.resize(mat.rows);
  y.matrix_seed = mat.seed;
  matvec(mat.entries, x, y.values);
  return y;
}

}  // namespace dicoss
