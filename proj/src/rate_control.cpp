#include "dicoss/rate_control.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dicoss/entropy.hpp"
#include "dicoss/laplace.hpp"
#include "dicoss/sensing.hpp"

namespace dicoss {

std::vector<double> rough_si_estimate(std::span<const double> y_si, const Mat& phi_si,
                                      const Mat& phi_j) {
  if (phi_si.cols != phi_j.cols) throw std::invalid_argument("rough_si_estimate: inconsistent n");
  if (y_si.size() != phi_si.rows)
    throw std::invalid_argument("rough_si_estimate: measurement length mismatch");

  Mat gram = gram_rows(phi_si);
  std::vector<double> z = spd_solve(std::move(gram), {y_si.begin(), y_si.end()}, 1e-10);
  std::vector<double> x(phi_si.cols);
  matvec_t(phi_si, z, x);
  std::vector<double> out(phi_j.rows);
  matvec(phi_j, x, out);
  return out;
}

double model_conditional_entropy(std::span<const double> y, std::span<const double> predictor,
                                 const QuantizerSpec& spec) {
  if (y.size() != predictor.size())
    throw std::invalid_argument("model_conditional_entropy: length mismatch");
  std::vector<double> resid(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) resid[i] = y[i] - predictor[i];
  const LaplacianModel model = fit_laplacian(resid);

  const int levels = spec.levels();
  const double step = spec.step();
  const double inf = std::numeric_limits<double>::infinity();
  double h_sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double mu = predictor[i];
    double h = 0.0;
    for (int c = 0; c < levels; ++c) {
      const double lo = (c == 0) ? -inf : spec.lower + c * step;
      const double hi = (c == levels - 1) ? inf : spec.lower + (c + 1) * step;
      const double p = laplace_mass(lo, hi, mu, model.alpha);
      if (p > 0.0) h -= p * std::log2(p);
    }
    h_sum += h;
  }
  return h_sum / static_cast<double>(y.size());
}

RateEstimate estimate_rates(std::span<const double> x, std::span<const double> y, const Mat& phi_j,
                            const SiCandidate& cand, const QuantizerSpec& spec_y) {
  const SymbolAlphabet alphabet{static_cast<std::uint32_t>(spec_y.levels())};
  RateEstimate est;
  est.h_intra = empirical_entropy(quantize(y, spec_y).indices, alphabet);

  const MeasurementMatrix phi_si = make_matrix(cand.m_si, phi_j.cols, cand.seed);
  std::vector<double> y_si(cand.m_si);
  matvec(phi_si.entries, x, y_si);
  const QuantizerSpec spec_si = spec_for_range(y_si, spec_y.bit_depth);
  est.h_prior = empirical_entropy(quantize(y_si, spec_si).indices, alphabet);

  const std::vector<double> rough = rough_si_estimate(y_si, phi_si.entries, phi_j);
  est.h_cond = std::min(model_conditional_entropy(y, rough, spec_y), est.h_intra);
  return est;
}

ModeDecision decide_mode(std::span<const double> x, std::span<const double> y, const Mat& phi_j,
                         std::span<const SiCandidate> candidates, const QuantizerSpec& spec_y) {
  if (candidates.empty()) throw std::invalid_argument("decide_mode: no candidates");
  const double m_j = static_cast<double>(phi_j.rows);

  ModeDecision best;
  best.prior = false;
  best.estimated_bits = std::numeric_limits<double>::infinity();

  double intra_bits = 0.0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const RateEstimate est = estimate_rates(x, y, phi_j, candidates[c], spec_y);
    if (c == 0) intra_bits = m_j * est.h_intra;
    const double prior_bits =
        static_cast<double>(candidates[c].m_si) * est.h_prior + m_j * est.h_cond;
    if (prior_bits < best.estimated_bits) {
      best.prior = true;
      best.m_si = candidates[c].m_si;
      best.seed = candidates[c].seed;
      best.estimated_bits = prior_bits;
    }
  }
  if (!(best.estimated_bits < intra_bits)) {
    best.prior = false;
    best.m_si = 0;
    best.seed = 0;
    best.estimated_bits = intra_bits;
  }
  assert(best.estimated_bits <= intra_bits);
  return best;
}

std::pair<std::size_t, std::uint64_t> greedy_phi_si(std::span<const double> x,
                                                    std::span<const double> y, const Mat& phi_j,
                                                    std::span<const std::size_t> ladder,
                                                    std::uint64_t seed_base,
                                                    const QuantizerSpec& spec_y) {
  if (ladder.empty()) throw std::invalid_argument("greedy_phi_si: empty ladder");
  const double m_j = static_cast<double>(phi_j.rows);
  double prev_total = std::numeric_limits<double>::infinity();
  std::size_t prev_m = ladder[0];
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const std::size_t m = ladder[i];
    if (i > 0 && m <= ladder[i - 1])
      throw std::invalid_argument("greedy_phi_si: ladder must be increasing");
    const SiCandidate cand{m, seed_base + m};
    const RateEstimate est = estimate_rates(x, y, phi_j, cand, spec_y);
    const double total = static_cast<double>(m) * est.h_prior + m_j * est.h_cond;
    if (total > prev_total) return {prev_m, seed_base + prev_m};  // first local minimum
    prev_total = total;
    prev_m = m;
  }
  return {prev_m, seed_base + prev_m};
}

}  // namespace dicoss
