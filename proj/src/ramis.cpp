#include "dicoss/ramis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace dicoss {

namespace {
constexpr std::size_t kMaxSiSignals = 32;
}

WeightState WeightState::initial(std::size_t n, std::size_t signals) {
  WeightState ws;
  ws.w.assign(signals, std::vector<double>(n, 0.0));
  ws.beta.assign(signals, 0.0);
  std::fill(ws.w[0].begin(), ws.w[0].end(), 1.0);
  ws.beta[0] = 1.0;
  return ws;
}

std::vector<double> intra_weights(std::span<const double> x, std::span<const double> xp,
                                  double epsilon) {
  if (x.size() != xp.size()) throw std::invalid_argument("intra_weights: length mismatch");
  const std::size_t n = x.size();
  std::vector<double> w(n);
  double inv_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 1.0 / (std::fabs(x[i] - xp[i]) + epsilon);
    inv_sum += w[i];
  }
  const double scale = static_cast<double>(n) / inv_sum;
  for (double& v : w) v *= scale;
  return w;
}

std::vector<double> inter_weights(std::span<const double> x, const SiSet& si,
                                  const WeightState& weights, double epsilon) {
  const std::size_t P = si.count();
  if (weights.w.size() != P) throw std::invalid_argument("inter_weights: weight count mismatch");
  std::vector<double> beta(P);
  double inv_sum = 0.0;
  for (std::size_t p = 0; p < P; ++p) {
    double b = epsilon;
    const auto& xp = si.signals[p];
    const auto& wp = weights.w[p];
    for (std::size_t i = 0; i < x.size(); ++i) b += wp[i] * std::fabs(x[i] - xp[i]);
    beta[p] = 1.0 / b;
    inv_sum += beta[p];
  }
  for (double& v : beta) v /= inv_sum;
  return beta;
}

double prox_weighted_nl1_scalar(double v, std::span<const double> breakpoints,
                                std::span<const double> coefs) {
  if (breakpoints.size() != coefs.size())
    throw std::invalid_argument("prox_weighted_nl1_scalar: length mismatch");
  std::array<std::pair<double, double>, kMaxSiSignals> pts;
  std::size_t P = 0;
  for (std::size_t p = 0; p < breakpoints.size(); ++p)
    if (coefs[p] > 0.0) pts[P++] = {breakpoints[p], coefs[p]};
  if (P == 0) return v;
  std::sort(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(P));

  // subgradient g(x) = x - v + (below - above); scan segments left to right
  double below = 0.0, above = 0.0;
  for (std::size_t p = 0; p < P; ++p) above += pts[p].second;
  for (std::size_t q = 0; q <= P; ++q) {
    const double cand = v - (below - above);
    const bool left_ok = (q == 0) || (cand >= pts[q - 1].first);
    const bool right_ok = (q == P) || (cand <= pts[q].first);
    if (left_ok && right_ok) return cand;
    if (q < P) {
      const double bp = pts[q].first;
      const double g_minus = bp - v + (below - above);
      below += pts[q].second;
      above -= pts[q].second;
      const double g_plus = bp - v + (below - above);
      if (g_minus <= 0.0 && g_plus >= 0.0) return bp;
    }
  }
  return v;  // unreachable: g is monotone
}

void prox_weighted_nl1(std::span<const double> v, const SiSet& si, const WeightState& weights,
                       double gamma, std::span<double> out) {
  const std::size_t P = si.count();
  if (P > kMaxSiSignals) throw std::invalid_argument("prox_weighted_nl1: too many SI signals");
  if (gamma <= 0.0) throw std::invalid_argument("prox_weighted_nl1: gamma must be positive");
  const std::size_t n = v.size();
  const std::int64_t ni = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (n * P > 16384)
  for (std::int64_t ii = 0; ii < ni; ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    std::array<double, kMaxSiSignals> bp;
    std::array<double, kMaxSiSignals> cf;
    for (std::size_t p = 0; p < P; ++p) {
      bp[p] = si.signals[p][i];
      cf[p] = gamma * weights.beta[p] * weights.w[p][i];
    }
    out[i] = prox_weighted_nl1_scalar(v[i], {bp.data(), P}, {cf.data(), P});
  }
}

double weighted_nl1_objective(std::span<const double> x, std::span<const double> y, const Mat& phi,
                              const SiSet& si, const WeightState& weights, double lambda) {
  std::vector<double> r(phi.rows);
  matvec(phi, x, r);
  double fit = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = r[i] - y[i];
    fit += d * d;
  }
  double reg = 0.0;
  for (std::size_t p = 0; p < si.count(); ++p) {
    if (weights.beta[p] == 0.0) continue;
    double term = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      term += weights.w[p][i] * std::fabs(x[i] - si.signals[p][i]);
    reg += weights.beta[p] * term;
  }
  return 0.5 * fit + lambda * reg;
}

RecoveryResult ramis_recover_one(std::span<const double> y, const Mat& phi, const SiSet& si,
                                 const SolverConfig& cfg, std::span<const double> x0) {
  const std::size_t n = phi.cols;
  const std::size_t m = phi.rows;
  if (y.size() != m) throw std::invalid_argument("ramis_recover_one: dimension mismatch");
  if (si.count() == 0 || si.dim() != n)
    throw std::invalid_argument("ramis_recover_one: bad SI set");

  const double L = estimate_lipschitz(phi, cfg.lipschitz_iters);
  double lambda = cfg.lambda;
  if (lambda <= 0.0) {
    std::vector<double> g(n);
    matvec_t(phi, y, g);
    const double scale = max_abs(g);
    lambda = scale > 0.0 ? cfg.lambda_scale * scale : cfg.lambda_scale;
  }
  const double gamma = lambda / L;
  double epsilon = cfg.epsilon;
  if (epsilon <= 0.0) {
    const double y_scale = norm2(y) / std::sqrt(static_cast<double>(m));
    epsilon = cfg.epsilon_scale * std::max(y_scale, 1e-12);
  }

  WeightState weights = WeightState::initial(n, si.count());
  std::vector<double> x(n, 0.0), x_prev(n, 0.0), u(n, 0.0);
  if (!x0.empty()) {
    if (x0.size() != n) throw std::invalid_argument("ramis_recover_one: warm start mismatch");
    std::copy(x0.begin(), x0.end(), x.begin());
    x_prev = x;
    u = x;
  }
  std::vector<double> resid(m), grad(n), v(n);

  double t = 1.0;
  std::size_t iters = 0;
  bool converged = false;
  for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
    iters = k;
    matvec(phi, u, resid);
    for (std::size_t i = 0; i < m; ++i) resid[i] -= y[i];
    matvec_t(phi, resid, grad);
    for (std::size_t i = 0; i < n; ++i) v[i] = u[i] - grad[i] / L;
    prox_weighted_nl1(v, si, weights, gamma, x);

    for (std::size_t p = 0; p < si.count(); ++p)
      weights.w[p] = intra_weights(x, si.signals[p], epsilon);
    weights.beta = inter_weights(x, si, weights, epsilon);

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double mom = (t - 1.0) / t_next;
    double dn = 0.0, xn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x[i] - x_prev[i];
      dn += d * d;
      xn += x[i] * x[i];
      u[i] = x[i] + mom * d;
    }
    t = t_next;
    x_prev = x;
    if (std::sqrt(dn) <= cfg.tol * std::max(std::sqrt(xn), 1e-12)) {
      converged = true;
      break;
    }
  }

  RecoveryResult res;
  res.solution = std::move(x);
  res.iterations = iters;
  res.converged = converged;
  res.objective = weighted_nl1_objective(res.solution, y, phi, si, weights, lambda);
  return res;
}

std::vector<std::vector<double>> ramis_recover_all(const std::vector<std::vector<double>>& ys,
                                                   const std::vector<const Mat*>& mats,
                                                   const SolverConfig& cfg, const SiSet* initial) {
  if (ys.empty() || ys.size() != mats.size())
    throw std::invalid_argument("ramis_recover_all: need one measurement per matrix");
  const std::size_t n = mats[0]->cols;
  SiSet si = initial ? *initial : SiSet::with_zero(n);
  if (si.count() == 0 || si.dim() != n)
    throw std::invalid_argument("ramis_recover_all: bad initial SI set");

  std::vector<std::vector<double>> out;
  out.reserve(ys.size());
  for (std::size_t j = 0; j < ys.size(); ++j) {
    RecoveryResult r = ramis_recover_one(ys[j], *mats[j], si, cfg);
    out.push_back(r.solution);
    si.add(std::move(r.solution));
  }
  return out;
}

}  // namespace dicoss
