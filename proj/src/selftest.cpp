#include "dicoss/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "dicoss/entropy.hpp"
#include "dicoss/laplace.hpp"
#include "dicoss/quantize.hpp"
#include "dicoss/ramis.hpp"
#include "dicoss/rng.hpp"
#include "dicoss/slepian_wolf.hpp"

namespace dicoss {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double prox_objective(double x, double v, std::span<const double> bp, std::span<const double> cf) {
  double f = 0.5 * (x - v) * (x - v);
  for (std::size_t p = 0; p < bp.size(); ++p) f += cf[p] * std::fabs(x - bp[p]);
  return f;
}

// Grid minimizer for the scalar prox objective: coarse pass then a 1e-6-step
// refinement around the coarse argmin (exact for a convex objective).
double grid_prox(double v, std::span<const double> bp, std::span<const double> cf) {
  double lo = v, hi = v;
  for (double b : bp) {
    lo = std::min(lo, b);
    hi = std::max(hi, b);
  }
  double slack = 0.0;
  for (double c : cf) slack += c;
  lo -= slack + 0.5;
  hi += slack + 0.5;

  auto scan = [&](double a, double b, double step) {
    double best_x = a, best_f = prox_objective(a, v, bp, cf);
    for (double x = a + step; x <= b; x += step) {
      const double f = prox_objective(x, v, bp, cf);
      if (f < best_f) {
        best_f = f;
        best_x = x;
      }
    }
    return best_x;
  };
  const double coarse = scan(lo, hi, 1e-3);
  return scan(coarse - 2e-3, coarse + 2e-3, 1e-6);
}

// Composite Simpson over [a, b] (N even).
double simpson(double a, double b, int n, const auto& f) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * ((i & 1) ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Quadrature mean of the truncated mixture, split at interior centers so
// each piece is smooth.
double quadrature_mean(const QuantInterval& iv, std::span<const double> mus,
                       std::span<const LaplacianModel> models, const MixtureWeights& w) {
  std::vector<double> cuts = {iv.lower, iv.upper};
  for (double mu : mus)
    if (mu > iv.lower && mu < iv.upper) cuts.push_back(mu);
  std::sort(cuts.begin(), cuts.end());

  auto density = [&](double y) {
    double s = 0.0;
    for (std::size_t p = 0; p < mus.size(); ++p)
      s += w.u[p] * laplace_density(y, mus[p], models[p].alpha);
    return s;
  };
  double num = 0.0, den = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    num += simpson(cuts[c], cuts[c + 1], 4000, [&](double y) { return y * density(y); });
    den += simpson(cuts[c], cuts[c + 1], 4000, density);
  }
  return num / den;
}

CheckResult check_prox(ScalarProxFn prox_fn) {
  CheckResult r{"prox-vs-grid-minimizer", "max |diff| <= 1e-5", false, ""};
  Rng rng(2024);
  double worst = 0.0;
  for (int it = 0; it < 200; ++it) {
    const std::size_t P = 1 + rng.index(4);
    std::vector<double> bp(P), cf(P);
    for (std::size_t p = 0; p < P; ++p) {
      bp[p] = rng.uniform(-2.0, 2.0);
      cf[p] = rng.uniform(0.01, 1.5);
    }
    const double v = rng.uniform(-3.0, 3.0);
    const double got = prox_fn(v, bp, cf);
    const double want = grid_prox(v, bp, cf);
    worst = std::max(worst, std::fabs(got - want));
  }
  r.pass = worst <= 1e-5;
  r.detail = "max |diff| = " + fmt(worst) + " over 200 instances";
  return r;
}

CheckResult check_intra_weights() {
  CheckResult r{"intra-weight-sum", "|sum_i w_i - n| <= 1e-9", false, ""};
  Rng rng(77);
  double worst = 0.0;
  for (int it = 0; it < 300; ++it) {
    const std::size_t n = 2 + rng.index(128);
    std::vector<double> x(n), xp(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.uniform(-5.0, 5.0);
      xp[i] = rng.uniform(-5.0, 5.0);
    }
    const auto w = intra_weights(x, xp, rng.uniform(1e-6, 1.0));
    double s = 0.0;
    for (double wi : w) s += wi;
    worst = std::max(worst, std::fabs(s - static_cast<double>(n)));
  }
  r.pass = worst <= 1e-9;
  r.detail = "max deviation = " + fmt(worst);
  return r;
}

CheckResult check_inter_weights() {
  CheckResult r{"inter-weight-sum", "|sum_p beta_p - 1| <= 1e-9", false, ""};
  Rng rng(78);
  double worst = 0.0;
  for (int it = 0; it < 300; ++it) {
    const std::size_t n = 4 + rng.index(64);
    const std::size_t P = 1 + rng.index(5);
    SiSet si;
    for (std::size_t p = 0; p < P; ++p) {
      std::vector<double> s(n);
      for (double& v : s) v = rng.uniform(-2.0, 2.0);
      si.add(std::move(s));
    }
    WeightState ws = WeightState::initial(n, P);
    std::vector<double> x(n);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    for (std::size_t p = 0; p < P; ++p) ws.w[p] = intra_weights(x, si.signals[p], 1e-3);
    const auto beta = inter_weights(x, si, ws, 1e-3);
    double s = 0.0;
    for (double b : beta) s += b;
    worst = std::max(worst, std::fabs(s - 1.0));
  }
  r.pass = worst <= 1e-9;
  r.detail = "max deviation = " + fmt(worst);
  return r;
}

CheckResult check_entropy_roundtrip() {
  CheckResult r{"entropy-codec-roundtrip", "exact", false, ""};
  Rng rng(91);
  bool ok = true;
  for (int it = 0; it < 50 && ok; ++it) {
    const std::uint32_t k = (it % 3 == 0) ? 2 : ((it % 3 == 1) ? 64 : 256);
    const std::size_t len = rng.index(2000);
    std::vector<std::int32_t> syms(len);
    const bool skew = (it % 2) != 0;
    for (auto& s : syms)
      s = static_cast<std::int32_t>(skew ? rng.index(1 + rng.index(k)) : rng.index(k));
    const SymbolAlphabet a{k};
    ok = entropy_decode(entropy_encode(syms, a), syms.size(), a) == syms;
  }
  r.pass = ok;
  r.detail = ok ? "50 round trips exact" : "round trip mismatch";
  return r;
}

CheckResult check_sw_roundtrip() {
  CheckResult r{"slepian-wolf-roundtrip", "success flag never lies; always terminates", false, ""};
  Rng rng(92);
  const std::size_t m = 128;
  const SyndromeLadder ladder = build_ladder(m, 0xabcd);
  bool ok = true;
  for (int it = 0; it < 20 && ok; ++it) {
    std::vector<std::uint8_t> plane(m);
    for (auto& b : plane) b = static_cast<std::uint8_t>(rng.index(2));
    const SwEncoding enc = sw_encode(plane, ladder);
    SoftInput soft;
    soft.llrs.resize(m);
    const int kind = it % 3;
    for (std::size_t i = 0; i < m; ++i) {
      if (kind == 0) soft.llrs[i] = plane[i] ? -kLlrClamp : kLlrClamp;
      else if (kind == 1) {
        const bool flip = rng.uniform() < 0.05;
        const double mag = std::log(0.95 / 0.05);
        soft.llrs[i] = (plane[i] ^ flip) ? -mag : mag;
      } else soft.llrs[i] = 0.0;
    }
    const DecodeOutcome out = sw_decode(enc, soft, ladder);
    ok = out.success && out.bits == plane;
  }
  r.pass = ok;
  r.detail = ok ? "20 decodes lossless" : "decode mismatch";
  return r;
}

CheckResult check_multihypothesis() {
  CheckResult r{"multihypothesis-mean-vs-quadrature", "rel diff <= 1e-6", false, ""};
  Rng rng(93);
  double worst = 0.0;
  for (int it = 0; it < 200; ++it) {
    QuantInterval iv;
    iv.lower = rng.uniform(0.5, 3.0);
    iv.upper = iv.lower + rng.uniform(0.1, 2.0);
    const double width = iv.upper - iv.lower;
    const std::size_t P = 1 + rng.index(3);
    std::vector<double> mus(P);
    std::vector<LaplacianModel> models(P);
    MixtureWeights w;
    w.u.resize(P);
    double tot = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
      mus[p] = iv.lower + rng.uniform(-3.0, 4.0) * width;
      models[p].alpha = rng.uniform(0.05, 20.0) / width;
      w.u[p] = rng.uniform(0.05, 1.0);
      tot += w.u[p];
    }
    for (double& u : w.u) u /= tot;
    const double got = reconstruct_multihypothesis(iv, mus, models, w);
    const double want = quadrature_mean(iv, mus, models, w);
    worst = std::max(worst, std::fabs(got - want) / std::max(std::fabs(want), 1e-9));
  }
  r.pass = worst <= 1e-6;
  r.detail = "max rel diff = " + fmt(worst) + " over 200 configurations";
  return r;
}

CheckResult check_bitplanes() {
  CheckResult r{"bitplane-roundtrip", "exact", false, ""};
  Rng rng(94);
  bool ok = true;
  for (int it = 0; it < 50 && ok; ++it) {
    QuantizerSpec spec;
    spec.bit_depth = (it % 2) ? 3 : 6;
    spec.lower = 0.0;
    spec.upper = 1.0;
    QuantizedMeasurement q;
    q.spec = spec;
    q.indices.resize(1 + rng.index(500));
    for (auto& idx : q.indices) idx = static_cast<std::int32_t>(rng.index(spec.levels()));
    ok = recompose(to_bitplanes(q)) == q.indices;
  }
  r.pass = ok;
  r.detail = ok ? "50 round trips exact" : "recompose mismatch";
  return r;
}

}  // namespace

std::vector<CheckResult> run_selftest(ScalarProxFn prox_fn) {
  if (prox_fn == nullptr)
    prox_fn = [](double v, std::span<const double> bp, std::span<const double> cf) {
      return prox_weighted_nl1_scalar(v, bp, cf);
    };
  std::vector<CheckResult> out;
  out.push_back(check_prox(prox_fn));
  out.push_back(check_intra_weights());
  out.push_back(check_inter_weights());
  out.push_back(check_entropy_roundtrip());
  out.push_back(check_sw_roundtrip());
  out.push_back(check_multihypothesis());
  out.push_back(check_bitplanes());
  return out;
}

bool all_passed(std::span<const CheckResult> results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.pass; });
}

}  // namespace dicoss
