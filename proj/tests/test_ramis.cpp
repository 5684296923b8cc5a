#include "doctest.h"

#include <cmath>
#include <vector>

#include "dicoss/ramis.hpp"
#include "dicoss/rng.hpp"
#include "dicoss/sensing.hpp"
#include "oracles.hpp"

using namespace dicoss;

namespace {

double rel_err(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

std::vector<double> sparse_signal(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<double> x(n, 0.0);
  for (std::size_t placed = 0; placed < k;) {
    const std::size_t i = rng.index(n);
    if (x[i] == 0.0) {
      x[i] = rng.uniform(0.5, 1.5);
      ++placed;
    }
  }
  return x;
}

}  // namespace

TEST_CASE("intra_weights: symmetry, worked example, sum identity") {
  const std::vector<double> same = {1.0, 2.0, 3.0};
  for (double w : intra_weights(same, same, 0.1)) CHECK(w == doctest::Approx(1.0));

  // n=2, diffs (0, 1), eps=0.1
  const auto w = intra_weights(std::vector<double>{5.0, 5.0}, std::vector<double>{5.0, 4.0}, 0.1);
  CHECK(w[0] == doctest::Approx(20.0 / (10.0 + 1.0 / 1.1) / 1.0).epsilon(1e-4));
  CHECK(w[0] == doctest::Approx(1.83333).epsilon(1e-4));
  CHECK(w[1] == doctest::Approx(0.16667).epsilon(1e-4));

  Rng rng(71);
  for (int it = 0; it < 100; ++it) {
    const std::size_t n = 2 + rng.index(200);
    std::vector<double> x(n), xp(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.uniform(-4.0, 4.0);
      xp[i] = rng.uniform(-4.0, 4.0);
    }
    const auto wi = intra_weights(x, xp, rng.uniform(1e-6, 0.5));
    double s = 0.0;
    for (double v : wi) s += v;
    CHECK(std::fabs(s - static_cast<double>(n)) <= 1e-9);
  }
}

TEST_CASE("inter_weights: normalization, symmetry, dominance") {
  const std::size_t n = 6;
  std::vector<double> x(n, 1.0);

  SiSet single = SiSet::with_zero(n);
  WeightState ws1 = WeightState::initial(n, 1);
  const auto b1 = inter_weights(x, single, ws1, 1e-3);
  CHECK(b1 == std::vector<double>{1.0});

  // two SI with equal distance: beta = (0.5, 0.5)
  SiSet two;
  two.add(std::vector<double>(n, 0.0));
  two.add(std::vector<double>(n, 2.0));
  WeightState ws2 = WeightState::initial(n, 2);
  ws2.w[0].assign(n, 1.0);
  ws2.w[1].assign(n, 1.0);
  const auto b2 = inter_weights(x, two, ws2, 1e-3);
  CHECK(b2[0] == doctest::Approx(0.5));
  CHECK(b2[1] == doctest::Approx(0.5));

  // near-perfect SI dominates: b = (eps, 1 + eps) with eps = 1e-3
  SiSet dom;
  dom.add(x);
  std::vector<double> off(x);
  off[0] += 1.0;
  dom.add(off);
  WeightState ws3 = WeightState::initial(n, 2);
  ws3.w[0].assign(n, 1.0);
  ws3.w[1].assign(n, 1.0);
  const auto b3 = inter_weights(x, dom, ws3, 1e-3);
  CHECK(b3[0] == doctest::Approx(0.999).epsilon(1e-3));
  CHECK(b3[1] == doctest::Approx(0.001).epsilon(1e-1));
  double s = 0.0;
  for (double b : b3) s += b;
  CHECK(std::fabs(s - 1.0) <= 1e-9);
}

TEST_CASE("prox_weighted_nl1_scalar: shrinkage, fixed point, grid oracle") {
  // single zero breakpoint with unit weight: plain soft threshold
  const std::vector<double> bp0 = {0.0};
  const std::vector<double> cf_half = {0.5};
  CHECK(prox_weighted_nl1_scalar(2.0, bp0, cf_half) == doctest::Approx(1.5));
  CHECK(prox_weighted_nl1_scalar(-0.3, bp0, cf_half) == doctest::Approx(0.0));

  // v at a breakpoint with a large coefficient stays there
  const std::vector<double> bp1 = {0.7};
  const std::vector<double> cf_big = {10.0};
  CHECK(prox_weighted_nl1_scalar(0.7, bp1, cf_big) == doctest::Approx(0.7));

  Rng rng(72);
  double worst = 0.0;
  for (int it = 0; it < 100; ++it) {
    const std::size_t P = 1 + rng.index(4);
    std::vector<double> bp(P), cf(P);
    for (std::size_t p = 0; p < P; ++p) {
      bp[p] = rng.uniform(-2.0, 2.0);
      cf[p] = rng.uniform(0.01, 1.5);
    }
    const double v = rng.uniform(-3.0, 3.0);
    const double got = prox_weighted_nl1_scalar(v, bp, cf);
    worst = std::max(worst, std::fabs(got - oracles::grid_prox(v, bp, cf)));

    // result never leaves [min(v, bps), max(v, bps)]
    double lo = v, hi = v;
    for (double b : bp) {
      lo = std::min(lo, b);
      hi = std::max(hi, b);
    }
    CHECK(got >= lo - 1e-12);
    CHECK(got <= hi + 1e-12);
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("one frozen-weight iteration equals one FISTA-l1 iteration") {
  // With SI = {0} and the initial weights (W=I, beta=1), the first prox is a
  // plain soft threshold, so iterate 1 must match solve_l1's iterate 1.
  Rng rng(73);
  const Mat phi = make_matrix(12, 30, 81).entries;
  std::vector<double> y(12);
  for (double& v : y) v = rng.gaussian();

  SolverConfig cfg;
  cfg.lambda = 0.05;
  cfg.max_iters = 1;
  cfg.tol = 1e-16;
  const RecoveryResult fista = solve_l1(y, phi, cfg);

  const double L = estimate_lipschitz(phi);
  std::vector<double> grad(30), resid(12, 0.0), v(30);
  for (std::size_t i = 0; i < 12; ++i) resid[i] = -y[i];
  matvec_t(phi, resid, grad);
  for (std::size_t i = 0; i < 30; ++i) v[i] = -grad[i] / L;

  SiSet si = SiSet::with_zero(30);
  WeightState ws = WeightState::initial(30, 1);
  std::vector<double> prox_out(30);
  prox_weighted_nl1(v, si, ws, cfg.lambda / L, prox_out);
  for (std::size_t i = 0; i < 30; ++i)
    CHECK(prox_out[i] == doctest::Approx(fista.solution[i]).epsilon(1e-12));
}

TEST_CASE("ramis_recover_one: zero data and perfect side information") {
  const Mat phi = make_matrix(20, 200, 82).entries;
  SolverConfig cfg;
  const SiSet zero_si = SiSet::with_zero(200);
  const RecoveryResult z =
      ramis_recover_one(std::vector<double>(20, 0.0), phi, zero_si, cfg);
  CHECK(norm2(z.solution) == 0.0);

  // SI containing the exact signal collapses the needed measurements:
  // m = n/10 with k = n/10
  Rng rng(83);
  const std::vector<double> x = sparse_signal(200, 20, rng);
  std::vector<double> y(20);
  matvec(phi, x, y);
  SiSet si = SiSet::with_zero(200);
  si.add(x);
  cfg.max_iters = 3000;
  const RecoveryResult r = ramis_recover_one(y, phi, si, cfg);
  CHECK(rel_err(r.solution, x) <= 1e-3);
}

TEST_CASE("ramis_recover_one: objective matches an independent proximal descent oracle") {
  Rng rng(84);
  for (int seed = 0; seed < 3; ++seed) {
    const Mat phi = make_matrix(8, 16, 900 + static_cast<std::uint64_t>(seed)).entries;
    const std::vector<double> x = sparse_signal(16, 3, rng);
    std::vector<double> y(8);
    matvec(phi, x, y);

    SiSet si = SiSet::with_zero(16);
    std::vector<double> si1(x), si2(x);
    for (auto& v : si1) v += 0.05 * rng.gaussian();
    for (auto& v : si2) v += 0.3 * rng.gaussian();
    si.add(si1);
    si.add(si2);

    SolverConfig cfg;
    cfg.lambda = 0.02;
    cfg.epsilon = 0.5;  // pinned so the final weights can be rebuilt below
    cfg.max_iters = 4000;
    cfg.tol = 1e-13;
    const RecoveryResult r = ramis_recover_one(y, phi, si, cfg);

    // freeze the final weights and compare objectives on the same problem
    WeightState ws = WeightState::initial(16, si.count());
    for (std::size_t p = 0; p < si.count(); ++p)
      ws.w[p] = intra_weights(r.solution, si.signals[p], cfg.epsilon);
    ws.beta = inter_weights(r.solution, si, ws, cfg.epsilon);

    const double mine = weighted_nl1_objective(r.solution, y, phi, si, ws, cfg.lambda);
    const double L = estimate_lipschitz(phi);
    const double oracle =
        oracles::proximal_descent_best_objective(y, phi, si, ws, cfg.lambda, L, 50000);
    CHECK(mine <= oracle * (1.0 + 1e-4) + 1e-12);
  }
}

TEST_CASE("ramis_recover_all: reduction, symmetry, sequential gain") {
  Rng rng(85);
  const std::size_t n = 150, m = 45;
  const Mat phi = make_matrix(m, n, 86).entries;
  const std::vector<double> x = sparse_signal(n, 10, rng);
  std::vector<double> y(m);
  matvec(phi, x, y);

  SolverConfig cfg;
  cfg.max_iters = 2000;

  // J = 1 reduces to a single zero-SI recovery
  const auto all = ramis_recover_all({y}, {&phi}, cfg);
  const RecoveryResult one = ramis_recover_one(y, phi, SiSet::with_zero(n), cfg);
  CHECK(all.size() == 1);
  CHECK(all[0] == one.solution);

  // permuting identical sources leaves results identical
  const auto twice = ramis_recover_all({y, y}, {&phi, &phi}, cfg);
  const auto swapped = ramis_recover_all({y, y}, {&phi, &phi}, cfg);
  CHECK(twice == swapped);

  CHECK_THROWS(ramis_recover_all({}, {}, cfg));
}
