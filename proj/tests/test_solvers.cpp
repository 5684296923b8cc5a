#include "doctest.h"

#include <cmath>
#include <vector>

#include "dicoss/rng.hpp"
#include "dicoss/sensing.hpp"
#include "dicoss/solvers.hpp"
#include "oracles.hpp"

using namespace dicoss;

namespace {

Mat diag_mat(std::vector<double> d) {
  Mat a(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) a.at(i, i) = d[i];
  return a;
}

std::vector<double> spike_signal(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<double> x(n, 0.0);
  for (std::size_t placed = 0; placed < k;) {
    const std::size_t i = rng.index(n);
    if (x[i] == 0.0) {
      x[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
      ++placed;
    }
  }
  return x;
}

double rel_err(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("estimate_lipschitz on closed-form spectra") {
  CHECK(estimate_lipschitz(diag_mat({1, 1, 1})) == doctest::Approx(1.05).epsilon(1e-6));
  CHECK(estimate_lipschitz(diag_mat({2, 1})) == doctest::Approx(4.2).epsilon(1e-6));
  CHECK_THROWS(estimate_lipschitz(Mat(3, 3)));
}

TEST_CASE("estimate_lipschitz against a dense eigensolver") {
  const Mat phi = make_matrix(50, 100, 123).entries;
  const double est = estimate_lipschitz(phi);
  // lam_max(phi^T phi) = lam_max(phi phi^T); the Gram over rows is 50x50
  const double want = oracles::jacobi_max_eigenvalue(gram_rows(phi));
  CHECK(std::fabs(est / 1.05 - want) / want <= 0.05);
  CHECK(est >= 0.99 * want);
}

TEST_CASE("solve_l1: zero data and the identity prox case") {
  const Mat phi = make_matrix(10, 20, 9).entries;
  SolverConfig cfg;
  const RecoveryResult zero = solve_l1(std::vector<double>(10, 0.0), phi, cfg);
  CHECK(norm2(zero.solution) == 0.0);

  Mat eye = diag_mat({1, 1});
  SolverConfig hard;
  hard.lambda = 1.0;
  hard.max_iters = 5000;
  hard.tol = 1e-12;
  const RecoveryResult st = solve_l1(std::vector<double>{3.0, 0.0}, eye, hard);
  CHECK(st.solution[0] == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(st.solution[1] == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("solve_l1: sparse recovery at desk scale") {
  Rng rng(1001);
  std::size_t hits = 0;
  SolverConfig cfg;
  cfg.max_iters = 1500;
  cfg.tol = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    const Mat phi = make_matrix(80, 200, 2000 + static_cast<std::uint64_t>(trial)).entries;
    const std::vector<double> x = spike_signal(200, 10, rng);
    std::vector<double> y(80);
    matvec(phi, x, y);
    const RecoveryResult r = solve_l1(y, phi, cfg);
    if (rel_err(r.solution, x) <= 0.04) ++hits;
  }
  CHECK(hits >= 9);
}

TEST_CASE("solve_l1: objective decrease and subgradient optimality") {
  Rng rng(1002);
  const Mat phi = make_matrix(20, 40, 77).entries;
  const std::vector<double> x_true = spike_signal(40, 4, rng);
  std::vector<double> y(20);
  matvec(phi, x_true, y);

  SolverConfig cfg;
  cfg.lambda = 0.01;
  cfg.max_iters = 50000;
  cfg.tol = 1e-14;
  const RecoveryResult r = solve_l1(y, phi, cfg);

  double h0 = 0.0;
  for (double v : y) h0 += 0.5 * v * v;
  CHECK(r.objective <= h0);

  std::vector<double> resid(20), sub(40);
  matvec(phi, r.solution, resid);
  for (std::size_t i = 0; i < resid.size(); ++i) resid[i] -= y[i];
  matvec_t(phi, resid, sub);
  for (std::size_t i = 0; i < sub.size(); ++i) {
    if (r.solution[i] == 0.0) CHECK(std::fabs(sub[i]) <= cfg.lambda * (1.0 + 1e-6));
    else CHECK(sub[i] == doctest::Approx(-cfg.lambda * (r.solution[i] > 0 ? 1.0 : -1.0))
                             .epsilon(1e-4));
  }
}

TEST_CASE("build_stacked: layout and operator identity") {
  // J=1: [Phi, Phi] acting on [x_c; z]
  const Mat phi1 = make_matrix(4, 6, 31).entries;
  std::vector<double> y1(4, 0.0);
  const StackedSystem s1 = build_stacked({&phi1}, {y1});
  CHECK(s1.unknowns() == 12);
  CHECK(s1.total_rows == 4);

  Rng rng(32);
  std::vector<double> xp(12);
  for (double& v : xp) v = rng.gaussian();
  std::vector<double> got(4), want(4), sum(6);
  s1.apply(xp, got);
  for (std::size_t i = 0; i < 6; ++i) sum[i] = xp[i] + xp[6 + i];
  matvec(phi1, sum, want);
  for (std::size_t i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));

  // J=2 with 2x3 blocks: stacked shape 4 x 9
  const Mat a = make_matrix(2, 3, 41).entries;
  const Mat b = make_matrix(2, 3, 42).entries;
  const StackedSystem s2 = build_stacked({&a, &b}, {{0, 0}, {0, 0}});
  CHECK(s2.total_rows == 4);
  CHECK(s2.unknowns() == 9);

  std::vector<double> xq(9);
  for (double& v : xq) v = rng.gaussian();
  std::vector<double> out(4);
  s2.apply(xq, out);
  std::vector<double> xc(xq.begin(), xq.begin() + 3);
  std::vector<double> z1(xq.begin() + 3, xq.begin() + 6);
  std::vector<double> z2(xq.begin() + 6, xq.end());
  std::vector<double> t1(3), t2(3), w1(2), w2(2);
  for (int i = 0; i < 3; ++i) {
    t1[i] = xc[i] + z1[i];
    t2[i] = xc[i] + z2[i];
  }
  matvec(a, t1, w1);
  matvec(b, t2, w2);
  CHECK(out[0] == doctest::Approx(w1[0]).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(w1[1]).epsilon(1e-12));
  CHECK(out[2] == doctest::Approx(w2[0]).epsilon(1e-12));
  CHECK(out[3] == doctest::Approx(w2[1]).epsilon(1e-12));

  // adjoint consistency: <Ax, y> == <x, A^T y>
  std::vector<double> ry(4);
  for (double& v : ry) v = rng.gaussian();
  std::vector<double> aty(9);
  s2.apply_t(ry, aty);
  CHECK(dot(out, ry) == doctest::Approx(dot(xq, aty)).epsilon(1e-10));

  CHECK_THROWS(build_stacked({}, {}));
}

TEST_CASE("solve_jsm: zero data, common-only consistency, joint recovery") {
  const Mat a = make_matrix(20, 50, 51).entries;
  const Mat b = make_matrix(20, 50, 52).entries;
  SolverConfig cfg;

  const JsmResult zero = solve_jsm(build_stacked({&a, &b}, {std::vector<double>(20, 0.0),
                                                            std::vector<double>(20, 0.0)}),
                                   cfg);
  for (const auto& r : zero.per_source) CHECK(norm2(r.solution) == 0.0);

  // common-only ensemble: both recomposed sources agree
  Rng rng(53);
  std::vector<double> xc(50, 0.0);
  for (int s = 0; s < 5; ++s) xc[rng.index(50)] = rng.uniform(0.5, 1.0);
  std::vector<double> ya(20), yb(20);
  matvec(a, xc, ya);
  matvec(b, xc, yb);
  cfg.lambda_scale = 1e-6;  // near basis pursuit so the z blocks vanish
  cfg.max_iters = 30000;
  cfg.tol = 1e-12;
  const JsmResult jr = solve_jsm(build_stacked({&a, &b}, {ya, yb}), cfg);
  for (std::size_t i = 0; i < 50; ++i)
    CHECK(std::fabs(jr.per_source[0].solution[i] - jr.per_source[1].solution[i]) <= 1e-6);
}

TEST_CASE("solve_jsm: pooled measurements recover a correlated ensemble") {
  Rng rng(54);
  const std::size_t n = 200, m = 60, J = 3;
  SourceConfig sc;
  sc.n = n;
  sc.sources = J;
  sc.k_common = 8;
  sc.k_innov = 2;
  sc.amp_low = 0.5;
  sc.amp_high = 1.0;
  sc.seed = 99;
  const JsmEnsemble ens = generate_ensemble(sc);

  std::vector<Mat> mats;
  std::vector<std::vector<double>> ys;
  for (std::size_t j = 0; j < J; ++j) {
    mats.push_back(make_matrix(m, n, 500 + j).entries);
    std::vector<double> y(m);
    matvec(mats.back(), ens.sources[j], y);
    ys.push_back(std::move(y));
  }
  std::vector<const Mat*> ptrs;
  for (const auto& mat : mats) ptrs.push_back(&mat);

  SolverConfig cfg;
  cfg.max_iters = 3000;
  const JsmResult jr = solve_jsm(build_stacked(ptrs, ys), cfg);
  for (std::size_t j = 0; j < J; ++j)
    CHECK(rel_err(jr.per_source[j].solution, ens.sources[j]) <= 0.04);
}
