#include "doctest.h"

#include <cmath>
#include <vector>

#include "dicoss/correlation.hpp"
#include "dicoss/laplace.hpp"
#include "dicoss/rng.hpp"

using namespace dicoss;

TEST_CASE("fit_laplacian: ML scale, clamping, consistency, scale equivariance") {
  CHECK(fit_laplacian(std::vector<double>{1, -1, 1, -1}).alpha == doctest::Approx(1.0));
  CHECK(fit_laplacian(std::vector<double>{0, 0, 0}).alpha == doctest::Approx(1e6));
  CHECK_THROWS(fit_laplacian({}));

  // draw from Laplacian(alpha=2) by inverse CDF and refit
  Rng rng(61);
  std::vector<double> samples(100000);
  for (double& s : samples) {
    const double u = rng.uniform() - 0.5;
    s = -std::copysign(std::log(1.0 - 2.0 * std::fabs(u)), u) / 2.0;
  }
  const double fitted = fit_laplacian(samples).alpha;
  CHECK(std::fabs(fitted - 2.0) / 2.0 <= 0.05);

  // residuals scaled by c > 0 scale alpha by 1/c exactly
  std::vector<double> scaled(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) scaled[i] = 4.0 * samples[i];
  CHECK(fit_laplacian(scaled).alpha == doctest::Approx(fitted / 4.0).epsilon(1e-12));

  CHECK(LaplacianModel{2.0}.variance() == doctest::Approx(0.5));
}

TEST_CASE("mixture_density: peak value, ignored hypothesis, unit integral") {
  LaplacianModel m2{2.0};
  MixtureWeights w1;
  w1.u = {1.0};
  CHECK(mixture_density(0.7, std::vector<double>{0.7}, {&m2, 1}, w1) == doctest::Approx(1.0));

  LaplacianModel models[2] = {{2.0}, {11.0}};
  MixtureWeights w10;
  w10.u = {1.0, 0.0};
  CHECK(mixture_density(0.3, std::vector<double>{0.3, 5.0}, {models, 2}, w10) ==
        doctest::Approx(1.0));

  // quadrature over +-40/min(alpha)
  MixtureWeights w;
  w.u = {0.3, 0.7};
  const std::vector<double> sis = {-0.5, 1.5};
  const double span = 40.0 / 2.0;
  const int n = 400000;
  const double h = 2.0 * span / n;
  double integral = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double y = -span + i * h + 0.5;  // centered between the two SI values
    const double f = mixture_density(y, sis, {models, 2}, w);
    integral += f * ((i == 0 || i == n) ? 0.5 : 1.0);
  }
  integral *= h;
  CHECK(std::fabs(integral - 1.0) <= 1e-4);

  CHECK_THROWS(mixture_density(0.0, std::vector<double>{1.0}, {models, 2}, w));
}

TEST_CASE("assign_mixture_weights: inverse variance on the simplex") {
  LaplacianModel one{3.0};
  CHECK(assign_mixture_weights({&one, 1}).u == std::vector<double>{1.0});

  LaplacianModel same[2] = {{5.0}, {5.0}};
  const MixtureWeights eq = assign_mixture_weights({same, 2});
  CHECK(eq.u[0] == doctest::Approx(0.5));
  CHECK(eq.u[1] == doctest::Approx(0.5));

  // variances (1, 4) -> weights (0.8, 0.2)
  LaplacianModel v14[2] = {{std::sqrt(2.0)}, {std::sqrt(0.5)}};
  CHECK(v14[0].variance() == doctest::Approx(1.0));
  CHECK(v14[1].variance() == doctest::Approx(4.0));
  const MixtureWeights w = assign_mixture_weights({v14, 2});
  CHECK(w.u[0] == doctest::Approx(0.8));
  CHECK(w.u[1] == doctest::Approx(0.2));

  CHECK_THROWS(assign_mixture_weights({}));
}

TEST_CASE("bitplane_llrs: concentrated SI reproduces the cell's bits") {
  QuantizerSpec spec;
  spec.bit_depth = 4;
  spec.lower = 0.0;
  spec.upper = 16.0;  // step 1, cell c = [c, c+1)

  const std::size_t m = 16;
  std::vector<std::vector<double>> si(1, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i) si[0][i] = static_cast<double>(i) + 0.5;  // cell centers
  std::vector<LaplacianModel> models = {{1e5}};
  MixtureWeights w;
  w.u = {1.0};

  std::vector<std::int32_t> prefix(m, 0);
  for (int b = 0; b < 4; ++b) {
    const SoftInput soft = bitplane_llrs(b, prefix, spec, si, models, w);
    for (std::size_t i = 0; i < m; ++i) {
      const int want_bit = (static_cast<int>(i) >> (3 - b)) & 1;
      const int got_bit = soft.llrs[i] < 0.0 ? 1 : 0;
      CHECK(got_bit == want_bit);
      prefix[i] = static_cast<std::int32_t>((prefix[i] << 1) | want_bit);
    }
  }
  // after all planes the prefix is the index itself
  for (std::size_t i = 0; i < m; ++i) CHECK(prefix[i] == static_cast<std::int32_t>(i));
}

TEST_CASE("bitplane_llrs: flat model gives uninformative LLRs") {
  QuantizerSpec spec;
  spec.bit_depth = 3;
  spec.lower = 0.0;
  spec.upper = 8.0;
  std::vector<std::vector<double>> si(1, std::vector<double>(4, 3.0));
  std::vector<LaplacianModel> models = {{1e-3}};
  MixtureWeights w;
  w.u = {1.0};
  const std::vector<std::int32_t> prefix(4, 0);
  const SoftInput soft = bitplane_llrs(0, prefix, spec, si, models, w);
  for (double l : soft.llrs) CHECK(std::fabs(l) <= 0.01);
}

TEST_CASE("bitplane_llrs: P0 + P1 equals the prefix mass") {
  QuantizerSpec spec;
  spec.bit_depth = 5;
  spec.lower = -1.0;
  spec.upper = 3.0;
  Rng rng(62);
  std::vector<std::vector<double>> si(2, std::vector<double>(8));
  for (auto& v : si)
    for (double& x : v) x = rng.uniform(-2.0, 4.0);
  std::vector<LaplacianModel> models = {{4.0}, {9.0}};
  const MixtureWeights w = assign_mixture_weights(models);

  for (int b = 1; b < 5; ++b) {
    std::vector<std::int32_t> prefix(8);
    for (auto& p : prefix) p = static_cast<std::int32_t>(rng.index(1u << b));
    const SoftInput soft = bitplane_llrs(b, prefix, spec, si, models, w);
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 8; ++i) {
      // recompute masses directly
      const std::int32_t group = 1 << (5 - b);
      const std::int32_t cell0 = prefix[i] * group;
      const double step = spec.step();
      const double lo = (cell0 == 0) ? -inf : spec.lower + cell0 * step;
      const double mid = spec.lower + (cell0 + group / 2) * step;
      const double hi = (cell0 + group == 32) ? inf : spec.lower + (cell0 + group) * step;
      double p0 = 0.0, p1 = 0.0, total = 0.0;
      for (std::size_t p = 0; p < 2; ++p) {
        p0 += w.u[p] * laplace_mass(lo, mid, si[p][i], models[p].alpha);
        p1 += w.u[p] * laplace_mass(mid, hi, si[p][i], models[p].alpha);
        total += w.u[p] * laplace_mass(lo, hi, si[p][i], models[p].alpha);
      }
      CHECK(std::fabs((p0 + p1) - total) <= 1e-9);
      // and the reported llr matches the direct ratio
      const double want = std::clamp(std::log(p0 / p1), -kLlrClamp, kLlrClamp);
      CHECK(soft.llrs[i] == doctest::Approx(want).epsilon(1e-9));
    }
  }
}

TEST_CASE("bitplane_llrs: inconsistent prefix throws") {
  QuantizerSpec spec;
  spec.bit_depth = 3;
  spec.lower = 0.0;
  spec.upper = 8.0;
  std::vector<std::vector<double>> si(1, std::vector<double>(2, 1.0));
  std::vector<LaplacianModel> models = {{1.0}};
  MixtureWeights w;
  w.u = {1.0};
  const std::vector<std::int32_t> bad = {2, 0};  // plane 1 allows prefixes {0, 1}
  CHECK_THROWS(bitplane_llrs(1, bad, spec, si, models, w));
}
