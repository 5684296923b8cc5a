#include "doctest.h"

#include <cmath>

#include "dicoss/quantize.hpp"
#include "dicoss/rng.hpp"

using namespace dicoss;

namespace {

QuantizerSpec spec_6bit() {
  QuantizerSpec s;
  s.bit_depth = 6;
  s.lower = 0.0;
  s.upper = 6.4;
  return s;
}

}  // namespace

TEST_CASE("quantize: floor indexing and clamping") {
  const QuantizerSpec s = spec_6bit();
  CHECK(quantize(std::vector<double>{0.25}, s).indices[0] == 2);
  CHECK(quantize(std::vector<double>{-1.0}, s).indices[0] == 0);
  CHECK(quantize(std::vector<double>{7.0}, s).indices[0] == 63);
}

TEST_CASE("dequantize_midpoint and the half-step error bound") {
  const QuantizerSpec s = spec_6bit();
  QuantizedMeasurement q;
  q.spec = s;
  q.indices = {2, 0};
  const auto vals = dequantize_midpoint(q);
  CHECK(vals[0] == doctest::Approx(0.25));
  CHECK(vals[1] == doctest::Approx(0.05));

  Rng rng(31);
  for (int it = 0; it < 500; ++it) {
    const double y = rng.uniform(s.lower, s.upper);
    const auto back = dequantize_midpoint(quantize(std::vector<double>{y}, s));
    CHECK(std::fabs(back[0] - y) <= s.step() / 2 + 1e-12);
  }
}

TEST_CASE("spec_for_range covers the data and survives constant vectors") {
  const std::vector<double> v = {1.0, 2.0, 5.0};
  const QuantizerSpec s = spec_for_range(v, 6);
  CHECK(s.lower < 1.0);
  CHECK(s.upper > 5.0);
  CHECK(quantize(v, s).indices[0] >= 0);

  const QuantizerSpec z = spec_for_range(std::vector<double>{0.0, 0.0}, 6);
  CHECK(z.upper > z.lower);
}

TEST_CASE("bit planes: MSB-first decomposition and exact recomposition") {
  QuantizerSpec s;
  s.bit_depth = 3;
  s.lower = 0.0;
  s.upper = 8.0;
  QuantizedMeasurement q;
  q.spec = s;
  q.indices = {5, 2};
  const BitPlanes bp = to_bitplanes(q);
  REQUIRE(bp.planes.size() == 3);
  CHECK(bp.planes[0] == std::vector<std::uint8_t>{1, 0});
  CHECK(bp.planes[1] == std::vector<std::uint8_t>{0, 1});
  CHECK(bp.planes[2] == std::vector<std::uint8_t>{1, 0});
  CHECK(recompose(bp) == q.indices);

  q.indices = {0, 0};
  for (const auto& plane : to_bitplanes(q).planes)
    CHECK(plane == std::vector<std::uint8_t>{0, 0});

  Rng rng(17);
  QuantizedMeasurement r;
  r.spec = spec_6bit();
  r.indices.resize(257);
  for (auto& idx : r.indices) idx = static_cast<std::int32_t>(rng.index(64));
  CHECK(recompose(to_bitplanes(r)) == r.indices);
}

TEST_CASE("multi-hypothesis reconstruction: symmetry, single-weight, range") {
  QuantInterval iv{1.0, 1.1};
  const double mid = 1.05;

  // single SI at the midpoint: truncated Laplacian is symmetric
  LaplacianModel m1{10.0};
  MixtureWeights w1;
  w1.u = {1.0};
  CHECK(reconstruct_multihypothesis(iv, std::vector<double>{mid}, {&m1, 1}, w1) ==
        doctest::Approx(mid).epsilon(1e-12));

  // weights (1, 0): the second hypothesis is ignored exactly
  LaplacianModel models[2] = {{3.0}, {50.0}};
  MixtureWeights w2;
  w2.u = {1.0, 0.0};
  const double both =
      reconstruct_multihypothesis(iv, std::vector<double>{1.02, 1.09}, {models, 2}, w2);
  const double single =
      reconstruct_multihypothesis(iv, std::vector<double>{1.02}, {&models[0], 1}, w1);
  CHECK(both == doctest::Approx(single).epsilon(1e-12));

  // results stay inside [L, U)
  Rng rng(41);
  for (int it = 0; it < 200; ++it) {
    LaplacianModel m{rng.uniform(0.01, 2000.0)};
    const double si = rng.uniform(-5.0, 5.0);
    const double y = reconstruct_multihypothesis(iv, {&si, 1}, {&m, 1}, w1);
    CHECK(y >= iv.lower);
    CHECK(y < iv.upper);
  }
}

TEST_CASE("multi-hypothesis reconstruction: distant SI pushes the mean to the near edge") {
  // closed form: for SI below L the truncated mean sits ~1/alpha above L, so
  // alpha * width = 2000 puts it within 1e-3 of the width (the SI offset is
  // kept small enough that the interval mass stays representable)
  QuantInterval iv{2.0, 2.1};
  const double width = 0.1;
  LaplacianModel m{2000.0 / width};
  MixtureWeights w;
  w.u = {1.0};
  const double si = iv.lower - 0.03;
  const double y = reconstruct_multihypothesis(iv, {&si, 1}, {&m, 1}, w);
  CHECK(y > iv.lower);
  CHECK(std::fabs(y - iv.lower) <= 1e-3 * width);
}

TEST_CASE("multi-hypothesis reconstruction: underflow falls back to the midpoint") {
  QuantInterval iv{0.0, 0.1};
  LaplacianModel m{1e6};
  MixtureWeights w;
  w.u = {1.0};
  const double si = 1e6;  // mass underflows entirely
  CHECK(reconstruct_multihypothesis(iv, {&si, 1}, {&m, 1}, w) == doctest::Approx(0.05));
}

TEST_CASE("multi-hypothesis reconstruction: contract violations") {
  LaplacianModel m{1.0};
  MixtureWeights w;
  w.u = {1.0};
  const double si = 0.0;
  CHECK_THROWS(reconstruct_multihypothesis(QuantInterval{1.0, 1.0}, {&si, 1}, {&m, 1}, w));
  MixtureWeights bad;
  bad.u = {0.7};
  CHECK_THROWS(reconstruct_multihypothesis(QuantInterval{0.0, 1.0}, {&si, 1}, {&m, 1}, bad));
}
