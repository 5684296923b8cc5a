#include "dicoss/correlation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dicoss {

SoftInput bitplane_llrs(int plane, std::span<const std::int32_t> prefix,
                        const QuantizerSpec& spec,
                        const std::vector<std::vector<double>>& si_values,
                        std::span<const LaplacianModel> models, const MixtureWeights& weights) {
  const int b_total = spec.bit_depth;
  if (plane < 0 || plane >= b_total) throw std::invalid_argument("bitplane_llrs: bad plane index");
  const std::size_t n_hyp = si_values.size();
  if (n_hyp != models.size() || n_hyp != weights.u.size() || n_hyp == 0)
    throw std::invalid_argument("bitplane_llrs: hypothesis list mismatch");
  const std::size_t m = prefix.size();
  for (const auto& v : si_values)
    if (v.size() != m) throw std::invalid_argument("bitplane_llrs: si length mismatch");

  const std::int32_t group = 1 << (b_total - plane);  // cells consistent with the prefix
  const std::int32_t half = group >> 1;
  const double step = spec.step();
  const double inf = std::numeric_limits<double>::infinity();

  SoftInput soft;
  soft.llrs.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::int32_t pre = prefix[i];
    if (pre < 0 || pre >= (1 << plane) || (plane == 0 && pre != 0))
      throw std::invalid_argument("bitplane_llrs: inconsistent prefix");
    const std::int32_t cell0 = pre * group;
    const double lo_edge = (cell0 == 0) ? -inf : spec.lower + cell0 * step;
    const double mid = spec.lower + (cell0 + half) * step;
    const double hi_edge =
        (cell0 + group == spec.levels()) ? inf : spec.lower + (cell0 + group) * step;

    double p0 = 0.0, p1 = 0.0, lean = 0.0;
    for (std::size_t p = 0; p < n_hyp; ++p) {
      const double mu = si_values[p][i];
      const double alpha = models[p].alpha;
      p0 += weights.u[p] * laplace_mass(lo_edge, mid, mu, alpha);
      p1 += weights.u[p] * laplace_mass(mid, hi_edge, mu, alpha);
      lean += weights.u[p] * (mu < mid ? 1.0 : -1.0);
    }
    double llr;
    if (p0 + p1 < 1e-300) {
      // entire prefix region has underflowed: keep only the side preference
      llr = (lean > 0.0) ? kLlrClamp : (lean < 0.0 ? -kLlrClamp : 0.0);
    } else if (p1 <= 0.0) {
      llr = kLlrClamp;
    } else if (p0 <= 0.0) {
      llr = -kLlrClamp;
    } else {
      llr = std::log(p0 / p1);
      if (llr > kLlrClamp) llr = kLlrClamp;
      if (llr < -kLlrClamp) llr = -kLlrClamp;
    }
    soft.llrs[i] = llr;
  }
  return soft;
}

}  // namespace dicoss
