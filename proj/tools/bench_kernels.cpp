// Times the OpenMP kernels against their serial reference implementations
// and reports the speedup. The parallel variants must stay bit-identical to
// the serial ones (tested in the unit suite); this target tracks whether
// they also pay off.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dicoss/kernels.hpp"
#include "dicoss/ramis.hpp"
#include "dicoss/rng.hpp"
#include "dicoss/sensing.hpp"
#include "dicoss/solvers.hpp"

namespace {

using namespace dicoss;
using Clock = std::chrono::steady_clock;

double time_ms(int reps, const auto& fn) {
  fn();  // warm-up
  const auto t0 = Clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-24s serial %9.3f ms   parallel %9.3f ms   speedup %.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel variants run serially\n");
#endif

  const std::size_t m = 600, n = 4000;
  const Mat A = make_matrix(m, n, 42).entries;
  Rng rng(7);
  std::vector<double> x(n), y(m), out_m(m), out_n(n);
  for (double& v : x) v = rng.gaussian();
  for (double& v : y) v = rng.gaussian();

  report("matvec (600x4000)", time_ms(200, [&] { matvec_serial(A, x, out_m); }),
         time_ms(200, [&] { matvec(A, x, out_m); }));
  report("matvec_t (600x4000)", time_ms(200, [&] { matvec_t_serial(A, y, out_n); }),
         time_ms(200, [&] { matvec_t(A, y, out_n); }));

  const Mat G_src = make_matrix(256, 2000, 43).entries;
  report("gram_rows (256x2000)", time_ms(5, [&] { gram_rows_serial(G_src); }),
         time_ms(5, [&] { gram_rows(G_src); }));

  // prox pass over a full iterate with four SI signals
  SiSet si = SiSet::with_zero(n);
  for (int p = 0; p < 3; ++p) {
    std::vector<double> s(n);
    for (double& v : s) v = rng.gaussian();
    si.add(std::move(s));
  }
  WeightState ws = WeightState::initial(n, si.count());
  for (std::size_t p = 0; p < si.count(); ++p) ws.w[p] = intra_weights(x, si.signals[p], 1e-3);
  ws.beta = inter_weights(x, si, ws, 1e-3);
  std::vector<double> prox_out(n);
  const auto serial_prox = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      std::array<double, 4> bp{}, cf{};
      for (std::size_t p = 0; p < si.count(); ++p) {
        bp[p] = si.signals[p][i];
        cf[p] = 0.01 * ws.beta[p] * ws.w[p][i];
      }
      prox_out[i] = prox_weighted_nl1_scalar(x[i], {bp.data(), si.count()}, {cf.data(), si.count()});
    }
  };
  report("prox pass (n=4000,P=4)", time_ms(200, serial_prox),
         time_ms(200, [&] { prox_weighted_nl1(x, si, ws, 0.01, prox_out); }));

  return 0;
}
