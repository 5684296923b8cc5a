#include "dicoss/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dicoss {

namespace {

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Matrix and stacked-system adapters share one FISTA core.
struct MatOp {
  const Mat& A;
  std::size_t rows() const { return A.rows; }
  std::size_t cols() const { return A.cols; }
  void apply(std::span<const double> x, std::span<double> out) const { matvec(A, x, out); }
  void apply_t(std::span<const double> x, std::span<double> out) const { matvec_t(A, x, out); }
};

struct StackedOp {
  const StackedSystem& s;
  std::size_t rows() const { return s.total_rows; }
  std::size_t cols() const { return s.unknowns(); }
  void apply(std::span<const double> x, std::span<double> out) const { s.apply(x, out); }
  void apply_t(std::span<const double> x, std::span<double> out) const { s.apply_t(x, out); }
};

template <class Op>
double power_iteration(const Op& op, std::size_t iters) {
  const std::size_t n = op.cols();
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> av(op.rows()), w(n);
  double lambda = 0.0;
  iters = std::max<std::size_t>(iters, 100);
  for (std::size_t it = 0; it < iters; ++it) {
    op.apply(v, av);
    op.apply_t(av, w);
    lambda = norm2(w);
    if (lambda == 0.0) throw std::invalid_argument("estimate_lipschitz: zero matrix");
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / lambda;
  }
  return 1.05 * lambda;
}

template <class Op>
double effective_lambda(const Op& op, std::span<const double> y, const SolverConfig& cfg) {
  if (cfg.lambda > 0.0) return cfg.lambda;
  std::vector<double> g(op.cols());
  op.apply_t(y, g);
  const double scale = max_abs(g);
  return scale > 0.0 ? cfg.lambda_scale * scale : cfg.lambda_scale;
}

template <class Op>
RecoveryResult fista_l1(const Op& op, std::span<const double> y, const SolverConfig& cfg,
                        std::span<const double> x0, double lipschitz) {
  const std::size_t n = op.cols();
  const std::size_t m = op.rows();
  if (y.size() != m) throw std::invalid_argument("solve: dimension mismatch");

  const double lambda = effective_lambda(op, y, cfg);
  const double gamma = lambda / lipschitz;

  std::vector<double> x(n, 0.0), x_prev(n, 0.0), u(n, 0.0);
  if (!x0.empty()) {
    if (x0.size() != n) throw std::invalid_argument("solve: warm start dimension mismatch");
    std::copy(x0.begin(), x0.end(), x.begin());
    x_prev = x;
    u = x;
  }
  std::vector<double> resid(m), grad(n);

  double t = 1.0;
  std::size_t iters = 0;
  bool converged = false;
  for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
    iters = k;
    op.apply(u, resid);
    for (std::size_t i = 0; i < m; ++i) resid[i] -= y[i];
    op.apply_t(resid, grad);
    double dn = 0.0, xn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = soft_threshold(u[i] - grad[i] / lipschitz, gamma);
      const double d = xi - x_prev[i];
      dn += d * d;
      xn += xi * xi;
      x[i] = xi;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double mom = (t - 1.0) / t_next;
    for (std::size_t i = 0; i < n; ++i) u[i] = x[i] + mom * (x[i] - x_prev[i]);
    t = t_next;
    std::swap(x_prev, x);
    if (std::sqrt(dn) <= cfg.tol * std::max(std::sqrt(xn), 1e-12)) {
      converged = true;
      break;
    }
  }
  // x_prev holds the latest iterate after the swap
  RecoveryResult res;
  res.solution = std::move(x_prev);
  res.iterations = iters;
  res.converged = converged;
  op.apply(res.solution, resid);
  double fit = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = resid[i] - y[i];
    fit += d * d;
  }
  res.objective = 0.5 * fit + lambda * norm1(res.solution);
  return res;
}

}  // namespace

double estimate_lipschitz(const Mat& A, std::size_t iters) {
  if (A.rows == 0 || A.cols == 0) throw std::invalid_argument("estimate_lipschitz: empty matrix");
  return power_iteration(MatOp{A}, iters);
}

RecoveryResult solve_l1(std::span<const double> y, const Mat& phi, const SolverConfig& cfg,
                        std::span<const double> x0) {
  const double L = estimate_lipschitz(phi, cfg.lipschitz_iters);
  return fista_l1(MatOp{phi}, y, cfg, x0, L);
}

void StackedSystem::apply(std::span<const double> xprime, std::span<double> out) const {
  const std::size_t J = blocks.size();
  std::vector<double> combined(n);
  for (std::size_t j = 0; j < J; ++j) {
    const double* xc = xprime.data();
    const double* zj = xprime.data() + (j + 1) * n;
    for (std::size_t i = 0; i < n; ++i) combined[i] = xc[i] + zj[i];
    matvec(*blocks[j], combined, out.subspan(row_offset[j], blocks[j]->rows));
  }
}

void StackedSystem::apply_t(std::span<const double> r, std::span<double> out) const {
  const std::size_t J = blocks.size();
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    auto zj = out.subspan((j + 1) * n, n);
    matvec_t(*blocks[j], r.subspan(row_offset[j], blocks[j]->rows), zj);
    for (std::size_t i = 0; i < n; ++i) out[i] += zj[i];
  }
}

StackedSystem build_stacked(const std::vector<const Mat*>& mats,
                            const std::vector<std::vector<double>>& ys) {
  if (mats.empty() || mats.size() != ys.size())
    throw std::invalid_argument("build_stacked: need one measurement per matrix");
  StackedSystem sys;
  sys.n = mats[0]->cols;
  sys.blocks = mats;
  for (std::size_t j = 0; j < mats.size(); ++j) {
    if (mats[j]->cols != sys.n) throw std::invalid_argument("build_stacked: inconsistent n");
    if (mats[j]->rows != ys[j].size())
      throw std::invalid_argument("build_stacked: measurement length mismatch");
    sys.row_offset.push_back(sys.total_rows);
    sys.total_rows += mats[j]->rows;
    sys.rhs.insert(sys.rhs.end(), ys[j].begin(), ys[j].end());
  }
  return sys;
}

double estimate_lipschitz_stacked(const StackedSystem& sys, std::size_t iters) {
  return power_iteration(StackedOp{sys}, iters);
}

JsmResult solve_jsm(const StackedSystem& sys, const SolverConfig& cfg,
                    std::span<const double> warm) {
  const double L = estimate_lipschitz_stacked(sys, cfg.lipschitz_iters);
  RecoveryResult joint = fista_l1(StackedOp{sys}, sys.rhs, cfg, warm, L);

  JsmResult out;
  out.stacked = joint.solution;
  const std::size_t J = sys.blocks.size();
  out.per_source.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    RecoveryResult r;
    r.solution.resize(sys.n);
    for (std::size_t i = 0; i < sys.n; ++i)
      r.solution[i] = out.stacked[i] + out.stacked[(j + 1) * sys.n + i];
    r.objective = joint.objective;
    r.iterations = joint.iterations;
    r.converged = joint.converged;
    out.per_source[j] = std::move(r);
  }
  return out;
}

}  // namespace dicoss
