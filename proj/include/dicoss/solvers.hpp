#pragma once

#include <span>
#include <vector>

#include "dicoss/kernels.hpp"

namespace dicoss {

struct SolverConfig {
  // Effective regularization is lambda when > 0, else
  // lambda_scale * ||Phi^T y||_inf computed per solve.
  double lambda = 0.0;
  double lambda_scale = 1e-3;
  // Weight smoothing for the n-l1 objective. epsilon > 0 is used as is;
  // otherwise epsilon_scale * ||y||_2 / sqrt(m) tracks the per-element
  // measurement scale, which keeps the weight dynamics amplitude-invariant.
  double epsilon = 0.0;
  double epsilon_scale = 1.0;
  std::size_t max_iters = 2000;
  double tol = 1e-5;  // relative-change stop
  std::size_t lipschitz_iters = 100;
};

struct RecoveryResult {
  std::vector<double> solution;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Power iteration on A^T A times a 1.05 safety factor. Throws on the zero
// matrix.
double estimate_lipschitz(const Mat& A, std::size_t iters = 100);

// min 0.5 ||Phi x - y||^2 + lambda ||x||_1 via FISTA; x0 optionally warm
// starts both iterates.
RecoveryResult solve_l1(std::span<const double> y, const Mat& phi, const SolverConfig& cfg,
                        std::span<const double> x0 = {});

// Block system of the joint sparsity model: unknowns [x_c; z_1; ...; z_J],
// row block j equal to [Phi_j, 0, ..., Phi_j, ..., 0]. Applied as an
// operator through the J per-source matrices; never materialized.
struct StackedSystem {
  std::size_t n = 0;
  std::vector<const Mat*> blocks;  // views into caller-owned matrices
  std::vector<double> rhs;         // concatenated measurements
  std::vector<std::size_t> row_offset;
  std::size_t total_rows = 0;

  std::size_t unknowns() const { return (blocks.size() + 1) * n; }
  void apply(std::span<const double> xprime, std::span<double> out) const;
  void apply_t(std::span<const double> r, std::span<double> out) const;
};

StackedSystem build_stacked(const std::vector<const Mat*>& mats,
                            const std::vector<std::vector<double>>& ys);

double estimate_lipschitz_stacked(const StackedSystem& sys, std::size_t iters = 100);

struct JsmResult {
  std::vector<double> stacked;  // [x_c; z_1; ...; z_J]
  std::vector<RecoveryResult> per_source;
};

// Solves min 0.5 ||Phi' x' - y'||^2 + lambda ||x'||_1 and recomposes
// x_j = x_c + z_j. warm optionally seeds the stacked iterate.
JsmResult solve_jsm(const StackedSystem& sys, const SolverConfig& cfg,
                    std::span<const double> warm = {});

}  // namespace dicoss
