#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dicoss {

// Dense row-major matrix. Small enough at the scales used here that we keep
// everything contiguous and let the compiler vectorize the row dot products.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;  // rows * cols entries, row-major

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double* row(std::size_t r) { return a.data() + r * cols; }
  const double* row(std::size_t r) const { return a.data() + r * cols; }
  double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double norm1(std::span<const double> x);
double max_abs(std::span<const double> x);

// OpenMP kernels parallelize over independent output elements; each element
// is reduced sequentially, so results are bit-identical to the *_serial
// reference variants for any thread count.

void matvec_serial(const Mat& A, std::span<const double> x, std::span<double> out);
void matvec(const Mat& A, std::span<const double> x, std::span<double> out);

// out = A^T x (column dots against the row-major storage)
void matvec_t_serial(const Mat& A, std::span<const double> x, std::span<double> out);
void matvec_t(const Mat& A, std::span<const double> x, std::span<double> out);

// G = A A^T (used for the least-norm preimage in rate control)
Mat gram_rows_serial(const Mat& A);
Mat gram_rows(const Mat& A);

// Solves (G + ridge I) x = b in place via Cholesky; G must be symmetric
// positive semidefinite. Throws std::runtime_error if the factorization
// breaks down even with the ridge.
std::vector<double> spd_solve(Mat G, std::vector<double> b, double ridge);

}  // namespace dicoss
