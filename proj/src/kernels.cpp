#include "dicoss/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace dicoss {

namespace {
// Below this many multiply-adds the OpenMP fork/join overhead dominates.
constexpr std::size_t kParallelCutoff = 1u << 15;
}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double norm1(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::fabs(v);
  return s;
}

double max_abs(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s = std::max(s, std::fabs(v));
  return s;
}

void matvec_serial(const Mat& A, std::span<const double> x, std::span<double> out) {
  for (std::size_t r = 0; r < A.rows; ++r)
    out[r] = dot({A.row(r), A.cols}, x);
}

void matvec(const Mat& A, std::span<const double> x, std::span<double> out) {
  const std::int64_t rows = static_cast<std::int64_t>(A.rows);
#pragma omp parallel for schedule(static) if (A.rows * A.cols > kParallelCutoff)
  for (std::int64_t r = 0; r < rows; ++r)
    out[static_cast<std::size_t>(r)] =
        dot({A.row(static_cast<std::size_t>(r)), A.cols}, x);
}

void matvec_t_serial(const Mat& A, std::span<const double> x, std::span<double> out) {
  for (std::size_t c = 0; c < A.cols; ++c) {
    double s = 0.0;
    const double* col = A.a.data() + c;
    for (std::size_t r = 0; r < A.rows; ++r) s += col[r * A.cols] * x[r];
    out[c] = s;
  }
}

void matvec_t(const Mat& A, std::span<const double> x, std::span<double> out) {
  const std::int64_t cols = static_cast<std::int64_t>(A.cols);
#pragma omp parallel for schedule(static) if (A.rows * A.cols > kParallelCutoff)
  for (std::int64_t c = 0; c < cols; ++c) {
    double s = 0.0;
    const double* col = A.a.data() + static_cast<std::size_t>(c);
    for (std::size_t r = 0; r < A.rows; ++r) s += col[r * A.cols] * x[r];
    out[static_cast<std::size_t>(c)] = s;
  }
}

Mat gram_rows_serial(const Mat& A) {
  Mat G(A.rows, A.rows);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = i; j < A.rows; ++j) {
      double s = dot({A.row(i), A.cols}, {A.row(j), A.cols});
      G.at(i, j) = s;
      G.at(j, i) = s;
    }
  return G;
}

Mat gram_rows(const Mat& A) {
  Mat G(A.rows, A.rows);
  const std::int64_t rows = static_cast<std::int64_t>(A.rows);
#pragma omp parallel for schedule(dynamic, 4) if (A.rows * A.rows * A.cols > kParallelCutoff)
  for (std::int64_t i = 0; i < rows; ++i) {
    const std::size_t ii = static_cast<std::size_t>(i);
    for (std::size_t j = ii; j < A.rows; ++j) {
      double s = dot({A.row(ii), A.cols}, {A.row(j), A.cols});
      G.at(ii, j) = s;
      G.at(j, ii) = s;
    }
  }
  return G;
}

std::vector<double> spd_solve(Mat G, std::vector<double> b, double ridge) {
  const std::size_t n = G.rows;
  if (n != G.cols || b.size() != n) throw std::invalid_argument("spd_solve: shape mismatch");
  for (std::size_t i = 0; i < n; ++i) G.at(i, i) += ridge;

  // In-place Cholesky G = L L^T.
  for (std::size_t j = 0; j < n; ++j) {
    double d = G.at(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= G.at(j, k) * G.at(j, k);
    if (d <= 0.0) throw std::runtime_error("spd_solve: matrix not positive definite");
    d = std::sqrt(d);
    G.at(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = G.at(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= G.at(i, k) * G.at(j, k);
      G.at(i, j) = s / d;
    }
  }
  // Forward then backward substitution.
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= G.at(i, k) * b[k];
    b[i] = s / G.at(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= G.at(k, ii) * b[k];
    b[ii] = s / G.at(ii, ii);
  }
  return b;
}

}  // namespace dicoss
