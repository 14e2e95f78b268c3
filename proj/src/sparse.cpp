// Copyright 2026 The iadmm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#include "iadmm/sparse.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "iadmm/errors.hpp"

namespace iadmm {

namespace {

// Rows below this size are not worth a parallel region.
constexpr std::ptrdiff_t kParallelThreshold = 2048;

double norm2(std::span<const double> v) {
  double scale = 0.0;
  for (double e : v) scale = std::max(scale, std::abs(e));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double e : v) {
    const double t = e / scale;
    s += t * t;
  }
  return scale * std::sqrt(s);
}

void scale_in_place(std::span<double> v, double s) {
  for (double& e : v) e *= s;
}

// Builds compressed arrays keyed by `major` with duplicates summed.
void compress(std::size_t n_major, std::span<const Triplet> t, bool by_row,
              std::vector<std::size_t>& ptr, std::vector<std::size_t>& idx,
              std::vector<double>& vals) {
  std::vector<std::size_t> order(t.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) {
    return by_row ? std::pair{t[i].row, t[i].col} : std::pair{t[i].col, t[i].row};
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  ptr.assign(n_major + 1, 0);
  idx.clear();
  vals.clear();
  std::size_t last_major = static_cast<std::size_t>(-1);
  std::size_t last_minor = static_cast<std::size_t>(-1);
  for (std::size_t i : order) {
    const auto [major, minor] = key(i);
    if (major == last_major && minor == last_minor) {
      vals.back() += t[i].value;
      continue;
    }
    idx.push_back(minor);
    vals.push_back(t[i].value);
    ++ptr[major + 1];
    last_major = major;
    last_minor = minor;
  }
  for (std::size_t m = 0; m < n_major; ++m) ptr[m + 1] += ptr[m];
}

}  // namespace

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols,
                           std::span<const Triplet> triplets)
    : rows_(rows), cols_(cols) {
  for (const Triplet& t : triplets) {
    if (t.row >= rows || t.col >= cols)
      throw ValidationError("sparse triplet out of range");
    if (!std::isfinite(t.value))
      throw ValidationError("sparse triplet is not finite");
  }
  compress(rows, triplets, true, row_ptr_, row_idx_, row_vals_);
  compress(cols, triplets, false, col_ptr_, col_idx_, col_vals_);
}

void SparseMatrix::multiply(std::span<const double> x,
                            std::span<double> y) const {
  assert(x.size() == cols_ && y.size() == rows_);
  const auto n = static_cast<std::ptrdiff_t>(rows_);
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
      s += row_vals_[p] * x[row_idx_[p]];
    y[r] = s;
  }
}

void SparseMatrix::multiply_serial(std::span<const double> x,
                                   std::span<double> y) const {
  assert(x.size() == cols_ && y.size() == rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
      s += row_vals_[p] * x[row_idx_[p]];
    y[r] = s;
  }
}

void SparseMatrix::multiply_transpose(std::span<const double> y,
                                      std::span<double> x) const {
  assert(y.size() == rows_ && x.size() == cols_);
  const auto n = static_cast<std::ptrdiff_t>(cols_);
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (std::ptrdiff_t c = 0; c < n; ++c) {
    double s = 0.0;
    for (std::size_t p = col_ptr_[c]; p < col_ptr_[c + 1]; ++p)
      s += col_vals_[p] * y[col_idx_[p]];
    x[c] = s;
  }
}

void SparseMatrix::multiply_transpose_serial(std::span<const double> y,
                                             std::span<double> x) const {
  assert(y.size() == rows_ && x.size() == cols_);
  for (std::size_t c = 0; c < cols_; ++c) {
    double s = 0.0;
    for (std::size_t p = col_ptr_[c]; p < col_ptr_[c + 1]; ++p)
      s += col_vals_[p] * y[col_idx_[p]];
    x[c] = s;
  }
}

void SparseMatrix::multiply_transpose_scatter(std::span<const double> y,
                                              std::span<double> x) const {
  assert(y.size() == rows_ && x.size() == cols_);
  std::fill(x.begin(), x.end(), 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
      x[row_idx_[p]] += row_vals_[p] * y[r];
}

double SparseMatrix::frobenius_norm() const { return norm2(row_vals_); }

SparseMatrix assemble(const SparseSystem& system) {
  return SparseMatrix(system.rows, system.cols, system.triplets);
}

LsqrResult lsqr(const SparseMatrix& a, std::span<const double> b, double tol,
                long max_iter) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m == 0 || n == 0) throw ValidationError("lsqr: empty system");
  if (b.size() != m) throw ValidationError("lsqr: rhs length mismatch");
  if (!(tol > 0.0)) throw ValidationError("lsqr: tol must be positive");
  if (max_iter <= 0) max_iter = 10 * static_cast<long>(m + n);

  LsqrResult out;
  out.solution.assign(n, 0.0);
  std::vector<double>& x = out.solution;

  std::vector<double> u(b.begin(), b.end());
  std::vector<double> v(n), w(n), tmp_m(m), tmp_n(n);

  double beta = norm2(u);
  const double bnorm = beta;
  out.residual_history.push_back(beta);
  if (beta == 0.0) {
    out.converged = true;
    return out;
  }
  scale_in_place(u, 1.0 / beta);
  a.multiply_transpose(u, v);
  double alpha = norm2(v);
  if (alpha == 0.0) {
    // b is orthogonal to range(A): x = 0 already minimizes ||Ax - b||.
    out.residual_norm = bnorm;
    out.converged = true;
    return out;
  }
  scale_in_place(v, 1.0 / alpha);
  w = v;

  double phibar = beta;
  double rhobar = alpha;
  double anorm_sq = 0.0;
  double xnorm = 0.0;

  for (long it = 1; it <= max_iter; ++it) {
    // Bidiagonalization step.
    a.multiply(v, tmp_m);
    for (std::size_t i = 0; i < m; ++i) u[i] = tmp_m[i] - alpha * u[i];
    beta = norm2(u);
    if (beta > 0.0) scale_in_place(u, 1.0 / beta);
    anorm_sq += alpha * alpha + beta * beta;

    a.multiply_transpose(u, tmp_n);
    for (std::size_t j = 0; j < n; ++j) v[j] = tmp_n[j] - beta * v[j];
    alpha = norm2(v);
    if (alpha > 0.0) scale_in_place(v, 1.0 / alpha);

    // Plane rotation eliminating the subdiagonal beta.
    const double rho = std::hypot(rhobar, beta);
    const double c = rhobar / rho;
    const double s = beta / rho;
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;

    const double t1 = phi / rho;
    const double t2 = -theta / rho;
    for (std::size_t j = 0; j < n; ++j) {
      x[j] += t1 * w[j];
      w[j] = v[j] + t2 * w[j];
    }
    xnorm = norm2(x);

    out.iterations = it;
    out.residual_history.push_back(phibar);

    const double anorm = std::sqrt(anorm_sq);
    const double rnorm = phibar;
    const double arnorm = phibar * alpha * std::abs(c);
    const bool consistent_stop = rnorm <= tol * (bnorm + anorm * xnorm);
    const bool ls_stop = anorm * rnorm > 0.0 && arnorm <= tol * anorm * rnorm;
    if (consistent_stop || ls_stop || alpha == 0.0) {
      out.converged = true;
      break;
    }
  }

  a.multiply(x, tmp_m);
  for (std::size_t i = 0; i < m; ++i) tmp_m[i] -= b[i];
  out.residual_norm = norm2(tmp_m);
  return out;
}

LsqrResult lsqr(const SparseSystem& system, double tol, long max_iter) {
  return lsqr(assemble(system), system.rhs, tol, max_iter);
}

}  // namespace iadmm
