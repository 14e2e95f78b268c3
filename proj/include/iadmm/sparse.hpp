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
// Sparse rectangular systems and the LSQR least-squares solver.
//
// The mat-vec kernels come in two flavours: an OpenMP version used by the
// solver and a plain serial version kept as the reference the parallel one is
// tested against. Both produce bit-identical output (each output entry is
// accumulated by exactly one thread in the same order).
#ifndef IADMM_SPARSE_HPP_
#define IADMM_SPARSE_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace iadmm {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// A x = b in coordinate form. Duplicate (row, col) entries are summed when
// the matrix is assembled.
struct SparseSystem {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Triplet> triplets;
  std::vector<double> rhs;

  void add(std::size_t r, std::size_t c, double v) {
    triplets.push_back({r, c, v});
  }
};

// Compressed storage kept in both row (CSR) and column (CSC) orientation so
// that A x and A^T y are both gather loops.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols,
               std::span<const Triplet> triplets);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return row_vals_.size(); }

  // y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  void multiply_serial(std::span<const double> x, std::span<double> y) const;
  // x = A^T y
  void multiply_transpose(std::span<const double> y, std::span<double> x) const;
  void multiply_transpose_serial(std::span<const double> y,
                                 std::span<double> x) const;

  // Scatter form of A^T y over the CSR arrays; independent of the CSC copy.
  void multiply_transpose_scatter(std::span<const double> y,
                                  std::span<double> x) const;

  double frobenius_norm() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_, row_idx_;
  std::vector<double> row_vals_;
  std::vector<std::size_t> col_ptr_, col_idx_;
  std::vector<double> col_vals_;
};

SparseMatrix assemble(const SparseSystem& system);

struct LsqrResult {
  std::vector<double> solution;
  double residual_norm = 0.0;  // ||A x - b|| recomputed at exit
  long iterations = 0;
  bool converged = false;
  // LSQR's running estimate of ||r_k||, one entry per iteration (index 0 is
  // ||b||). Non-increasing by construction of the method.
  std::vector<double> residual_history;
};

inline constexpr double kLsqrDefaultTol = 1e-10;

// Paige-Saunders LSQR from x0 = 0. Stops when ||r|| <= tol (||b|| + ||A|| ||x||)
// or ||A^T r|| <= tol ||A|| ||r||. max_iter <= 0 selects 10 (rows + cols).
// Non-convergence is not an error: the last iterate is returned with
// converged = false.
LsqrResult lsqr(const SparseMatrix& a, std::span<const double> b,
                double tol = kLsqrDefaultTol, long max_iter = 0);
LsqrResult lsqr(const SparseSystem& system, double tol = kLsqrDefaultTol,
                long max_iter = 0);

}  // namespace iadmm

#endif  // IADMM_SPARSE_HPP_
