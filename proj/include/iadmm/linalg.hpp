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
// Small dense linear algebra: p-dimensional vectors and square solves.
// Everything here is sized for p <= 16; no blocking, no BLAS.
#ifndef IADMM_LINALG_HPP_
#define IADMM_LINALG_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace iadmm {

class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t n, double fill = 0.0) : v_(n, fill) {}
  Vec(std::initializer_list<double> init) : v_(init) {}
  explicit Vec(std::span<const double> values)
      : v_(values.begin(), values.end()) {}

  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  auto begin() { return v_.begin(); }
  auto end() { return v_.end(); }
  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }
  std::span<const double> span() const { return v_; }

  Vec& operator+=(const Vec& o);
  Vec& operator-=(const Vec& o);
  Vec& operator*=(double s);
  // this += s * o
  Vec& axpy(double s, const Vec& o);

  // Bitwise-style equality (exact doubles); used by reproducibility checks.
  bool operator==(const Vec& o) const = default;

 private:
  std::vector<double> v_;
};

Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator*(double s, Vec a);
Vec operator*(Vec a, double s);
Vec operator/(Vec a, double s);

double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
double distance(const Vec& a, const Vec& b);
bool all_finite(const Vec& a);

// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return a_[r * cols_ + c];
  }

  Vec multiply(const Vec& x) const;
  // A += s * u v^T
  void add_outer(double s, std::span<const double> u, std::span<const double> v);
  void add_diagonal(double s);
  DenseMatrix& operator+=(const DenseMatrix& o);
  double max_abs() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

// Partial-pivot LU solve of a square system. Throws NumericalError when the
// matrix is singular to working precision or the solution fails the
// residual check ||Ax - b|| <= 1e-10 (1 + ||b||).
Vec solve_dense(const DenseMatrix& a, const Vec& b);

// Upper estimate of the largest eigenvalue of a symmetric positive
// semidefinite matrix: power iteration from several starts, each result
// inflated by its eigen-residual.
double largest_eigenvalue_bound(const DenseMatrix& sym);

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace iadmm

#endif  // IADMM_LINALG_HPP_
