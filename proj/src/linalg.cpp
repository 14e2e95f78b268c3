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
#include "iadmm/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "iadmm/errors.hpp"

namespace iadmm {

Vec& Vec::operator+=(const Vec& o) {
  assert(o.size() == size());
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

Vec& Vec::operator-=(const Vec& o) {
  assert(o.size() == size());
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

Vec& Vec::operator*=(double s) {
  for (double& e : v_) e *= s;
  return *this;
}

Vec& Vec::axpy(double s, const Vec& o) {
  assert(o.size() == size());
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += s * o.v_[i];
  return *this;
}

Vec operator+(Vec a, const Vec& b) { return a += b; }
Vec operator-(Vec a, const Vec& b) { return a -= b; }
Vec operator*(double s, Vec a) { return a *= s; }
Vec operator*(Vec a, double s) { return a *= s; }
Vec operator/(Vec a, double s) {
  for (double& e : a) e /= s;
  return a;
}

double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) {
  // Scaled to avoid overflow on large perturbed iterates.
  double scale = 0.0;
  for (double e : a) scale = std::max(scale, std::abs(e));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double e : a) {
    const double t = e / scale;
    s += t * t;
  }
  return scale * std::sqrt(s);
}

double distance(const Vec& a, const Vec& b) { return norm(a - b); }

bool all_finite(const Vec& a) {
  return std::all_of(a.begin(), a.end(),
                     [](double e) { return std::isfinite(e); });
}

DenseMatrix::DenseMatrix(
    std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  a_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ValidationError("ragged matrix literal");
    a_.insert(a_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vec DenseMatrix::multiply(const Vec& x) const {
  assert(x.size() == cols_);
  Vec y(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) s += a_[r * cols_ + c] * x[c];
    y[r] = s;
  }
  return y;
}

void DenseMatrix::add_outer(double s, std::span<const double> u,
                            std::span<const double> v) {
  assert(u.size() == rows_ && v.size() == cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) a_[r * cols_ + c] += s * u[r] * v[c];
}

void DenseMatrix::add_diagonal(double s) {
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) (*this)(i, i) += s;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& o) {
  assert(o.rows_ == rows_ && o.cols_ == cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double e : a_) m = std::max(m, std::abs(e));
  return m;
}

namespace {

struct LuFactors {
  DenseMatrix lu;
  std::vector<std::size_t> perm;
};

LuFactors factor(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  LuFactors f{a, std::vector<std::size_t>(n)};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  const double scale = a.max_abs();
  if (scale == 0.0 || !std::isfinite(scale))
    throw NumericalError("solve_dense: zero or non-finite matrix");
  const double tiny = 1e-14 * scale;
  DenseMatrix& m = f.lu;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    if (std::abs(m(piv, col)) <= tiny)
      throw NumericalError("solve_dense: matrix is singular to working "
                           "precision (pivot " +
                           std::to_string(col) + ")");
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m(col, c), m(piv, c));
      std::swap(f.perm[col], f.perm[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double l = m(r, col) / m(col, col);
      m(r, col) = l;
      for (std::size_t c = col + 1; c < n; ++c) m(r, c) -= l * m(col, c);
    }
  }
  return f;
}

Vec substitute(const LuFactors& f, const Vec& b) {
  const std::size_t n = b.size();
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[f.perm[i]];
    for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s / f.lu(i, i);
  }
  return x;
}

}  // namespace

Vec solve_dense(const DenseMatrix& a, const Vec& b) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw ValidationError("solve_dense: dimension mismatch");
  if (!all_finite(b)) throw NumericalError("solve_dense: non-finite rhs");
  const LuFactors f = factor(a);
  Vec x = substitute(f, b);
  // One step of iterative refinement.
  Vec r = b - a.multiply(x);
  x += substitute(f, r);
  r = b - a.multiply(x);
  if (!(norm(r) <= 1e-10 * (1.0 + norm(b))))
    throw NumericalError("solve_dense: ill-conditioned, residual " +
                         std::to_string(norm(r)));
  return x;
}

double largest_eigenvalue_bound(const DenseMatrix& sym) {
  const std::size_t n = sym.rows();
  if (n == 0 || sym.cols() != n)
    throw ValidationError("largest_eigenvalue_bound: need a square matrix");
  if (sym.max_abs() == 0.0) return 0.0;

  auto power = [&](Vec v) {
    v = v / norm(v);
    double mu = 0.0;
    double resid = 0.0;
    for (int it = 0; it < 5000; ++it) {
      Vec av = sym.multiply(v);
      mu = dot(v, av);
      resid = norm(av - mu * v);
      const double nav = norm(av);
      if (nav == 0.0) return 0.0;
      if (resid <= 1e-15 * std::max(1.0, std::abs(mu))) break;
      v = av / nav;
    }
    return mu + resid;
  };

  double best = power(Vec(n, 1.0));
  for (std::size_t i = 0; i < n; ++i) {
    Vec e(n);
    e[i] = 1.0;
    best = std::max(best, power(e));
  }
  return best;
}

void CompensatedSum::add(double v) {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v))
    carry_ += (sum_ - t) + v;
  else
    carry_ += (v - t) + sum_;
  sum_ = t;
}

}  // namespace iadmm
