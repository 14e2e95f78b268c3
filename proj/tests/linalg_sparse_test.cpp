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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "iadmm/errors.hpp"
#include "iadmm/linalg.hpp"
#include "iadmm/sparse.hpp"

namespace iadmm {
namespace {

TEST(Linalg, SolveDenseHandWorkedSystem) {
  // 2x + y = 5, x + 3y = 10  ->  x = 1, y = 3
  const DenseMatrix a{{2.0, 1.0}, {1.0, 3.0}};
  const Vec x = solve_dense(a, Vec{5.0, 10.0});
  EXPECT_NEAR(x[0], 1.0, 1e-14);
  EXPECT_NEAR(x[1], 3.0, 1e-14);
}

TEST(Linalg, SolveDenseNeedsPivoting) {
  // Zero leading entry; without row exchange this divides by zero.
  const DenseMatrix a{{0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 4.0}};
  const Vec x = solve_dense(a, Vec{2.0, 3.0, 8.0});
  EXPECT_DOUBLE_EQ(x[0], 3.0);
  EXPECT_DOUBLE_EQ(x[1], 2.0);
  EXPECT_DOUBLE_EQ(x[2], 2.0);
}

TEST(Linalg, SolveDenseRejectsSingular) {
  const DenseMatrix a{{1.0, 2.0}, {2.0, 4.0}};
  EXPECT_THROW(solve_dense(a, Vec{1.0, 2.0}), NumericalError);
}

TEST(Linalg, LargestEigenvalueBoundIsTightAndAbove) {
  // Eigenvalues of [[2,1],[1,2]] are 1 and 3.
  const DenseMatrix a{{2.0, 1.0}, {1.0, 2.0}};
  const double lam = largest_eigenvalue_bound(a);
  EXPECT_GE(lam, 3.0);
  EXPECT_LE(lam, 3.0 * (1.0 + 1e-9));

  DenseMatrix d(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = 9.0;
  d(2, 2) = 4.0;
  EXPECT_GE(largest_eigenvalue_bound(d), 9.0);
  EXPECT_LE(largest_eigenvalue_bound(d), 9.0 * (1.0 + 1e-9));
}

TEST(Linalg, CompensatedSumKeepsSmallTerms) {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 10; ++i) s.add(1e-16);
  s.add(-1.0);
  EXPECT_NEAR(s.value(), 1e-15, 1e-30);
}

TEST(Linalg, VecArithmetic) {
  const Vec a{3.0, 4.0};
  EXPECT_DOUBLE_EQ(norm(a), 5.0);
  EXPECT_DOUBLE_EQ(dot(a, Vec{1.0, -1.0}), -1.0);
  EXPECT_DOUBLE_EQ(distance(a, Vec{0.0, 0.0}), 5.0);
  Vec b = a;
  b.axpy(2.0, Vec{1.0, 1.0});
  EXPECT_EQ(b, (Vec{5.0, 6.0}));
  EXPECT_FALSE(all_finite(Vec{1.0, std::nan("")}));
}

SparseSystem random_system(std::size_t rows, std::size_t cols, double density,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution keep(density);
  SparseSystem s;
  s.rows = rows;
  s.cols = cols;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (keep(rng)) s.add(r, c, u(rng));
  s.rhs.assign(rows, 0.0);
  return s;
}

TEST(Sparse, DuplicatesAreSummed) {
  SparseSystem s;
  s.rows = 2;
  s.cols = 2;
  s.add(0, 1, 1.5);
  s.add(0, 1, 2.5);
  s.add(1, 0, -1.0);
  const SparseMatrix a = assemble(s);
  EXPECT_EQ(a.nonzeros(), 2u);
  std::vector<double> y(2);
  a.multiply(std::vector<double>{1.0, 1.0}, y);
  EXPECT_DOUBLE_EQ(y[0], 4.0);
  EXPECT_DOUBLE_EQ(y[1], -1.0);
}

TEST(Sparse, ParallelKernelsMatchSerialBitForBit) {
  const SparseSystem s = random_system(300, 170, 0.05, 7);
  const SparseMatrix a = assemble(s);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  std::vector<double> x(170), y(300);
  for (double& v : x) v = n01(rng);
  for (double& v : y) v = n01(rng);

  std::vector<double> ax(300), ax_ref(300);
  a.multiply(x, ax);
  a.multiply_serial(x, ax_ref);
  EXPECT_EQ(ax, ax_ref);

  std::vector<double> aty(170), aty_ref(170), aty_scatter(170);
  a.multiply_transpose(y, aty);
  a.multiply_transpose_serial(y, aty_ref);
  a.multiply_transpose_scatter(y, aty_scatter);
  EXPECT_EQ(aty, aty_ref);
  for (std::size_t i = 0; i < aty.size(); ++i)
    EXPECT_NEAR(aty[i], aty_scatter[i], 1e-13);
}

TEST(Sparse, TransposeIsAdjoint) {
  const SparseMatrix a = assemble(random_system(40, 25, 0.2, 11));
  std::vector<double> x(25, 0.0), y(40, 0.0), ax(40), aty(25);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(1.0 + i);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::cos(2.0 * i);
  a.multiply(x, ax);
  a.multiply_transpose(y, aty);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) lhs += y[i] * ax[i];
  for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * aty[i];
  EXPECT_NEAR(lhs, rhs, 1e-12);
}

TEST(Lsqr, RecoversPlantedSolutionOfOverdeterminedSystem) {
  SparseSystem s = random_system(200, 50, 0.3, 5);
  for (std::size_t c = 0; c < 50; ++c) s.add(c, c, 3.0);  // full column rank
  std::vector<double> planted(50);
  for (std::size_t c = 0; c < planted.size(); ++c) planted[c] = 1.0 + 0.1 * c;
  const SparseMatrix a = assemble(s);
  a.multiply_serial(planted, s.rhs);

  const LsqrResult r = lsqr(s);
  EXPECT_TRUE(r.converged);
  for (std::size_t c = 0; c < planted.size(); ++c)
    EXPECT_NEAR(r.solution[c], planted[c], 1e-8);
}

TEST(Lsqr, ResidualEstimateNeverIncreases) {
  SparseSystem s = random_system(120, 80, 0.1, 9);
  for (std::size_t r = 0; r < s.rows; ++r) s.rhs[r] = std::sin(0.3 * r);
  const LsqrResult r = lsqr(s);
  ASSERT_GE(r.residual_history.size(), 2u);
  for (std::size_t i = 1; i < r.residual_history.size(); ++i)
    EXPECT_LE(r.residual_history[i], r.residual_history[i - 1] * (1 + 1e-12));
}

TEST(Lsqr, UnderdeterminedGivesMinimumNorm) {
  // x1 + x2 = 2 has minimum-norm solution (1, 1).
  SparseSystem s;
  s.rows = 1;
  s.cols = 2;
  s.add(0, 0, 1.0);
  s.add(0, 1, 1.0);
  s.rhs = {2.0};
  const LsqrResult r = lsqr(s);
  EXPECT_NEAR(r.solution[0], 1.0, 1e-12);
  EXPECT_NEAR(r.solution[1], 1.0, 1e-12);
}

TEST(Lsqr, ZeroRightHandSide) {
  SparseSystem s = random_system(10, 10, 0.5, 2);
  const LsqrResult r = lsqr(s);
  EXPECT_TRUE(r.converged);
  for (double v : r.solution) EXPECT_EQ(v, 0.0);
}

TEST(Lsqr, RejectsMismatchedRhs) {
  SparseSystem s = random_system(4, 3, 1.0, 1);
  s.rhs.assign(5, 1.0);
  EXPECT_THROW(lsqr(s), ValidationError);
}

}  // namespace
}  // namespace iadmm
