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

// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to
// compare thread counts.

#include <benchmark/benchmark.h>

#include <random>
#include <sstream>
#include <vector>

#include "iadmm/harness.hpp"
#include "iadmm/sparse.hpp"

namespace {

// Banded rectangular matrix with a few entries per row, roughly the shape
// of an attack system.
iadmm::SparseMatrix banded(std::size_t rows) {
  const std::size_t cols = rows + rows / 20;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<iadmm::Triplet> t;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < 4; ++j) t.push_back({r, (r + 7 * j) % cols, u(rng)});
  return iadmm::SparseMatrix(rows, cols, t);
}

void BM_Multiply(benchmark::State& state, bool parallel) {
  const iadmm::SparseMatrix a = banded(static_cast<std::size_t>(state.range(0)));
  std::vector<double> x(a.cols(), 1.0), y(a.rows());
  for (auto _ : state) {
    if (parallel)
      a.multiply(x, y);
    else
      a.multiply_serial(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(a.nonzeros()));
}

void BM_MultiplyTranspose(benchmark::State& state, bool parallel) {
  const iadmm::SparseMatrix a = banded(static_cast<std::size_t>(state.range(0)));
  std::vector<double> y(a.rows(), 1.0), x(a.cols());
  for (auto _ : state) {
    if (parallel)
      a.multiply_transpose(y, x);
    else
      a.multiply_transpose_serial(y, x);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(a.nonzeros()));
}

BENCHMARK_CAPTURE(BM_Multiply, serial, false)->Range(1 << 12, 1 << 18);
BENCHMARK_CAPTURE(BM_Multiply, omp, true)->Range(1 << 12, 1 << 18);
BENCHMARK_CAPTURE(BM_MultiplyTranspose, serial, false)->Range(1 << 12, 1 << 18);
BENCHMARK_CAPTURE(BM_MultiplyTranspose, omp, true)->Range(1 << 12, 1 << 18);

std::vector<iadmm::SweepJob> sweep_jobs() {
  iadmm::ExperimentConfig base;
  base.max_iters = 4000;
  std::istringstream spec(
      "solver.variant = iadmm | wadmm | piadmm2\n"
      "seeds = count:4\n");
  return iadmm::expand_sweep(base, iadmm::parse_sweep(spec));
}

void BM_Sweep(benchmark::State& state, bool parallel) {
  const std::vector<iadmm::SweepJob> jobs = sweep_jobs();
  for (auto _ : state) {
    auto rows = parallel ? iadmm::run_sweep_parallel(jobs)
                         : iadmm::run_sweep_serial(jobs);
    benchmark::DoNotOptimize(rows.data());
  }
}

BENCHMARK_CAPTURE(BM_Sweep, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Sweep, omp, true)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
