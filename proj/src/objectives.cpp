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
#include "iadmm/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "iadmm/errors.hpp"
#include "iadmm/rng.hpp"
#include "iadmm/sparse.hpp"

namespace iadmm {

void Dataset::validate() const {
  if (dim < 1) throw ValidationError("dataset: dim must be >= 1");
  if (targets.empty()) throw ValidationError("dataset: needs >= 1 sample");
  if (inputs.size() != targets.size() * static_cast<std::size_t>(dim))
    throw ValidationError("dataset: inputs do not match dim * samples");
}

namespace {

double row_dot(std::span<const double> o, const Vec& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < o.size(); ++i) s += o[i] * x[i];
  return s;
}

DenseMatrix scatter_matrix(const Dataset& d) {
  DenseMatrix s(d.dim, d.dim);
  for (int j = 0; j < d.samples(); ++j) s.add_outer(1.0, d.input(j), d.input(j));
  return s;
}

}  // namespace

RidgeObjective::RidgeObjective(Dataset data) : data_(std::move(data)) {
  data_.validate();
  const int p = data_.dim;
  const double w = 2.0 / data_.samples();
  hessian_ = DenseMatrix(p, p);
  linear_ = Vec(p);
  for (int j = 0; j < data_.samples(); ++j) {
    const auto o = data_.input(j);
    hessian_.add_outer(w, o, o);
    for (int i = 0; i < p; ++i) linear_[i] += w * data_.targets[j] * o[i];
  }
  lipschitz_ = largest_eigenvalue_bound(hessian_);
}

double RidgeObjective::value(const Vec& x) const {
  double s = 0.0;
  for (int j = 0; j < data_.samples(); ++j) {
    const double r = row_dot(data_.input(j), x) - data_.targets[j];
    s += r * r;
  }
  return s / data_.samples();
}

Vec RidgeObjective::gradient(const Vec& x) const {
  Vec g(data_.dim);
  for (int j = 0; j < data_.samples(); ++j) {
    const auto o = data_.input(j);
    const double r = row_dot(o, x) - data_.targets[j];
    for (int i = 0; i < data_.dim; ++i) g[i] += r * o[i];
  }
  return g * (2.0 / data_.samples());
}

std::optional<Vec> RidgeObjective::prox(const Vec& z, const Vec& y,
                                        double rho) const {
  if (!(rho > 0.0)) throw ValidationError("ridge prox: rho must be positive");
  DenseMatrix a = hessian_;
  a.add_diagonal(rho);
  Vec rhs = linear_ + rho * z + y;
  return solve_dense(a, rhs);
}

std::optional<QuadraticModel> RidgeObjective::quadratic_model() const {
  return QuadraticModel{hessian_, linear_};
}

double softplus(double u) {
  return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u)));
}

double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

LogisticObjective::LogisticObjective(Dataset data) : data_(std::move(data)) {
  data_.validate();
  for (double t : data_.targets)
    if (t != 1.0 && t != -1.0)
      throw ValidationError("logistic targets must be +1 or -1");
  lipschitz_ =
      largest_eigenvalue_bound(scatter_matrix(data_)) / (4.0 * data_.samples());
}

double LogisticObjective::value(const Vec& x) const {
  double s = 0.0;
  for (int j = 0; j < data_.samples(); ++j)
    s += softplus(-data_.targets[j] * row_dot(data_.input(j), x));
  return s / data_.samples();
}

Vec LogisticObjective::gradient(const Vec& x) const {
  Vec g(data_.dim);
  for (int j = 0; j < data_.samples(); ++j) {
    const auto o = data_.input(j);
    const double t = data_.targets[j];
    const double w = -t * sigmoid(-t * row_dot(o, x));
    for (int i = 0; i < data_.dim; ++i) g[i] += w * o[i];
  }
  return g / data_.samples();
}

Dataset generate_ridge_data(int samples, int dim, std::uint64_t seed) {
  if (samples < 1 || dim < 1)
    throw ValidationError("generate_ridge_data: need samples, dim >= 1");
  Engine rng = make_engine(seed, Stream::kData);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Dataset d;
  d.dim = dim;
  d.inputs.reserve(static_cast<std::size_t>(samples) * dim);
  d.targets.reserve(samples);
  for (int j = 0; j < samples; ++j) {
    for (int i = 0; i < dim; ++i) d.inputs.push_back(u01(rng));
    d.targets.push_back(u01(rng));
  }
  return d;
}

Vec planted_logistic_model(int dim, std::uint64_t planted_seed) {
  Engine rng = make_engine(planted_seed, Stream::kPlanted);
  std::normal_distribution<double> n01(0.0, 1.0);
  Vec x(dim);
  for (double& e : x) e = n01(rng);
  return x;
}

Dataset generate_logistic_data(int samples, const Vec& planted,
                               std::uint64_t data_seed) {
  const int dim = static_cast<int>(planted.size());
  if (samples < 1 || dim < 1)
    throw ValidationError("generate_logistic_data: need samples, dim >= 1");
  Engine rng = make_engine(data_seed, Stream::kData);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Dataset d;
  d.dim = dim;
  d.inputs.reserve(static_cast<std::size_t>(samples) * dim);
  for (int j = 0; j < samples; ++j) {
    double margin = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double o = n01(rng);
      d.inputs.push_back(o);
      margin += o * planted[i];
    }
    const double v = u01(rng);
    d.targets.push_back(v <= sigmoid(margin) ? 1.0 : -1.0);
  }
  return d;
}

Dataset generate_logistic_data(int samples, int dim,
                               std::uint64_t planted_seed,
                               std::uint64_t data_seed) {
  return generate_logistic_data(samples, planted_logistic_model(dim, planted_seed),
                                data_seed);
}

double total_value(std::span<const ObjectivePtr> objectives, const Vec& x) {
  CompensatedSum s;
  for (const auto& f : objectives) s.add(f->value(x));
  return s.value();
}

Vec total_gradient(std::span<const ObjectivePtr> objectives, const Vec& x) {
  Vec g(x.size());
  for (const auto& f : objectives) g += f->gradient(x);
  return g;
}

namespace {

// Minimum-norm solve of the (possibly singular) PSD system H x = c.
Vec min_norm_solve(const DenseMatrix& h, const Vec& c) {
  SparseSystem sys;
  sys.rows = h.rows();
  sys.cols = h.cols();
  for (std::size_t r = 0; r < h.rows(); ++r)
    for (std::size_t col = 0; col < h.cols(); ++col)
      if (h(r, col) != 0.0) sys.add(r, col, h(r, col));
  sys.rhs.assign(c.begin(), c.end());
  LsqrResult res = lsqr(sys, 1e-15, 1000);
  return Vec(std::span<const double>(res.solution));
}

Vec gradient_descent(std::span<const ObjectivePtr> objectives, double tol) {
  const int p = objectives.front()->dim();
  double lsum = 0.0;
  for (const auto& f : objectives) lsum += f->lipschitz_bound();
  const double t_min = lsum > 0.0 ? 1.0 / lsum : 1.0;
  double step = t_min;

  Vec x(p);
  double fx = total_value(objectives, x);
  Vec g = total_gradient(objectives, x);
  constexpr long kMaxIters = 2'000'000;
  for (long it = 0; it < kMaxIters; ++it) {
    const double gn = norm(g);
    if (gn <= tol) return x;
    // Armijo backtracking, never below the 1/L step: that step satisfies the
    // sufficient-decrease test in exact arithmetic.
    double t = std::max(step * 2.0, t_min);
    Vec trial;
    double ft = 0.0;
    // Once the guaranteed decrease is below what f can resolve the Armijo
    // test is noise; take the safe step instead.
    const double resolvable =
        64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(fx));
    if (0.5 * t_min * gn * gn <= resolvable) t = t_min;
    while (true) {
      trial = x - t * g;
      ft = total_value(objectives, trial);
      if (ft <= fx - 0.5 * t * gn * gn || t <= t_min) break;
      t = std::max(0.5 * t, t_min);
    }
    step = t;
    x = std::move(trial);
    fx = ft;
    g = total_gradient(objectives, x);
  }
  throw NumericalError("centralized_optimum: gradient descent stopped at "
                       "||grad|| = " +
                       [&] {
                         std::ostringstream os;
                         os << norm(g);
                         return os.str();
                       }());
}

}  // namespace

Vec centralized_optimum(std::span<const ObjectivePtr> objectives, double tol) {
  if (objectives.empty())
    throw ValidationError("centralized_optimum: no objectives");
  const int p = objectives.front()->dim();
  bool quadratic = true;
  DenseMatrix h(p, p);
  Vec c(p);
  for (const auto& f : objectives) {
    auto q = f->quadratic_model();
    if (!q) {
      quadratic = false;
      break;
    }
    h += q->hessian;
    c += q->linear;
  }
  if (!quadratic) return gradient_descent(objectives, tol);
  try {
    return solve_dense(h, c);
  } catch (const NumericalError&) {
    return min_norm_solve(h, c);
  }
}

void write_dataset_csv(std::ostream& out, const Dataset& d) {
  d.validate();
  out << "#schema=1\n";
  for (int i = 0; i < d.dim; ++i) out << 'o' << i + 1 << ',';
  out << "t\n";
  out << std::setprecision(17);
  for (int j = 0; j < d.samples(); ++j) {
    for (double o : d.input(j)) out << o << ',';
    out << d.targets[j] << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  Dataset d;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> raw;
    while (std::getline(ss, cell, ',')) raw.push_back(cell);
    if (!header_seen) {
      header_seen = true;
      d.dim = static_cast<int>(raw.size()) - 1;
      continue;
    }
    if (static_cast<int>(raw.size()) != d.dim + 1)
      throw ValidationError("dataset csv: wrong column count");
    for (int i = 0; i < d.dim; ++i) d.inputs.push_back(std::stod(raw[i]));
    d.targets.push_back(std::stod(raw.back()));
  }
  d.validate();
  return d;
}

}  // namespace iadmm
