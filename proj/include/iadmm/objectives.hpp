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
// Local objectives f_i held privately by each agent, the synthetic data
// families they are trained on, and the pooled (centralized) optimum used
// as the accuracy reference.
#ifndef IADMM_OBJECTIVES_HPP_
#define IADMM_OBJECTIVES_HPP_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "iadmm/linalg.hpp"

namespace iadmm {

// b samples of (o in R^p, t in R), inputs stored row-major.
struct Dataset {
  int dim = 0;
  std::vector<double> inputs;
  std::vector<double> targets;

  int samples() const { return static_cast<int>(targets.size()); }
  std::span<const double> input(int j) const {
    return std::span<const double>(inputs).subspan(
        static_cast<std::size_t>(j) * dim, dim);
  }
  void validate() const;
};

// grad f(x) = H x - c for quadratic objectives.
struct QuadraticModel {
  DenseMatrix hessian;
  Vec linear;
};

class LocalObjective {
 public:
  virtual ~LocalObjective() = default;

  virtual int dim() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
  // Upper bound on the Lipschitz constant of the gradient.
  virtual double lipschitz_bound() const = 0;
  // argmin_x f(x) + (rho/2) ||z - x + y/rho||^2, or nullopt when the
  // objective has no closed-form minimizer.
  virtual std::optional<Vec> prox(const Vec& z, const Vec& y,
                                  double rho) const = 0;
  virtual std::optional<QuadraticModel> quadratic_model() const {
    return std::nullopt;
  }
  virtual const Dataset& data() const = 0;
};

// f(x) = (1/b) sum_j (x^T o_j - t_j)^2. No explicit l2 term.
class RidgeObjective final : public LocalObjective {
 public:
  explicit RidgeObjective(Dataset data);

  int dim() const override { return data_.dim; }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  double lipschitz_bound() const override { return lipschitz_; }
  std::optional<Vec> prox(const Vec& z, const Vec& y,
                          double rho) const override;
  std::optional<QuadraticModel> quadratic_model() const override;
  const Dataset& data() const override { return data_; }

 private:
  Dataset data_;
  DenseMatrix hessian_;  // (2/b) sum o o^T
  Vec linear_;           // (2/b) sum t o
  double lipschitz_;
};

// f(x) = (1/b) sum_j log(1 + exp(-t_j x^T o_j)), t_j in {-1, +1}.
class LogisticObjective final : public LocalObjective {
 public:
  explicit LogisticObjective(Dataset data);

  int dim() const override { return data_.dim; }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  double lipschitz_bound() const override { return lipschitz_; }
  std::optional<Vec> prox(const Vec&, const Vec&, double) const override {
    return std::nullopt;
  }
  const Dataset& data() const override { return data_; }

 private:
  Dataset data_;
  double lipschitz_;  // lambda_max(sum o o^T) / (4 b)
};

// log(1 + exp(u)) without overflow.
double softplus(double u);
double sigmoid(double u);

// Entries of o and t i.i.d. U(0, 1).
Dataset generate_ridge_data(int samples, int dim, std::uint64_t seed);

// Planted model x ~ N(0, I).
Vec planted_logistic_model(int dim, std::uint64_t planted_seed);
// o ~ N(0, I), v ~ U(0, 1); t = +1 if v <= sigmoid(x^T o) else -1.
Dataset generate_logistic_data(int samples, const Vec& planted,
                               std::uint64_t data_seed);
Dataset generate_logistic_data(int samples, int dim,
                               std::uint64_t planted_seed,
                               std::uint64_t data_seed);

using ObjectivePtr = std::shared_ptr<const LocalObjective>;

// Minimizer of sum_i f_i. Quadratic objectives are solved through the pooled
// normal equations (minimum-norm when singular); otherwise gradient descent
// with Armijo backtracking runs until ||sum_i grad f_i|| <= tol. Throws
// NumericalError, reporting the gradient norm reached, if that fails.
Vec centralized_optimum(std::span<const ObjectivePtr> objectives,
                        double tol = 1e-12);

double total_value(std::span<const ObjectivePtr> objectives, const Vec& x);
Vec total_gradient(std::span<const ObjectivePtr> objectives, const Vec& x);

// One row per sample: p feature columns then the target.
void write_dataset_csv(std::ostream& out, const Dataset& d);
Dataset read_dataset_csv(std::istream& in);

}  // namespace iadmm

#endif  // IADMM_OBJECTIVES_HPP_
