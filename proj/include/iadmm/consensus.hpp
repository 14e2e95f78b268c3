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
// Token-passing incremental ADMM.
//
// Consensus form: minimize sum_i f_i(x_i) subject to x_i = z. One agent is
// active per iteration; it receives the token z^k, updates its private
// (x_i, y_i), folds the change into the token and forwards z^{k+1}:
//
//   x_i <- argmin f_i(x) + (r/2) ||z - x + y_i/r||^2       (or linearized)
//   y_i <- y_i + r (z - x_i)
//   z   <- z + (1/N) [(x_i - y_i/rho) - (x_i_old - y_i_old/rho)]
//
// where r = rho for plain I-ADMM and r = rho * gamma for the step-size
// perturbed variant. The token always folds with the global rho, which
// keeps z = (1/N) sum_i (x_i - y_i/rho) exact for every variant.
#ifndef IADMM_CONSENSUS_HPP_
#define IADMM_CONSENSUS_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "iadmm/history.hpp"
#include "iadmm/linalg.hpp"
#include "iadmm/objectives.hpp"
#include "iadmm/rng.hpp"
#include "iadmm/topology.hpp"

namespace iadmm {

enum class Variant {
  kIadmm,          // zero initialization
  kIadmmRandInit,  // x_i^0 = v_i, y_i^0 = rho v_i
  kPiadmm1,        // random init + step-size perturbation
  kPiadmm2,        // random init + additive primal noise
  kWadmmBaseline,  // zero init, random-walk activation order
};

enum class XUpdateMode { kExactProx, kFirstOrder };

struct GammaSpec {
  enum class Kind { kConstant, kUniform, kLemma3Floor };
  Kind kind = Kind::kConstant;
  double a = 1.0;  // constant value | uniform low | floor margin
  double b = 1.0;  // uniform high

  static GammaSpec constant(double c) { return {Kind::kConstant, c, c}; }
  static GammaSpec uniform(double lo, double hi) {
    return {Kind::kUniform, lo, hi};
  }
  static GammaSpec lemma3_floor(double margin) {
    return {Kind::kLemma3Floor, margin, margin};
  }
  bool operator==(const GammaSpec&) const = default;
};

// Fault injection for the verification suite.
enum class Mutation { kNone, kZUpdateWithPerturbedRho };

struct SolverConfig {
  double rho = 10.0;
  Variant variant = Variant::kIadmm;
  XUpdateMode x_update = XUpdateMode::kExactProx;
  GammaSpec gamma;
  double sigma = 0.0;         // PI-ADMM2 noise standard deviation
  double init_scale = 100.0;  // v ~ U(0, init_scale) per coordinate
  std::uint64_t seed = 1;
  long max_iters = 100000;
  double stop_eps = 1e-10;  // stop once max_i ||z - x_i|| < eps
  long record_every = 1;    // 0 selects one record per cycle (N)
  bool keep_history = true;  // transcript + activation log
  Mutation mutation = Mutation::kNone;

  void validate() const;
};

const char* to_string(Variant v);
Variant parse_variant(const std::string& s);
bool uses_random_init(Variant v);

// N local objectives plus the pooled optimum they are scored against.
struct Problem {
  std::vector<ObjectivePtr> objectives;
  Vec optimum;
  double optimal_value = 0.0;  // F(x*) = sum_i f_i(x*)
  double lipschitz = 0.0;      // max_i L_i

  int n_agents() const { return static_cast<int>(objectives.size()); }
  int dim() const { return objectives.front()->dim(); }

  static Problem from_objectives(std::vector<ObjectivePtr> objectives,
                                 double optimum_tol = 1e-12);
};

// Agent i's data is seeded by mix_seed(data_seed, i).
Problem make_ridge_problem(int n_agents, int samples, int dim,
                           std::uint64_t data_seed);
Problem make_logistic_problem(int n_agents, int samples, int dim,
                              std::uint64_t planted_seed,
                              std::uint64_t data_seed);

struct AgentState {
  Vec x;
  Vec y;
};

struct Token {
  Vec z;
  long k = 0;
};

struct IterationRecord {
  static constexpr double kNone = std::numeric_limits<double>::quiet_NaN();

  long k = 0;
  int agent = 0;
  double accuracy = 0.0;
  double lagrangian = 0.0;
  double r_primal = 0.0;    // max_i ||z^{k+1} - x_i^{k+1}||
  double r_dualstep = 0.0;  // ||y_ik^{k+1} - y_ik^k||
  double r_gradsum = 0.0;   // ||sum_i y_i^{k+1}||
  long comm_units = 0;
  double gamma = kNone;
  double omega_norm = kNone;
  // Not exported; used by invariant checks.
  double token_gap = 0.0;  // ||z - (1/N) sum_i (x_i - y_i/rho)||
  double z_step = 0.0;     // ||z^{k+1} - z^k||
  double x_step = 0.0;     // ||x_ik^{k+1} - x_ik^k||
};

struct InitialState {
  std::vector<AgentState> states;
  Token token;
};

// Zero init for I-ADMM / W-ADMM; otherwise v_i ~ U(0, init_scale)^p drawn in
// agent order from the init stream, x_i = v_i, y_i = rho v_i, z^0 = 0.
InitialState initialize(const SolverConfig& config, int n_agents, int dim);

// Throws UnsupportedError when exact_prox is requested for an objective
// without a closed-form minimizer.
Vec x_update(const LocalObjective& f, const AgentState& s, const Vec& z,
             double rho_tilde, XUpdateMode mode);
Vec y_update(const Vec& y, const Vec& z, const Vec& x_new, double rho_tilde);
Vec z_update_incremental(const Vec& z, const AgentState& before,
                         const AgentState& after, double rho, int n_agents);

// max{(2 rho^2 + 4 rho + 1) / (rho - L), 2 (rho + 2) N}; requires rho > L.
double gamma_lower_bound(double rho, double lipschitz, int n_agents);
double sample_gamma(const GammaSpec& spec, double rho, double lipschitz,
                    int n_agents, Engine& rng);
// Smallest gamma the spec can produce (the support's lower edge).
double gamma_support_min(const GammaSpec& spec, double rho, double lipschitz,
                         int n_agents);

// Agents whose x_i^0 equals x* are skipped; `excluded` reports how many.
double accuracy(std::span<const AgentState> states, const Vec& optimum,
                std::span<const AgentState> initial, int* excluded = nullptr);
double aug_lagrangian(const Problem& problem,
                      std::span<const AgentState> states, const Vec& z,
                      double rho);

struct KktResiduals {
  double gradient;   // max_i ||grad f_i(x_i) - y_i||
  double dual_sum;   // ||sum_i y_i||
  double consensus;  // max_i ||z - x_i||
};
KktResiduals kkt_residuals(const Problem& problem,
                           std::span<const AgentState> states, const Vec& z);

// Which sufficient convergence conditions the configuration satisfies.
struct RegimeReport {
  bool lemma2 = false;  // rho >= 2L + 2, unperturbed cyclic variant
  bool lemma3 = false;  // PI-ADMM1, rho > L, every gamma above the floor
  std::string describe() const;
};
RegimeReport condition_regime(const Problem& problem, const SolverConfig& c);

// One run's mutable state. Holds references to the problem and graph, which
// must outlive it.
class Solver {
 public:
  Solver(const Problem& problem, const Graph& graph, SolverConfig config);

  const std::vector<AgentState>& states() const { return states_; }
  const std::vector<AgentState>& initial_states() const { return initial_; }
  const Token& token() const { return token_; }
  int next_agent() const { return active_; }
  const SolverConfig& config() const { return config_; }
  const Problem& problem() const { return problem_; }

  // One activation. Returns the record for iteration k (the one just run).
  IterationRecord step();

 private:
  const Problem& problem_;
  const Graph& graph_;
  SolverConfig config_;
  std::vector<AgentState> states_;
  std::vector<AgentState> initial_;
  std::vector<double> f_cache_;
  Token token_;
  ActivationSchedule schedule_;
  Engine gamma_rng_;
  Engine omega_rng_;
  int active_ = 0;
  long comm_units_ = 0;
};

enum class RunStatus { kConverged, kMaxIters, kDiverged };
const char* to_string(RunStatus s);

// Ground-truth log entry: the active agent's new state after iteration k.
struct Activation {
  long k;
  int agent;
  Vec x;
  Vec y;
};

struct RunTrace {
  std::vector<IterationRecord> records;
  std::vector<AgentState> initial;
  std::vector<AgentState> final_states;
  Token final_token;
  Transcript transcript;
  std::vector<Activation> activations;
  RunStatus status = RunStatus::kMaxIters;
  std::string diagnostic;
  long iterations = 0;
  RegimeReport regime;

  // Ground-truth trajectories rebuilt from `initial` + `activations`.
  StateHistory truth() const;
};

using Observer = std::function<void(const Solver&, const IterationRecord&)>;

// Iterates until max_iters or the primal stop rule (checked once every agent
// has been active at least once). Non-finite values end the run with
// status kDiverged and a diagnostic.
RunTrace run(const Problem& problem, const Graph& graph,
             const SolverConfig& config, const Observer& observer = {});

// "#schema=1" then k,agent,accuracy,lagrangian,r_primal,r_dualstep,
// r_gradsum,comm_units,gamma,omega_norm. Agents 1-based.
void write_trace_csv(std::ostream& out, const RunTrace& trace);

}  // namespace iadmm

#endif  // IADMM_CONSENSUS_HPP_
