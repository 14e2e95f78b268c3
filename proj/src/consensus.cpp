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
#include "iadmm/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "iadmm/errors.hpp"

namespace iadmm {

void SolverConfig::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw ValidationError("solver.rho must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw ValidationError("solver.sigma must be >= 0");
  if (!(init_scale >= 0.0)) throw ValidationError("solver.init_scale must be >= 0");
  if (max_iters < 1) throw ValidationError("solver.max_iters must be >= 1");
  if (!(stop_eps >= 0.0)) throw ValidationError("solver.stop_eps must be >= 0");
  if (record_every < 0) throw ValidationError("output.checkpoint must be >= 0");
  switch (gamma.kind) {
    case GammaSpec::Kind::kConstant:
      if (!(gamma.a > 0.0)) throw ValidationError("solver.gamma: constant must be > 0");
      break;
    case GammaSpec::Kind::kUniform:
      if (!(gamma.a > 0.0) || !(gamma.b >= gamma.a))
        throw ValidationError("solver.gamma: uniform support must lie in (0, inf) "
                              "with low <= high");
      break;
    case GammaSpec::Kind::kLemma3Floor:
      if (!(gamma.a > 1.0))
        throw ValidationError("solver.gamma: floor margin must exceed 1");
      break;
  }
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::kIadmm: return "iadmm";
    case Variant::kIadmmRandInit: return "iadmm_randinit";
    case Variant::kPiadmm1: return "piadmm1";
    case Variant::kPiadmm2: return "piadmm2";
    case Variant::kWadmmBaseline: return "wadmm";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  for (Variant v : {Variant::kIadmm, Variant::kIadmmRandInit, Variant::kPiadmm1,
                    Variant::kPiadmm2, Variant::kWadmmBaseline})
    if (s == to_string(v)) return v;
  throw ValidationError("unknown variant '" + s +
                        "' (iadmm|iadmm_randinit|piadmm1|piadmm2|wadmm)");
}

bool uses_random_init(Variant v) {
  return v == Variant::kIadmmRandInit || v == Variant::kPiadmm1 ||
         v == Variant::kPiadmm2;
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kConverged: return "converged";
    case RunStatus::kMaxIters: return "max_iters";
    case RunStatus::kDiverged: return "diverged";
  }
  return "?";
}

Problem Problem::from_objectives(std::vector<ObjectivePtr> objectives,
                                 double optimum_tol) {
  if (objectives.empty()) throw ValidationError("problem: no agents");
  Problem p;
  p.objectives = std::move(objectives);
  for (const auto& f : p.objectives) {
    if (f->dim() != p.objectives.front()->dim())
      throw ValidationError("problem: agents disagree on dimension");
    p.lipschitz = std::max(p.lipschitz, f->lipschitz_bound());
  }
  p.optimum = centralized_optimum(p.objectives, optimum_tol);
  p.optimal_value = total_value(p.objectives, p.optimum);
  return p;
}

Problem make_ridge_problem(int n_agents, int samples, int dim,
                           std::uint64_t data_seed) {
  std::vector<ObjectivePtr> objs;
  objs.reserve(n_agents);
  for (int i = 0; i < n_agents; ++i)
    objs.push_back(std::make_shared<RidgeObjective>(
        generate_ridge_data(samples, dim, mix_seed(data_seed, i))));
  return Problem::from_objectives(std::move(objs));
}

Problem make_logistic_problem(int n_agents, int samples, int dim,
                              std::uint64_t planted_seed,
                              std::uint64_t data_seed) {
  const Vec planted = planted_logistic_model(dim, planted_seed);
  std::vector<ObjectivePtr> objs;
  objs.reserve(n_agents);
  for (int i = 0; i < n_agents; ++i)
    objs.push_back(std::make_shared<LogisticObjective>(
        generate_logistic_data(samples, planted, mix_seed(data_seed, i))));
  return Problem::from_objectives(std::move(objs));
}

InitialState initialize(const SolverConfig& config, int n_agents, int dim) {
  InitialState out;
  out.states.assign(n_agents, AgentState{Vec(dim), Vec(dim)});
  out.token = Token{Vec(dim), 0};
  if (!uses_random_init(config.variant)) return out;
  Engine rng = make_engine(config.seed, Stream::kInit);
  std::uniform_real_distribution<double> draw(0.0, config.init_scale);
  for (AgentState& s : out.states) {
    for (int c = 0; c < dim; ++c) s.x[c] = draw(rng);
    // y^0 = +rho v so that every x_i^0 - y_i^0/rho vanishes and z^0 = 0
    // stays the exact network average.
    s.y = config.rho * s.x;
  }
  return out;
}

Vec x_update(const LocalObjective& f, const AgentState& s, const Vec& z,
             double rho_tilde, XUpdateMode mode) {
  if (!(rho_tilde > 0.0)) throw ValidationError("x_update: rho must be positive");
  if (mode == XUpdateMode::kExactProx) {
    auto x = f.prox(z, s.y, rho_tilde);
    if (!x)
      throw UnsupportedError(
          "objective has no closed-form prox; use solver.x_update = first_order");
    return *std::move(x);
  }
  Vec x = z;
  x.axpy(1.0 / rho_tilde, s.y);
  x.axpy(-1.0 / rho_tilde, f.gradient(s.x));
  return x;
}

Vec y_update(const Vec& y, const Vec& z, const Vec& x_new, double rho_tilde) {
  Vec out = y;
  for (std::size_t c = 0; c < out.size(); ++c)
    out[c] += rho_tilde * (z[c] - x_new[c]);
  return out;
}

Vec z_update_incremental(const Vec& z, const AgentState& before,
                         const AgentState& after, double rho, int n_agents) {
  Vec out = z;
  const double inv_n = 1.0 / n_agents;
  for (std::size_t c = 0; c < out.size(); ++c) {
    const double now = after.x[c] - after.y[c] / rho;
    const double was = before.x[c] - before.y[c] / rho;
    out[c] += inv_n * (now - was);
  }
  return out;
}

double gamma_lower_bound(double rho, double lipschitz, int n_agents) {
  if (!(rho > lipschitz))
    throw ValidationError("gamma_lower_bound: requires rho > L");
  const double a = (2.0 * rho * rho + 4.0 * rho + 1.0) / (rho - lipschitz);
  const double b = 2.0 * (rho + 2.0) * n_agents;
  return std::max(a, b);
}

double gamma_support_min(const GammaSpec& spec, double rho, double lipschitz,
                         int n_agents) {
  switch (spec.kind) {
    case GammaSpec::Kind::kConstant:
    case GammaSpec::Kind::kUniform:
      return spec.a;
    case GammaSpec::Kind::kLemma3Floor:
      return spec.a * gamma_lower_bound(rho, lipschitz, n_agents);
  }
  return spec.a;
}

double sample_gamma(const GammaSpec& spec, double rho, double lipschitz,
                    int n_agents, Engine& rng) {
  switch (spec.kind) {
    case GammaSpec::Kind::kConstant:
      if (!(spec.a > 0.0)) throw ValidationError("gamma must be positive");
      return spec.a;
    case GammaSpec::Kind::kUniform: {
      if (!(spec.a > 0.0))
        throw ValidationError("gamma support touches zero or below");
      std::uniform_real_distribution<double> d(spec.a, spec.b);
      return d(rng);
    }
    case GammaSpec::Kind::kLemma3Floor:
      return spec.a * gamma_lower_bound(rho, lipschitz, n_agents);
  }
  return spec.a;
}

double accuracy(std::span<const AgentState> states, const Vec& optimum,
                std::span<const AgentState> initial, int* excluded) {
  double sum = 0.0;
  int used = 0;
  int skipped = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double denom = distance(initial[i].x, optimum);
    if (denom == 0.0) {
      ++skipped;
      continue;
    }
    sum += distance(states[i].x, optimum) / denom;
    ++used;
  }
  if (excluded) *excluded = skipped;
  return used ? sum / used : 0.0;
}

namespace {

// sum_i [<y_i, z - x_i> + (rho/2) ||z - x_i||^2], compensated.
void add_coupling_terms(CompensatedSum& acc, std::span<const AgentState> states,
                        const Vec& z, double rho) {
  for (const AgentState& s : states) {
    double inner = 0.0;
    double sq = 0.0;
    for (std::size_t c = 0; c < z.size(); ++c) {
      const double d = z[c] - s.x[c];
      inner += s.y[c] * d;
      sq += d * d;
    }
    acc.add(inner);
    acc.add(0.5 * rho * sq);
  }
}

}  // namespace

double aug_lagrangian(const Problem& problem,
                      std::span<const AgentState> states, const Vec& z,
                      double rho) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < states.size(); ++i)
    acc.add(problem.objectives[i]->value(states[i].x));
  add_coupling_terms(acc, states, z, rho);
  return acc.value();
}

KktResiduals kkt_residuals(const Problem& problem,
                           std::span<const AgentState> states, const Vec& z) {
  KktResiduals r{0.0, 0.0, 0.0};
  Vec ysum(z.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    r.gradient = std::max(
        r.gradient,
        distance(problem.objectives[i]->gradient(states[i].x), states[i].y));
    ysum += states[i].y;
    r.consensus = std::max(r.consensus, distance(z, states[i].x));
  }
  r.dual_sum = norm(ysum);
  return r;
}

std::string RegimeReport::describe() const {
  std::ostringstream os;
  os << "lemma2=" << (lemma2 ? "holds" : "not_guaranteed")
     << " lemma3=" << (lemma3 ? "holds" : "not_guaranteed");
  return os.str();
}

RegimeReport condition_regime(const Problem& problem, const SolverConfig& c) {
  RegimeReport r;
  const double L = problem.lipschitz;
  const bool cyclic_plain = c.variant == Variant::kIadmm ||
                            c.variant == Variant::kIadmmRandInit;
  r.lemma2 = cyclic_plain && c.rho >= 2.0 * L + 2.0;
  if (c.variant == Variant::kPiadmm1 && c.rho > L) {
    const double floor = gamma_lower_bound(c.rho, L, problem.n_agents());
    r.lemma3 = gamma_support_min(c.gamma, c.rho, L, problem.n_agents()) > floor;
  }
  return r;
}

Solver::Solver(const Problem& problem, const Graph& graph, SolverConfig config)
    : problem_(problem),
      graph_(graph),
      config_(std::move(config)),
      schedule_(config_.variant == Variant::kWadmmBaseline
                    ? ScheduleKind::kRandomWalk
                    : ScheduleKind::kCyclic,
                mix_seed(config_.seed, static_cast<std::uint64_t>(Stream::kWalk))),
      gamma_rng_(make_engine(config_.seed, Stream::kGamma)),
      omega_rng_(make_engine(config_.seed, Stream::kOmega)) {
  config_.validate();
  if (graph.n_agents() != problem.n_agents())
    throw ValidationError("graph and problem disagree on N");
  InitialState init = initialize(config_, problem.n_agents(), problem.dim());
  states_ = std::move(init.states);
  token_ = std::move(init.token);
  initial_ = states_;
  f_cache_.resize(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i)
    f_cache_[i] = problem_.objectives[i]->value(states_[i].x);
  active_ = schedule_.first_agent();
}

IterationRecord Solver::step() {
  const int n = problem_.n_agents();
  const int i = active_;
  const long k = token_.k;
  const LocalObjective& f = *problem_.objectives[i];
  const AgentState before = states_[i];
  const Vec& z = token_.z;

  IterationRecord rec;
  rec.k = k;
  rec.agent = i;

  double rho_tilde = config_.rho;
  if (config_.variant == Variant::kPiadmm1) {
    rec.gamma = sample_gamma(config_.gamma, config_.rho, problem_.lipschitz, n,
                             gamma_rng_);
    rho_tilde = config_.rho * rec.gamma;
  }

  AgentState after;
  after.x = x_update(f, before, z, rho_tilde, config_.x_update);
  if (config_.variant == Variant::kPiadmm2) {
    Vec omega(z.size());
    if (config_.sigma > 0.0) {
      std::normal_distribution<double> noise(0.0, config_.sigma);
      for (double& w : omega) w = noise(omega_rng_);
      after.x += omega;
    }
    rec.omega_norm = norm(omega);
  }
  after.y = y_update(before.y, z, after.x, rho_tilde);

  const double fold_rho =
      config_.mutation == Mutation::kZUpdateWithPerturbedRho ? rho_tilde
                                                             : config_.rho;
  Vec z_next = z_update_incremental(z, before, after, fold_rho, n);

  rec.z_step = distance(z_next, z);
  rec.x_step = distance(after.x, before.x);
  rec.r_dualstep = distance(after.y, before.y);

  states_[i] = std::move(after);
  f_cache_[i] = f.value(states_[i].x);
  token_.z = std::move(z_next);
  token_.k = k + 1;
  ++comm_units_;
  active_ = schedule_.next_agent(graph_, k, i);

  // Metrics over the whole network, O(N p) per iteration.
  CompensatedSum lag;
  for (double v : f_cache_) lag.add(v);
  add_coupling_terms(lag, states_, token_.z, config_.rho);
  rec.lagrangian = lag.value();

  Vec ysum(z.size());
  Vec avg(z.size());
  double r_primal = 0.0;
  for (const AgentState& s : states_) {
    ysum += s.y;
    for (std::size_t c = 0; c < avg.size(); ++c)
      avg[c] += s.x[c] - s.y[c] / config_.rho;
    r_primal = std::max(r_primal, distance(token_.z, s.x));
  }
  rec.r_primal = r_primal;
  rec.r_gradsum = norm(ysum);
  rec.token_gap = distance(token_.z, avg / static_cast<double>(n));
  rec.accuracy = accuracy(states_, problem_.optimum, initial_);
  rec.comm_units = comm_units_;
  return rec;
}

StateHistory RunTrace::truth() const {
  StateHistory h(static_cast<int>(initial.size()));
  for (std::size_t i = 0; i < initial.size(); ++i)
    h.track(static_cast<int>(i)).push_back({0, initial[i].x, initial[i].y});
  for (const Activation& a : activations)
    h.track(a.agent).push_back({a.k + 1, a.x, a.y});
  return h;
}

namespace {

bool finite_record(const IterationRecord& r) {
  return std::isfinite(r.lagrangian) && std::isfinite(r.r_primal) &&
         std::isfinite(r.accuracy) && std::isfinite(r.r_gradsum);
}

}  // namespace

RunTrace run(const Problem& problem, const Graph& graph,
             const SolverConfig& config, const Observer& observer) {
  Solver solver(problem, graph, config);
  const int n = problem.n_agents();
  const long cadence = config.record_every == 0 ? n : config.record_every;

  RunTrace trace;
  trace.initial = solver.initial_states();
  trace.regime = condition_regime(problem, config);
  trace.transcript.n_agents = n;
  trace.transcript.dim = problem.dim();
  trace.transcript.rho = config.rho;
  trace.transcript.z0 = solver.token().z;
  if (config.keep_history) {
    const auto reserve = static_cast<std::size_t>(std::min(config.max_iters, 1L << 22));
    trace.transcript.observations.reserve(reserve);
    trace.activations.reserve(reserve);
  }

  trace.status = RunStatus::kMaxIters;
  for (long it = 0; it < config.max_iters; ++it) {
    const IterationRecord rec = solver.step();
    trace.iterations = it + 1;
    const AgentState& s = solver.states()[rec.agent];
    const bool finite = finite_record(rec) && all_finite(s.x) &&
                        all_finite(s.y) && all_finite(solver.token().z);
    if (config.keep_history) {
      trace.transcript.observations.push_back(
          {rec.k, rec.agent, solver.next_agent(), solver.token().z});
      trace.activations.push_back({rec.k, rec.agent, s.x, s.y});
    }
    const bool last_cycle_done = it + 1 >= n;
    const bool converged =
        finite && last_cycle_done && rec.r_primal < config.stop_eps;
    const bool final_step = !finite || converged || it + 1 == config.max_iters;
    if ((it + 1) % cadence == 0 || final_step) trace.records.push_back(rec);
    if (observer) observer(solver, rec);
    if (!finite) {
      trace.status = RunStatus::kDiverged;
      std::ostringstream os;
      os << "non-finite state at iteration " << rec.k << " (agent "
         << rec.agent + 1 << ", lagrangian " << rec.lagrangian << ")";
      trace.diagnostic = os.str();
      break;
    }
    if (converged) {
      trace.status = RunStatus::kConverged;
      break;
    }
  }
  trace.final_states = solver.states();
  trace.final_token = solver.token();
  return trace;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "#schema=1\n";
  out << "k,agent,accuracy,lagrangian,r_primal,r_dualstep,r_gradsum,"
         "comm_units,gamma,omega_norm\n";
  out << std::setprecision(17);
  for (const IterationRecord& r : trace.records) {
    out << r.k << ',' << r.agent + 1 << ',' << r.accuracy << ',' << r.lagrangian
        << ',' << r.r_primal << ',' << r.r_dualstep << ',' << r.r_gradsum << ','
        << r.comm_units << ',';
    if (!std::isnan(r.gamma)) out << r.gamma;
    out << ',';
    if (!std::isnan(r.omega_norm)) out << r.omega_norm;
    out << '\n';
  }
}

}  // namespace iadmm
