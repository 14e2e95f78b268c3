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
#include "iadmm/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

#include "iadmm/errors.hpp"

namespace iadmm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool zero_init_known(Variant v) { return !uses_random_init(v); }

// Activation iterations per agent over observations 0..K.
std::vector<std::vector<long>> activations_by_agent(const Transcript& t, long K) {
  std::vector<std::vector<long>> acts(t.n_agents);
  for (long k = 0; k <= K; ++k) acts[t.sender(k)].push_back(k);
  return acts;
}

std::vector<std::vector<long>> epoch_starts(
    const std::vector<std::vector<long>>& acts) {
  std::vector<std::vector<long>> out(acts.size());
  for (std::size_t i = 0; i < acts.size(); ++i) {
    out[i].push_back(0);
    for (long k : acts[i]) out[i].push_back(k + 1);
  }
  return out;
}

// NaN-filled history with the epoch layout of `starts`.
StateHistory blank_history(const std::vector<std::vector<long>>& starts,
                           int dim) {
  StateHistory h(static_cast<int>(starts.size()));
  for (std::size_t i = 0; i < starts.size(); ++i)
    for (long kb : starts[i])
      h.track(static_cast<int>(i)).push_back({kb, Vec(dim, kNaN), Vec(dim, kNaN)});
  return h;
}

void check_horizon(const Transcript& t, long K) {
  if (K < 0 || K > t.last_iteration())
    throw ValidationError("attack horizon K=" + std::to_string(K) +
                          " outside the transcript (last iteration " +
                          std::to_string(t.last_iteration()) + ")");
}

std::vector<int> resolve_coordinates(const std::vector<int>& requested,
                                     int dim) {
  std::vector<int> coords = requested;
  if (coords.empty())
    for (int c = 0; c < dim; ++c) coords.push_back(c);
  for (int c : coords)
    if (c < 0 || c >= dim)
      throw ValidationError("attack coordinate " + std::to_string(c + 1) +
                            " out of range");
  return coords;
}

}  // namespace

const char* to_string(RowKind k) {
  switch (k) {
    case RowKind::kInit: return "init";
    case RowKind::kRecursionX: return "recursion_x";
    case RowKind::kRecursionY: return "recursion_y";
    case RowKind::kKktSum: return "kkt_sum";
    case RowKind::kConvergencePin: return "convergence_pin";
  }
  return "?";
}

int MeasurementSystem::x_column(int agent, int epoch) const {
  return first_column_[agent] + 2 * epoch;
}

int MeasurementSystem::y_column(int agent, int epoch) const {
  return first_column_[agent] + 2 * epoch + 1;
}

MeasurementSystem build_ls_system(const Transcript& t, Variant variant, long K,
                                  int coordinate, const AttackOptions& opt) {
  check_horizon(t, K);
  if (coordinate < 0 || coordinate >= t.dim)
    throw ValidationError("build_ls_system: coordinate out of range");
  const int n = t.n_agents;
  if (opt.pin_last_cycle && K + 1 < n)
    throw ValidationError("build_ls_system: pinning needs at least N = " +
                          std::to_string(n) + " observed iterations, have " +
                          std::to_string(K + 1));
  const double rho = t.rho;
  const double g = opt.assumed_gamma;
  const int c = coordinate;

  MeasurementSystem ms;
  ms.coordinate = c;
  const auto acts = activations_by_agent(t, K);
  ms.epoch_begin = epoch_starts(acts);
  ms.first_column_.resize(n);
  int col = 0;
  for (int i = 0; i < n; ++i) {
    ms.first_column_[i] = col;
    for (int e = 0; e < static_cast<int>(ms.epoch_begin[i].size()); ++e) {
      ms.columns.push_back({i, e, StateKind::kX});
      ms.columns.push_back({i, e, StateKind::kY});
      col += 2;
    }
  }
  SparseSystem& s = ms.system;
  s.cols = static_cast<std::size_t>(col);
  std::size_t row = 0;
  auto new_row = [&](RowKind kind, double rhs) {
    ms.row_kinds.push_back(kind);
    s.rhs.push_back(rhs);
    return row++;
  };

  for (int i = 0; i < n; ++i) {
    if (zero_init_known(variant)) {
      s.add(new_row(RowKind::kInit, 0.0), ms.x_column(i, 0), 1.0);
      s.add(new_row(RowKind::kInit, 0.0), ms.y_column(i, 0), 1.0);
    } else {
      const std::size_t r = new_row(RowKind::kInit, 0.0);
      s.add(r, ms.x_column(i, 0), 1.0);
      s.add(r, ms.y_column(i, 0), -1.0 / rho);
    }
  }

  std::vector<int> epoch(n, 0);
  for (long k = 0; k <= K; ++k) {
    const int i = t.sender(k);
    const int e = epoch[i]++;
    const double zk = t.z(k)[c];
    const double delta = t.z(k + 1)[c] - zk;
    std::size_t r = new_row(RowKind::kRecursionX, n * delta + g * zk);
    s.add(r, ms.x_column(i, e + 1), 1.0 + g);
    s.add(r, ms.x_column(i, e), -1.0);
    r = new_row(RowKind::kRecursionY, rho * g * zk);
    s.add(r, ms.y_column(i, e + 1), 1.0);
    s.add(r, ms.y_column(i, e), -1.0);
    s.add(r, ms.x_column(i, e + 1), rho * g);
  }

  if (opt.kkt_row) {
    const std::size_t r = new_row(RowKind::kKktSum, 0.0);
    for (int i = 0; i < n; ++i) s.add(r, ms.y_column(i, epoch[i]), 1.0);
  }
  if (opt.pin_last_cycle) {
    std::vector<int> seen(n, 0);
    for (long k = 0; k <= K; ++k) {
      const int i = t.sender(k);
      ++seen[i];
      if (k > K - n)
        s.add(new_row(RowKind::kConvergencePin, t.z(k + 1)[c]),
              ms.x_column(i, seen[i]), 1.0);
    }
  }
  s.rows = row;
  return ms;
}

double system_residual(const MeasurementSystem& ms, const StateHistory& truth) {
  std::vector<double> v(ms.system.cols);
  for (std::size_t j = 0; j < ms.columns.size(); ++j) {
    const ColumnKey& key = ms.columns[j];
    const EpochState& st =
        truth.at(key.agent, ms.epoch_begin[key.agent][key.epoch]);
    v[j] = key.which == StateKind::kX ? st.x[ms.coordinate] : st.y[ms.coordinate];
  }
  std::vector<double> r = ms.system.rhs;
  for (const Triplet& tr : ms.system.triplets) r[tr.row] -= tr.value * v[tr.col];
  double s = 0.0;
  for (double e : r) s += e * e;
  return std::sqrt(s);
}

AttackReport exact_recursion_attack(const Transcript& t, Variant declared) {
  t.validate();
  const long K = t.last_iteration();
  const int n = t.n_agents;
  AttackReport rep;
  rep.method = "exact_recursion";
  if (!zero_init_known(declared)) {
    rep.assumption_violated = true;
    rep.note = "initial states are private for this variant; zero seed assumed";
  }
  rep.estimate = StateHistory(n);
  for (int i = 0; i < n; ++i)
    rep.estimate.track(i).push_back({0, Vec(t.dim), Vec(t.dim)});
  for (long k = 0; k <= K; ++k) {
    const int i = t.sender(k);
    const EpochState& old = rep.estimate.track(i).back();
    const Vec& z = t.z(k);
    const Vec n_delta = static_cast<double>(n) * (t.z(k + 1) - z);
    EpochState next{k + 1, 0.5 * (n_delta + z + old.x),
                    old.y + (0.5 * t.rho) * (z - n_delta - old.x)};
    rep.estimate.track(i).push_back(std::move(next));
  }
  return rep;
}

AttackReport terminal_backward_attack(const Transcript& t) {
  t.validate();
  const long K = t.last_iteration();
  if (K < 0) throw ValidationError("terminal_backward_attack: empty transcript");
  const int a = t.sender(K);
  const auto acts = activations_by_agent(t, K)[a];
  const std::size_t m = acts.size();
  const double n = t.n_agents;

  std::vector<Vec> x(m + 1);
  x[m] = t.z(K + 1);
  for (std::size_t j = m; j >= 1; --j) {
    const long kj = acts[j - 1];
    const Vec& z = t.z(kj);
    const Vec n_delta = n * (t.z(kj + 1) - z);
    x[j - 1] = 2.0 * x[j] - n_delta - z;
  }
  std::vector<Vec> y(m + 1);
  y[0] = Vec(t.dim);
  for (std::size_t j = 1; j <= m; ++j) {
    const long kj = acts[j - 1];
    const Vec& z = t.z(kj);
    const Vec n_delta = n * (t.z(kj + 1) - z);
    y[j] = y[j - 1] + (0.5 * t.rho) * (z - n_delta - x[j - 1]);
  }

  AttackReport rep;
  rep.method = "terminal_backward";
  rep.estimate = StateHistory(t.n_agents);
  rep.estimate.track(a).push_back({0, x[0], y[0]});
  for (std::size_t j = 1; j <= m; ++j)
    rep.estimate.track(a).push_back({acts[j - 1] + 1, x[j], y[j]});
  return rep;
}

bool BoundCheck::all_hold() const {
  return precondition &&
         std::all_of(epochs.begin(), epochs.end(),
                     [](const EpochBound& b) { return b.holds(); });
}

BoundCheck check_terminal_bounds(const Transcript& t, const AttackReport& rep,
                                 const StateHistory& truth, double eps) {
  const long K = t.last_iteration();
  const int n = t.n_agents;
  const int a = t.sender(K);
  BoundCheck out;
  out.terminal_gap = distance(t.z(K + 1), truth.at(a, K + 1).x);
  out.precondition = out.terminal_gap < eps;
  const long cycles = K / n;
  for (long e = 1; e <= cycles; ++e) {
    EpochBound b;
    b.n = static_cast<int>(e);
    b.k_lo = K - e * n + 1;
    b.k_hi = K - (e - 1) * n;
    b.x_error = 0.0;
    b.y_error = 0.0;
    for (long k = b.k_lo; k <= b.k_hi; ++k) {
      const EpochState& est = rep.estimate.at(a, k);
      const EpochState& tru = truth.at(a, k);
      b.x_error = std::max(b.x_error, distance(est.x, tru.x));
      b.y_error = std::max(b.y_error, distance(est.y, tru.y));
    }
    b.x_bound = std::ldexp(eps, b.n);
    b.y_bound = t.rho * (std::ldexp(1.0, static_cast<int>(cycles) + 1) -
                         std::ldexp(1.0, b.n)) *
                eps;
    out.epochs.push_back(b);
  }
  return out;
}

AttackReport lsq_attack(const Transcript& t, Variant variant,
                        const AttackOptions& opt) {
  t.validate();
  const long K = t.last_iteration();
  const std::vector<int> coords = resolve_coordinates(opt.coordinates, t.dim);
  AttackReport rep;
  rep.method = "lsq";
  rep.estimate = blank_history(epoch_starts(activations_by_agent(t, K)), t.dim);
  rep.solves.resize(coords.size());

  const int nc = static_cast<int>(coords.size());
#pragma omp parallel for schedule(dynamic) if (nc > 1)
  for (int j = 0; j < nc; ++j) {
    const int c = coords[j];
    const MeasurementSystem ms = build_ls_system(t, variant, K, c, opt);
    const LsqrResult res = lsqr(ms.system, opt.tol, opt.max_iter);
    for (std::size_t col = 0; col < ms.columns.size(); ++col) {
      const ColumnKey& key = ms.columns[col];
      EpochState& st = rep.estimate.track(key.agent)[key.epoch];
      (key.which == StateKind::kX ? st.x : st.y)[c] = res.solution[col];
    }
    rep.solves[j] = {c,
                     static_cast<long>(ms.system.rows),
                     static_cast<long>(ms.system.cols),
                     res.iterations,
                     res.converged,
                     res.residual_norm};
  }
  for (const CoordinateSolve& s : rep.solves)
    if (!s.converged) {
      rep.note = "lsqr stopped at its iteration limit on coordinate " +
                 std::to_string(s.coordinate + 1);
      break;
    }
  return rep;
}

AttackReport colluding_attack(const Transcript& t, int target,
                              const StateHistory& colluders,
                              const AttackOptions& opt) {
  t.validate();
  const long K = t.last_iteration();
  const int n = t.n_agents;
  if (target < 0 || target >= n)
    throw ValidationError("colluding_attack: target out of range");
  if (opt.pin_last_cycle && K + 1 < n)
    throw ValidationError("colluding_attack: pinning needs N observed iterations");
  const std::vector<int> coords = resolve_coordinates(opt.coordinates, t.dim);
  const auto acts = activations_by_agent(t, K);
  const auto starts = epoch_starts(acts);
  const std::vector<long>& mine = acts[target];
  const int epochs = static_cast<int>(mine.size()) + 1;
  const double rho = t.rho;
  const double g = opt.assumed_gamma;

  AttackReport rep;
  rep.method = "colluding";
  rep.estimate = StateHistory(n);
  for (long kb : starts[target])
    rep.estimate.track(target).push_back({kb, Vec(t.dim, kNaN), Vec(t.dim, kNaN)});

  for (int c : coords) {
    SparseSystem s;
    s.cols = 2 * static_cast<std::size_t>(epochs);
    auto xc = [](int e) { return static_cast<std::size_t>(2 * e); };
    auto yc = [](int e) { return static_cast<std::size_t>(2 * e + 1); };
    std::size_t row = 0;
    s.add(row, xc(0), 1.0);
    s.add(row, yc(0), -1.0 / rho);
    s.rhs.push_back(0.0);
    ++row;
    for (int e = 0; e + 1 < epochs; ++e) {
      const long k = mine[e];
      const double zk = t.z(k)[c];
      const double delta = t.z(k + 1)[c] - zk;
      s.add(row, xc(e + 1), 1.0 + g);
      s.add(row, xc(e), -1.0);
      s.rhs.push_back(n * delta + g * zk);
      ++row;
      s.add(row, yc(e + 1), 1.0);
      s.add(row, yc(e), -1.0);
      s.add(row, xc(e + 1), rho * g);
      s.rhs.push_back(rho * g * zk);
      ++row;
    }
    if (opt.kkt_row) {
      double others = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == target) continue;
        if (!colluders.known(j))
          throw ValidationError("colluding_attack: colluder " +
                                std::to_string(j + 1) + " has no history");
        others += colluders.at(j, K + 1).y[c];
      }
      s.add(row, yc(epochs - 1), 1.0);
      s.rhs.push_back(-others);
      ++row;
    }
    if (opt.pin_last_cycle && !mine.empty() && mine.back() > K - n) {
      s.add(row, xc(epochs - 1), 1.0);
      s.rhs.push_back(t.z(mine.back() + 1)[c]);
      ++row;
    }
    s.rows = row;
    const LsqrResult res = lsqr(s, opt.tol, opt.max_iter);
    for (int e = 0; e < epochs; ++e) {
      rep.estimate.track(target)[e].x[c] = res.solution[xc(e)];
      rep.estimate.track(target)[e].y[c] = res.solution[yc(e)];
    }
    rep.solves.push_back({c, static_cast<long>(s.rows),
                          static_cast<long>(s.cols), res.iterations,
                          res.converged, res.residual_norm});
  }
  return rep;
}

CountReport count_equations_unknowns(Variant variant, long K, int n_agents,
                                     const AttackOptions& opt) {
  if (K < 0 || n_agents < 3)
    throw ValidationError("count_equations_unknowns: need K >= 0, N >= 3");
  long epochs = 0;
  for (int i = 0; i < n_agents; ++i) {
    long acts = 0;
    for (long k = 0; k <= K; ++k)
      if (k % n_agents == i) ++acts;
    epochs += acts + 1;
  }
  const long iterations = K + 1;
  CountReport r;
  r.implemented.unknowns = 2 * epochs;
  r.implemented.equations =
      (zero_init_known(variant) ? 2L : 1L) * n_agents + 2 * iterations +
      (opt.kkt_row ? 1 : 0) + (opt.pin_last_cycle ? n_agents : 0);
  r.with_gamma_unknowns = r.implemented;
  if (variant == Variant::kPiadmm1) r.with_gamma_unknowns.unknowns += iterations;
  r.single_init_row = {1 + 2 * iterations, 2 * epochs};
  return r;
}

DimensionCount count_colluding(long K, int n_agents, int target) {
  if (K < 0 || n_agents < 3 || target < 0 || target >= n_agents)
    throw ValidationError("count_colluding: need K >= 0, N >= 3, valid target");
  long acts = 0;
  for (long k = 0; k <= K; ++k)
    if (k % n_agents == target) ++acts;
  return {1 + 2 * acts, 2 * (acts + 1) + acts};
}

std::vector<ScoreRow> score_agent(const StateHistory& est,
                                  const StateHistory* truth, int agent,
                                  long k_last, const std::vector<int>& coords) {
  std::vector<ScoreRow> rows;
  if (!est.known(agent))
    throw ValidationError("score_agent: no estimate for agent " +
                          std::to_string(agent + 1));
  for (long k = 0; k <= k_last; ++k) {
    const EpochState& e = est.at(agent, k);
    const EpochState* tr = truth ? &truth->at(agent, k) : nullptr;
    for (int c : coords) {
      ScoreRow r{k, c, kNaN, e.x[c], kNaN, e.y[c], kNaN, kNaN};
      if (tr) {
        r.truth_x = tr->x[c];
        r.truth_y = tr->y[c];
        r.abs_err_x = std::abs(r.est_x - r.truth_x);
        r.abs_err_y = std::abs(r.est_y - r.truth_y);
      }
      rows.push_back(r);
    }
  }
  return rows;
}

void write_attack_csv(std::ostream& out, int agent,
                      const std::vector<ScoreRow>& rows) {
  out << "#schema=1\n#agent=" << agent + 1 << '\n';
  out << "k,coordinate,truth_x,est_x,truth_y,est_y,abs_err_x,abs_err_y\n";
  out << std::setprecision(17);
  auto cell = [&out](double v) {
    if (!std::isnan(v)) out << v;
  };
  for (const ScoreRow& r : rows) {
    out << r.k << ',' << r.coordinate + 1 << ',';
    cell(r.truth_x);
    out << ',';
    cell(r.est_x);
    out << ',';
    cell(r.truth_y);
    out << ',';
    cell(r.est_y);
    out << ',';
    cell(r.abs_err_x);
    out << ',';
    cell(r.abs_err_y);
    out << '\n';
  }
}

}  // namespace iadmm
