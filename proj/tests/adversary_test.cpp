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
#include <sstream>

#include "iadmm/adversary.hpp"
#include "iadmm/consensus.hpp"
#include "iadmm/errors.hpp"

namespace iadmm {
namespace {

struct Simulated {
  Problem problem;
  Graph graph;
  RunTrace trace;
  StateHistory truth;
};

Simulated simulate(int n, Variant v, long iters, std::uint64_t seed = 1,
                   double rho = 10.0, double stop_eps = 0.0) {
  Simulated r{make_ridge_problem(n, 30, 2, seed), generate_graph(n, 1.0, seed), {}, {}};
  SolverConfig c;
  c.variant = v;
  c.rho = rho;
  c.max_iters = iters;
  c.stop_eps = stop_eps;
  c.seed = seed;
  c.gamma = GammaSpec::uniform(0.9, 1.1);
  c.sigma = v == Variant::kPiadmm2 ? 1e-3 : 0.0;
  r.trace = run(r.problem, r.graph, c);
  r.truth = r.trace.truth();
  return r;
}

AttackOptions bare() {
  AttackOptions o;
  o.kkt_row = false;
  o.pin_last_cycle = false;
  return o;
}

double max_state_error(const StateHistory& est, const StateHistory& truth,
                       long K, bool y) {
  double worst = 0.0;
  for (int i = 0; i < truth.n_agents(); ++i)
    for (long k = 0; k <= K + 1; ++k) {
      const EpochState& a = est.at(i, k);
      const EpochState& b = truth.at(i, k);
      worst = std::max(worst, distance(y ? a.y : a.x, y ? b.y : b.x));
    }
  return worst;
}

TEST(ExactAttack, ReconstructsDeterministicRun) {
  const Simulated r = simulate(6, Variant::kIadmm, 6 * 50);
  const AttackReport rep = exact_recursion_attack(r.trace.transcript);
  const long K = r.trace.transcript.last_iteration();
  EXPECT_FALSE(rep.assumption_violated);
  EXPECT_LE(max_state_error(rep.estimate, r.truth, K, false), 1e-9);
  EXPECT_LE(max_state_error(rep.estimate, r.truth, K, true), 1e-9);
  // With the exact prox, y equals the local gradient after each activation.
  for (int i = 0; i < 6; ++i) {
    const auto& track = rep.estimate.track(i);
    for (std::size_t e = 1; e < track.size(); ++e)
      EXPECT_LE(distance(r.problem.objectives[i]->gradient(r.truth.track(i)[e].x),
                         track[e].y),
                1e-9);
  }
}

TEST(ExactAttack, AllZeroTokenGivesZeroEstimates) {
  Transcript t;
  t.n_agents = 3;
  t.dim = 2;
  t.rho = 5.0;
  t.z0 = Vec(2);
  for (long k = 0; k < 9; ++k)
    t.observations.push_back({k, static_cast<int>(k % 3),
                              static_cast<int>((k + 1) % 3), Vec(2)});
  const AttackReport rep = exact_recursion_attack(t);
  for (int i = 0; i < 3; ++i)
    for (const EpochState& e : rep.estimate.track(i)) {
      EXPECT_EQ(e.x, Vec(2));
      EXPECT_EQ(e.y, Vec(2));
    }
}

TEST(ExactAttack, FailsAgainstRandomInit) {
  const Simulated r = simulate(5, Variant::kIadmmRandInit, 100);
  const AttackReport rep =
      exact_recursion_attack(r.trace.transcript, Variant::kIadmmRandInit);
  EXPECT_TRUE(rep.assumption_violated);
  double min_norm = INFINITY;
  for (const AgentState& s : r.trace.initial) min_norm = std::min(min_norm, norm(s.x));
  for (int i = 0; i < 5; ++i)
    EXPECT_GE(distance(rep.estimate.track(i)[0].x, r.truth.track(i)[0].x), min_norm);
}

TEST(MeasurementSystem, RowsHoldOnTruth) {
  for (Variant v : {Variant::kIadmm, Variant::kIadmmRandInit, Variant::kPiadmm2}) {
    const Simulated r = simulate(5, v, 200);
    const long K = r.trace.transcript.last_iteration();
    for (int c = 0; c < 2; ++c) {
      const MeasurementSystem ms = build_ls_system(r.trace.transcript, v, K, c, bare());
      EXPECT_LE(system_residual(ms, r.truth), 1e-9) << to_string(v);
    }
  }
}

TEST(MeasurementSystem, RowsHoldWithMatchingConstantGamma) {
  Simulated r{make_ridge_problem(5, 30, 2, 2), generate_graph(5, 1.0, 2), {}, {}};
  SolverConfig c;
  c.variant = Variant::kPiadmm1;
  c.gamma = GammaSpec::constant(1.3);
  c.max_iters = 150;
  c.stop_eps = 0.0;
  r.trace = run(r.problem, r.graph, c);
  r.truth = r.trace.truth();
  AttackOptions o = bare();
  o.assumed_gamma = 1.3;
  const MeasurementSystem ms =
      build_ls_system(r.trace.transcript, Variant::kPiadmm1, 149, 0, o);
  EXPECT_LE(system_residual(ms, r.truth), 1e-9);
  o.assumed_gamma = 1.0;
  const MeasurementSystem wrong =
      build_ls_system(r.trace.transcript, Variant::kPiadmm1, 149, 0, o);
  EXPECT_GT(system_residual(wrong, r.truth), 1e-3);
}

TEST(MeasurementSystem, ShapeMatchesCount) {
  const Simulated r = simulate(4, Variant::kPiadmm1, 40);
  for (bool kkt : {false, true})
    for (bool pin : {false, true}) {
      AttackOptions o;
      o.kkt_row = kkt;
      o.pin_last_cycle = pin;
      for (long K : {3L, 17L, 39L}) {
        const MeasurementSystem ms =
            build_ls_system(r.trace.transcript, Variant::kPiadmm1, K, 1, o);
        const CountReport cr = count_equations_unknowns(Variant::kPiadmm1, K, 4, o);
        EXPECT_EQ(static_cast<long>(ms.system.rows), cr.implemented.equations);
        EXPECT_EQ(static_cast<long>(ms.system.cols), cr.implemented.unknowns);
      }
    }
}

TEST(MeasurementSystem, MinimalOneCycleSystem) {
  const Simulated r = simulate(5, Variant::kPiadmm1, 5);
  const MeasurementSystem ms =
      build_ls_system(r.trace.transcript, Variant::kPiadmm1, 4, 0, AttackOptions{});
  const LsqrResult res = lsqr(ms.system);
  EXPECT_EQ(res.solution.size(), ms.system.cols);
}

TEST(MeasurementSystem, RejectsBadHorizon) {
  const Simulated r = simulate(5, Variant::kPiadmm1, 20);
  EXPECT_THROW(build_ls_system(r.trace.transcript, Variant::kPiadmm1, 20, 0, bare()),
               ValidationError);
  EXPECT_THROW(build_ls_system(r.trace.transcript, Variant::kPiadmm1, 2, 0,
                               AttackOptions{}),
               ValidationError);
}

TEST(Counts, PublishedFormulas) {
  for (long K : {10L, 100L, 1000L})
    for (int n : {3, 10, 100}) {
      const CountReport p1 =
          count_equations_unknowns(Variant::kPiadmm1, K, n, bare());
      EXPECT_EQ(p1.with_gamma_unknowns, (DimensionCount{2 * K + n + 2, 3 * K + 2 * n + 3}));
      const CountReport a2 =
          count_equations_unknowns(Variant::kIadmmRandInit, K, n, bare());
      EXPECT_EQ(a2.single_init_row, (DimensionCount{2 * K + 3, 2 * K + 2 * n + 2}));
      EXPECT_EQ(a2.implemented, (DimensionCount{2 * K + n + 2, 2 * K + 2 * n + 2}));
      EXPECT_EQ(count_colluding(K, n), (DimensionCount{2 * (K / n) + 3, 3 * (K / n) + 5}));
    }
  EXPECT_EQ(count_colluding(100, 10), (DimensionCount{23, 35}));
}

TEST(LsqAttack, MatchesExactAttackOnDeterministicRun) {
  const Simulated r = simulate(5, Variant::kIadmm, 150);
  const AttackReport exact = exact_recursion_attack(r.trace.transcript);
  const AttackReport lsq = lsq_attack(r.trace.transcript, Variant::kIadmm, bare());
  const long K = r.trace.transcript.last_iteration();
  EXPECT_LE(max_state_error(lsq.estimate, exact.estimate, K, false), 1e-6);
  EXPECT_LE(max_state_error(lsq.estimate, exact.estimate, K, true), 1e-6);
}

TEST(LsqAttack, RandomizedRunRevealsLateXButNotEarlyState) {
  const Simulated r = simulate(10, Variant::kPiadmm1, 600);
  AttackOptions o;
  o.coordinates = {0};
  const AttackReport rep = lsq_attack(r.trace.transcript, Variant::kPiadmm1, o);
  const long K = r.trace.transcript.last_iteration();
  const auto err = [&](long k, bool y) {
    const EpochState& a = rep.estimate.at(0, k);
    const EpochState& b = r.truth.at(0, k);
    return std::abs((y ? a.y : a.x)[0] - (y ? b.y : b.x)[0]);
  };
  EXPECT_LT(err(K, false), 1e-2 * err(0, false));
  EXPECT_GT(err(0, false), 1.0);
  // Coordinates not requested are left unestimated.
  EXPECT_TRUE(std::isnan(rep.estimate.at(0, K).x[1]));
}

TEST(TerminalAttack, BoundsHoldForStoppedRun) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Simulated r = simulate(5, Variant::kIadmm, 100000, seed, 10.0, 1e-4);
    ASSERT_EQ(r.trace.status, RunStatus::kConverged);
    const AttackReport rep = terminal_backward_attack(r.trace.transcript);
    const BoundCheck b = check_terminal_bounds(r.trace.transcript, rep, r.truth, 1e-4);
    EXPECT_TRUE(b.precondition);
    ASSERT_FALSE(b.epochs.empty());
    EXPECT_TRUE(b.all_hold());
    // The earliest epoch carries the largest x bound.
    for (std::size_t e = 1; e < b.epochs.size(); ++e)
      EXPECT_GT(b.epochs[e].x_bound, b.epochs[e - 1].x_bound);
  }
}

TEST(TerminalAttack, PreconditionFailsWhenNotConverged) {
  const Simulated r = simulate(5, Variant::kIadmm, 23);
  const AttackReport rep = terminal_backward_attack(r.trace.transcript);
  const BoundCheck b = check_terminal_bounds(r.trace.transcript, rep, r.truth, 1e-4);
  EXPECT_FALSE(b.precondition);
  EXPECT_FALSE(b.all_hold());
}

TEST(ColludingAttack, SystemShapeAndDualGap) {
  // Early-epoch y errors exceed the x errors by about rho; rho = 20 keeps
  // the ratio clear of 10.
  const Simulated r = simulate(5, Variant::kPiadmm1, 5 * 40, 1, 20.0);
  const int target = 2;
  AttackOptions o = bare();
  const AttackReport bare_rep =
      colluding_attack(r.trace.transcript, target, r.truth.without_agent(target), o);
  const long acts = 40;
  EXPECT_EQ(bare_rep.solves[0].rows, 1 + 2 * acts);
  EXPECT_EQ(bare_rep.solves[0].cols, 2 * (acts + 1));

  o.kkt_row = true;
  o.pin_last_cycle = true;
  o.coordinates = {0};
  const AttackReport rep =
      colluding_attack(r.trace.transcript, target, r.truth.without_agent(target), o);
  EXPECT_EQ(rep.solves[0].rows, 1 + 2 * acts + 2);
  double ex = 0.0, ey = 0.0;
  for (int e = 0; e < 5; ++e) {
    ex += std::abs(rep.estimate.track(target)[e].x[0] - r.truth.track(target)[e].x[0]);
    ey += std::abs(rep.estimate.track(target)[e].y[0] - r.truth.track(target)[e].y[0]);
  }
  EXPECT_GT(ey, 10.0 * ex);
}

TEST(ColludingAttack, RequiresColluderHistories) {
  const Simulated r = simulate(4, Variant::kPiadmm1, 40);
  EXPECT_THROW(colluding_attack(r.trace.transcript, 1, StateHistory(4), AttackOptions{}),
               ValidationError);
  EXPECT_THROW(colluding_attack(r.trace.transcript, 7, r.truth, AttackOptions{}),
               ValidationError);
}

TEST(Scoring, RowsAndCsv) {
  const Simulated r = simulate(4, Variant::kIadmm, 12);
  const AttackReport rep = exact_recursion_attack(r.trace.transcript);
  const std::vector<ScoreRow> rows = score_agent(rep.estimate, &r.truth, 1, 12, {0, 1});
  ASSERT_EQ(rows.size(), 26u);
  for (const ScoreRow& s : rows) {
    EXPECT_GE(s.abs_err_x, 0.0);
    EXPECT_LE(s.abs_err_x, 1e-9);
  }
  const std::vector<ScoreRow> blind = score_agent(rep.estimate, nullptr, 1, 3, {0});
  EXPECT_TRUE(std::isnan(blind[0].truth_x));

  std::ostringstream os;
  write_attack_csv(os, 1, rows);
  std::istringstream in(os.str());
  std::string l1, l2, l3;
  std::getline(in, l1);
  std::getline(in, l2);
  std::getline(in, l3);
  EXPECT_EQ(l1, "#schema=1");
  EXPECT_EQ(l2, "#agent=2");
  EXPECT_EQ(l3, "k,coordinate,truth_x,est_x,truth_y,est_y,abs_err_x,abs_err_y");
}

}  // namespace
}  // namespace iadmm
