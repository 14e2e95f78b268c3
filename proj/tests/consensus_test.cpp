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

#include "iadmm/consensus.hpp"
#include "iadmm/errors.hpp"

namespace iadmm {
namespace {

struct Fixture {
  Problem problem;
  Graph graph;
};

Fixture ridge(int n, std::uint64_t seed = 1) {
  return {make_ridge_problem(n, 30, 2, seed),
          generate_graph(n, n < 10 ? 1.0 : 0.3, seed)};
}

SolverConfig base(Variant v, long iters) {
  SolverConfig c;
  c.variant = v;
  c.max_iters = iters;
  c.stop_eps = 0.0;
  return c;
}

TEST(Initialize, ZeroAndRandomInit) {
  SolverConfig c;
  c.variant = Variant::kIadmm;
  InitialState zero = initialize(c, 4, 3);
  for (const AgentState& s : zero.states) {
    EXPECT_EQ(s.x, Vec(3));
    EXPECT_EQ(s.y, Vec(3));
  }
  EXPECT_EQ(zero.token.z, Vec(3));

  c.variant = Variant::kPiadmm1;
  c.init_scale = 100.0;
  InitialState rnd = initialize(c, 4, 3);
  for (const AgentState& s : rnd.states)
    for (int j = 0; j < 3; ++j) {
      EXPECT_GE(s.x[j], 0.0);
      EXPECT_LT(s.x[j], 100.0);
      EXPECT_DOUBLE_EQ(s.y[j], c.rho * s.x[j]);
    }
  EXPECT_EQ(rnd.token.z, Vec(3));
  // Same seed, same draws, whichever random-init variant asks.
  c.variant = Variant::kPiadmm2;
  EXPECT_EQ(initialize(c, 4, 3).states[2].x, rnd.states[2].x);
}

TEST(Updates, DualAndTokenFormulas) {
  const Vec y{1.0, -1.0}, z{2.0, 0.0}, x{0.5, 0.5};
  const Vec y_new = y_update(y, z, x, 4.0);
  EXPECT_EQ(y_new, (Vec{7.0, -3.0}));  // y + 4 (z - x)

  const AgentState before{{1.0, 1.0}, {2.0, 4.0}};
  const AgentState after{{3.0, 0.0}, {6.0, -2.0}};
  // z + (1/N)[(x' - y'/rho) - (x - y/rho)], rho = 2, N = 4
  // (3 - 3, 0 + 1) - (1 - 1, 1 - 2) = (0, 2)
  const Vec z_new = z_update_incremental(Vec{1.0, 1.0}, before, after, 2.0, 4);
  EXPECT_EQ(z_new, (Vec{1.0, 1.5}));
}

TEST(Updates, FirstOrderStep) {
  const Fixture fx = ridge(4);
  const LocalObjective& f = *fx.problem.objectives[0];
  const AgentState s{{0.3, -0.2}, {1.0, 2.0}};
  const Vec z{0.1, 0.4};
  const Vec x = x_update(f, s, z, 5.0, XUpdateMode::kFirstOrder);
  const Vec expect = z + s.y / 5.0 - f.gradient(s.x) / 5.0;
  EXPECT_EQ(x, expect);
}

TEST(Updates, ExactProxNeedsClosedForm) {
  const Problem p = make_logistic_problem(4, 30, 2, 1, 1);
  const AgentState s{{0.0, 0.0}, {0.0, 0.0}};
  EXPECT_THROW(x_update(*p.objectives[0], s, Vec(2), 1.0, XUpdateMode::kExactProx),
               UnsupportedError);
}

TEST(Gamma, LowerBoundFormula) {
  // max((2 rho^2 + 4 rho + 1)/(rho - L), 2 (rho + 2) N)
  EXPECT_DOUBLE_EQ(gamma_lower_bound(10.0, 2.0, 5), 120.0);
  EXPECT_DOUBLE_EQ(gamma_lower_bound(3.0, 2.5, 1), 62.0);  // 31 / 0.5
  EXPECT_THROW(gamma_lower_bound(2.0, 2.0, 5), ValidationError);
}

TEST(Gamma, UniformDrawsStayInSupport) {
  Engine rng(4);
  const GammaSpec g = GammaSpec::uniform(0.9, 1.1);
  for (int i = 0; i < 1000; ++i) {
    const double v = sample_gamma(g, 10.0, 1.0, 10, rng);
    EXPECT_GE(v, 0.9);
    EXPECT_LT(v, 1.1);
  }
}

TEST(SolverConfig, Validation) {
  SolverConfig c;
  c.rho = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = SolverConfig{};
  c.sigma = -1.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = SolverConfig{};
  c.gamma = GammaSpec::uniform(0.0, 1.0);
  EXPECT_THROW(c.validate(), ValidationError);
  c = SolverConfig{};
  c.gamma = GammaSpec::uniform(1.2, 1.1);
  EXPECT_THROW(c.validate(), ValidationError);
  c = SolverConfig{};
  c.gamma = GammaSpec::lemma3_floor(0.99);
  EXPECT_THROW(c.validate(), ValidationError);
  EXPECT_THROW(parse_variant("admm"), ValidationError);
  EXPECT_EQ(parse_variant("piadmm2"), Variant::kPiadmm2);
}

TEST(Accuracy, AveragesRelativeDistancesAndSkipsDegenerateAgents) {
  const Vec opt{1.0, 0.0};
  const std::vector<AgentState> init{{{3.0, 0.0}, {}}, {{1.0, 0.0}, {}}, {{1.0, 2.0}, {}}};
  const std::vector<AgentState> now{{{2.0, 0.0}, {}}, {{5.0, 0.0}, {}}, {{1.0, 0.5}, {}}};
  int excluded = -1;
  // agent 1 starts at the optimum and is left out: (1/2 + 1/4) / 2
  EXPECT_DOUBLE_EQ(accuracy(now, opt, init, &excluded), 0.375);
  EXPECT_EQ(excluded, 1);
}

TEST(Solver, FirstActivationByHand) {
  const Fixture fx = ridge(3);
  Solver s(fx.problem, fx.graph, base(Variant::kIadmm, 10));
  const IterationRecord r = s.step();
  EXPECT_EQ(r.k, 0);
  EXPECT_EQ(r.agent, 0);
  const double rho = 10.0;
  const Vec x = *fx.problem.objectives[0]->prox(Vec(2), Vec(2), rho);
  const Vec y = Vec(2) + rho * (Vec(2) - x);
  const Vec z = (x - y / rho) / 3.0;
  EXPECT_EQ(s.states()[0].x, x);
  EXPECT_EQ(s.states()[0].y, y);
  for (int j = 0; j < 2; ++j) EXPECT_NEAR(s.token().z[j], z[j], 1e-15);
  EXPECT_EQ(s.states()[1].x, Vec(2));
  EXPECT_EQ(s.next_agent(), 1);
  EXPECT_EQ(r.comm_units, 1);
}

TEST(Solver, InactiveAgentsAreFrozen) {
  const Fixture fx = ridge(6);
  SolverConfig c = base(Variant::kPiadmm2, 60);
  c.sigma = 1e-2;
  Solver s(fx.problem, fx.graph, c);
  for (int k = 0; k < 40; ++k) {
    const std::vector<AgentState> before = s.states();
    const IterationRecord r = s.step();
    for (int i = 0; i < 6; ++i) {
      if (i == r.agent) continue;
      EXPECT_EQ(s.states()[i].x, before[i].x);
      EXPECT_EQ(s.states()[i].y, before[i].y);
    }
  }
}

TEST(Solver, TokenConservationAcrossVariants) {
  const Fixture fx = ridge(8, 3);
  for (Variant v : {Variant::kIadmm, Variant::kIadmmRandInit, Variant::kPiadmm1,
                    Variant::kPiadmm2, Variant::kWadmmBaseline}) {
    SolverConfig c = base(v, 800);
    c.gamma = GammaSpec::uniform(0.9, 1.1);
    c.sigma = v == Variant::kPiadmm2 ? 1e-3 : 0.0;
    const RunTrace t = run(fx.problem, fx.graph, c);
    for (const IterationRecord& r : t.records)
      ASSERT_LE(r.token_gap, 1e-10) << to_string(v) << " k=" << r.k;
  }
}

TEST(Solver, IadmmConvergesToKkt) {
  const Fixture fx = ridge(10, 2);
  SolverConfig c = base(Variant::kIadmm, 200000);
  c.stop_eps = 1e-10;
  const RunTrace t = run(fx.problem, fx.graph, c);
  EXPECT_EQ(t.status, RunStatus::kConverged);
  const KktResiduals r = kkt_residuals(fx.problem, t.final_states, t.final_token.z);
  EXPECT_LT(r.gradient, 1e-6);
  EXPECT_LT(r.dual_sum, 1e-6);
  EXPECT_LT(r.consensus, 1e-6);
  EXPECT_LT(t.records.back().accuracy, 1e-8);
}

TEST(Solver, LogisticFirstOrderConverges) {
  const Problem p = make_logistic_problem(10, 30, 2, 1, 1);
  const Graph g = generate_graph(10, 0.3, 1);
  SolverConfig c = base(Variant::kIadmm, 100000);
  c.rho = 1.0;
  c.x_update = XUpdateMode::kFirstOrder;
  c.stop_eps = 1e-9;
  const RunTrace t = run(p, g, c);
  EXPECT_EQ(t.status, RunStatus::kConverged);
  const KktResiduals r = kkt_residuals(p, t.final_states, t.final_token.z);
  EXPECT_LT(r.gradient, 1e-6);
  EXPECT_LT(r.dual_sum, 1e-6);
}

TEST(Solver, UnstableFirstOrderRunIsFlaggedDiverged) {
  const Fixture fx = ridge(5);
  SolverConfig c = base(Variant::kIadmmRandInit, 100000);
  c.rho = 0.05;
  c.x_update = XUpdateMode::kFirstOrder;
  const RunTrace t = run(fx.problem, fx.graph, c);
  EXPECT_EQ(t.status, RunStatus::kDiverged);
  EXPECT_FALSE(t.diagnostic.empty());
  EXPECT_LT(t.iterations, 100000);
}

TEST(Solver, NoiselessPiadmm2MatchesRandomInitBitForBit) {
  const Fixture fx = ridge(6, 4);
  const RunTrace a = run(fx.problem, fx.graph, base(Variant::kPiadmm2, 300));
  const RunTrace b = run(fx.problem, fx.graph, base(Variant::kIadmmRandInit, 300));
  ASSERT_EQ(a.activations.size(), b.activations.size());
  for (std::size_t k = 0; k < a.activations.size(); ++k) {
    ASSERT_EQ(a.activations[k].x, b.activations[k].x);
    ASSERT_EQ(a.activations[k].y, b.activations[k].y);
  }
}

TEST(Solver, UnitGammaMatchesRandomInit) {
  const Fixture fx = ridge(6, 4);
  SolverConfig c = base(Variant::kPiadmm1, 300);
  c.gamma = GammaSpec::constant(1.0);
  const RunTrace a = run(fx.problem, fx.graph, c);
  const RunTrace b = run(fx.problem, fx.graph, base(Variant::kIadmmRandInit, 300));
  EXPECT_EQ(a.final_states.back().x, b.final_states.back().x);
  EXPECT_EQ(a.final_token.z, b.final_token.z);
}

TEST(Solver, SameSeedSameTrace) {
  const Fixture fx = ridge(7, 5);
  SolverConfig c = base(Variant::kPiadmm1, 500);
  c.gamma = GammaSpec::uniform(0.9, 1.1);
  std::ostringstream a, b;
  write_trace_csv(a, run(fx.problem, fx.graph, c));
  write_trace_csv(b, run(fx.problem, fx.graph, c));
  EXPECT_EQ(a.str(), b.str());
  c.seed = 2;
  std::ostringstream d;
  write_trace_csv(d, run(fx.problem, fx.graph, c));
  EXPECT_NE(a.str(), d.str());
}

TEST(Solver, TraceCsvSchema) {
  const Fixture fx = ridge(4);
  SolverConfig c = base(Variant::kIadmm, 8);
  c.record_every = 0;
  const RunTrace t = run(fx.problem, fx.graph, c);
  std::ostringstream os;
  write_trace_csv(os, t);
  std::istringstream in(os.str());
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, "#schema=1");
  // one record per cycle (k = 3, 7); the final step is k = 7 already
  ASSERT_EQ(t.records.size(), 2u);
  EXPECT_EQ(t.records[0].k, 3);
  EXPECT_EQ(t.records[1].k, 7);
}

TEST(Solver, WalkCountsOneUnitPerHop) {
  const Fixture fx = ridge(9);
  const RunTrace t = run(fx.problem, fx.graph, base(Variant::kWadmmBaseline, 250));
  EXPECT_EQ(t.records.back().comm_units, 250);
  for (std::size_t k = 1; k < t.activations.size(); ++k)
    EXPECT_TRUE(fx.graph.has_edge(t.activations[k - 1].agent, t.activations[k].agent));
}

TEST(Regime, Flags) {
  const Fixture fx = ridge(5);
  const double L = fx.problem.lipschitz;
  SolverConfig c;
  c.rho = 2 * L + 2;
  EXPECT_TRUE(condition_regime(fx.problem, c).lemma2);
  c.rho = 2 * L + 1;
  EXPECT_FALSE(condition_regime(fx.problem, c).lemma2);

  c.variant = Variant::kPiadmm1;
  c.rho = L + 1;
  c.gamma = GammaSpec::lemma3_floor(1.01);
  EXPECT_TRUE(condition_regime(fx.problem, c).lemma3);
  c.gamma = GammaSpec::uniform(0.9, 1.1);
  EXPECT_FALSE(condition_regime(fx.problem, c).lemma3);
}

}  // namespace
}  // namespace iadmm
