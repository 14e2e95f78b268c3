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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "iadmm/config.hpp"
#include "iadmm/errors.hpp"
#include "iadmm/harness.hpp"

namespace iadmm {
namespace {

namespace fs = std::filesystem;

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig small() {
  ExperimentConfig c;
  c.n_agents = 5;
  c.eta = 1.0;
  c.max_iters = 200;
  return c;
}

TEST(Config, DefaultsAndOverrides) {
  const ExperimentConfig c = parse(
      "# comment\n"
      "problem.kind = logistic\n"
      "solver.x_update = first_order\n"
      "solver.variant = piadmm1\n"
      "solver.gamma = uniform:0.9,1.1\n"
      "attack.target = 3\n"
      "attack.coordinates = 1, 2\n");
  EXPECT_EQ(c.problem, ProblemKind::kLogistic);
  EXPECT_EQ(c.variant, Variant::kPiadmm1);
  EXPECT_EQ(c.gamma, GammaSpec::uniform(0.9, 1.1));
  EXPECT_EQ(c.target, 2);
  EXPECT_EQ(c.coordinates, (std::vector<int>{0, 1}));
  EXPECT_EQ(c.n_agents, 20);
  EXPECT_DOUBLE_EQ(c.rho, 10.0);
}

TEST(Config, RoundTripIsIdentity) {
  ExperimentConfig c = small();
  c.variant = Variant::kPiadmm2;
  c.sigma = 1e-3;
  c.gamma = GammaSpec::lemma3_floor(1.01);
  c.stop_eps = 1.0 / 3.0;
  c.coordinates = {1};
  c.horizon = 77;
  c.graph_seed = 18446744073709551615ull;
  const ExperimentConfig back = parse(serialize_config(c));
  EXPECT_EQ(back, c);
  EXPECT_EQ(serialize_config(back), serialize_config(c));
}

TEST(Config, ErrorsNameLineAndKey) {
  try {
    parse("problem.n_agents = 10\nsolver.rhoo = 3\n");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("solver.rhoo"), std::string::npos) << msg;
  }
  EXPECT_THROW(parse("solver.rho = ten\n"), ValidationError);
  EXPECT_THROW(parse("solver.rho 10\n"), ValidationError);
  EXPECT_THROW(parse("solver.gamma = triangular:1\n"), ValidationError);
  EXPECT_THROW(parse("attack.kkt_row = maybe\n"), ValidationError);
}

TEST(Config, ValidateRejectsBadCombinations) {
  ExperimentConfig c;
  c.problem = ProblemKind::kLogistic;  // exact prox by default
  EXPECT_THROW(c.validate(), ValidationError);
  c = ExperimentConfig{};
  c.target = 20;
  EXPECT_THROW(c.validate(), ValidationError);
  c = ExperimentConfig{};
  c.eta = 0.05;
  EXPECT_THROW(c.validate(), ValidationError);
  c = ExperimentConfig{};
  c.coordinates = {2};
  EXPECT_THROW(c.validate(), ValidationError);
  EXPECT_NO_THROW(ExperimentConfig{}.validate());
}

TEST(Config, GammaText) {
  EXPECT_EQ(parse_gamma("constant:1.5"), GammaSpec::constant(1.5));
  EXPECT_EQ(parse_gamma("lemma3_floor:1.01"), GammaSpec::lemma3_floor(1.01));
  EXPECT_EQ(parse_gamma(to_string(GammaSpec::uniform(0.5, 2))),
            GammaSpec::uniform(0.5, 2));
}

TEST(Config, SeedOverrideTouchesEveryStream) {
  ExperimentConfig c;
  c.override_seeds(42);
  EXPECT_EQ(c.graph_seed, 42u);
  EXPECT_EQ(c.data_seed, 42u);
  EXPECT_EQ(c.solver_seed, 42u);
}

TEST(RunOutputs, FilesAreWrittenAndReproducible) {
  const fs::path root = fs::temp_directory_path() / "iadmm_harness_test";
  fs::remove_all(root);
  const Experiment e = prepare(small());
  for (const char* d : {"a", "b"}) {
    const RunTrace t = run_experiment(e);
    write_run_outputs(root / d, e, t, summarize(e, t));
  }
  for (const char* f : {"trace.csv", "transcript.csv", "summary.txt", "config.txt",
                        "edges.txt", "plot.gp"}) {
    ASSERT_TRUE(fs::exists(root / "a" / f)) << f;
    EXPECT_EQ(slurp(root / "a" / f), slurp(root / "b" / f)) << f;
  }
  EXPECT_EQ(slurp(root / "a" / "trace.csv").rfind("#schema=1\n", 0), 0u);
  // config.txt loads back to the same experiment.
  EXPECT_EQ(load_config((root / "a" / "config.txt").string()), e.config);
  for (const auto& entry : fs::directory_iterator(root / "a"))
    EXPECT_EQ(entry.path().string().find(".tmp"), std::string::npos);
  fs::remove_all(root);
}

TEST(RunOutputs, SummaryCarriesRegimeAndKkt) {
  const Experiment e = prepare(small());
  const RunTrace t = run_experiment(e);
  std::ostringstream os;
  write_summary(os, summarize(e, t));
  const std::string s = os.str();
  for (const char* key : {"status=", "final_accuracy=", "comm_units=", "kkt_gradient=",
                          "kkt_dual_sum=", "kkt_consensus=", "lemma2="})
    EXPECT_NE(s.find(key), std::string::npos) << key;
}

TEST(Transcript, CsvRoundTripAndValidation) {
  const Experiment e = prepare(small());
  const RunTrace t = run_experiment(e);
  std::stringstream ss;
  write_transcript_csv(ss, t.transcript);
  const Transcript back = read_transcript_csv(ss);
  ASSERT_EQ(back.observations.size(), t.transcript.observations.size());
  for (std::size_t k = 0; k < back.observations.size(); ++k) {
    EXPECT_EQ(back.observations[k].from, t.transcript.observations[k].from);
    EXPECT_EQ(back.observations[k].z_next, t.transcript.observations[k].z_next);
  }
  Transcript broken = t.transcript;
  broken.observations[3].from = (broken.observations[3].from + 1) % 5;
  EXPECT_THROW(broken.validate(), ValidationError);
}

TEST(Attack, RejectsMismatchedTranscript) {
  const Experiment e = prepare(small());
  const RunTrace t = run_experiment(e);
  ExperimentConfig other = small();
  other.rho = 5.0;
  EXPECT_THROW(run_attack(prepare(other), t.transcript, nullptr), ValidationError);
  ExperimentConfig far = small();
  far.horizon = 10000;
  EXPECT_THROW(run_attack(prepare(far), t.transcript, nullptr), ValidationError);
}

TEST(Attack, ExactAttackOnDeterministicRunScoresNearZero) {
  ExperimentConfig c = small();
  c.attack = AttackKind::kExact;
  const Experiment e = prepare(c);
  const RunTrace t = run_experiment(e);
  const StateHistory truth = t.truth();
  const AttackOutcome out = run_attack(e, t.transcript, &truth);
  EXPECT_TRUE(out.have_truth);
  EXPECT_LE(out.max_abs_err_x, 1e-9);
  EXPECT_LE(out.max_abs_err_y, 1e-9);
  EXPECT_EQ(out.rows.size(), static_cast<std::size_t>(2 * (out.horizon + 2)));
}

TEST(Sweep, ParseAndExpand) {
  std::istringstream in(
      "# grid\n"
      "graph.eta = 0.5 | 1.0\n"
      "solver.variant = iadmm | wadmm | piadmm1\n"
      "seeds = count:3\n");
  const SweepSpec spec = parse_sweep(in);
  ASSERT_EQ(spec.axes.size(), 2u);
  EXPECT_EQ(spec.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
  const std::vector<SweepJob> jobs = expand_sweep(small(), spec);
  ASSERT_EQ(jobs.size(), 18u);
  EXPECT_EQ(jobs[0].values, (std::vector<std::string>{"0.5", "iadmm"}));
  EXPECT_EQ(jobs[3].values, (std::vector<std::string>{"0.5", "wadmm"}));
  EXPECT_EQ(jobs[17].values, (std::vector<std::string>{"1.0", "piadmm1"}));
  EXPECT_EQ(jobs[4].seed, 2u);
  EXPECT_EQ(jobs[4].config.data_seed, 2u);
  EXPECT_EQ(jobs[4].config.variant, Variant::kWadmmBaseline);

  std::istringstream bad_key("solver.rhoo = 1 | 2\n");
  EXPECT_THROW(parse_sweep(bad_key), ValidationError);
  std::istringstream bad_seed("seeds = one\n");
  EXPECT_THROW(parse_sweep(bad_seed), ValidationError);
}

TEST(Sweep, SerialAndParallelAgreeAndFailuresAreIsolated) {
  // rho = 0.5 sits below L, so the step-size floor cannot be formed and
  // that job fails at run time; the others must be unaffected.
  std::istringstream in("solver.rho = 0.5 | 10\nseeds = 1 | 2\n");
  const SweepSpec spec = parse_sweep(in);
  ExperimentConfig base = small();
  base.variant = Variant::kPiadmm1;
  base.gamma = GammaSpec::lemma3_floor(1.01);
  base.max_iters = 50;
  const std::vector<SweepJob> jobs = expand_sweep(base, spec);
  const std::vector<SweepRow> a = run_sweep_serial(jobs);
  const std::vector<SweepRow> b = run_sweep_parallel(jobs);
  std::ostringstream sa, sb;
  write_sweep_csv(sa, spec, a);
  write_sweep_csv(sb, spec, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(sa.str().rfind("#schema=1\n", 0), 0u);

  int errors = 0, ok = 0;
  for (const SweepRow& r : a) {
    if (r.status == "error") {
      ++errors;
      EXPECT_EQ(r.k, -1);
      EXPECT_EQ(r.values[0], "0.5");
      EXPECT_FALSE(r.error.empty());
    } else {
      ++ok;
      EXPECT_EQ(r.values[0], "10");
    }
  }
  EXPECT_EQ(errors, 2);
  EXPECT_GT(ok, 2);
}

TEST(Sweep, RowsDoNotDependOnJobOrder) {
  std::istringstream in("solver.variant = iadmm | piadmm2\nsolver.sigma = 0.001\nseeds = 1 | 2\n");
  const SweepSpec spec = parse_sweep(in);
  std::vector<SweepJob> jobs = expand_sweep(small(), spec);
  std::vector<SweepRow> forward;
  for (const SweepJob& j : jobs) {
    auto rows = run_sweep_job(j);
    forward.insert(forward.end(), rows.begin(), rows.end());
  }
  std::vector<std::vector<SweepRow>> backward(jobs.size());
  for (std::size_t j = jobs.size(); j-- > 0;) backward[j] = run_sweep_job(jobs[j]);
  std::size_t idx = 0;
  for (const auto& rows : backward)
    for (const SweepRow& r : rows) {
      ASSERT_LT(idx, forward.size());
      EXPECT_EQ(r.accuracy, forward[idx].accuracy);
      EXPECT_EQ(r.k, forward[idx].k);
      ++idx;
    }
  EXPECT_EQ(idx, forward.size());
}

}  // namespace
}  // namespace iadmm
