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
// Config-driven runs, attacks and sweeps, and the files they write.
#ifndef IADMM_HARNESS_HPP_
#define IADMM_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "iadmm/adversary.hpp"
#include "iadmm/config.hpp"
#include "iadmm/consensus.hpp"

namespace iadmm {

// Validated config plus the problem and graph it describes.
struct Experiment {
  ExperimentConfig config;
  Problem problem;
  Graph graph;
};

Experiment prepare(const ExperimentConfig& config);

struct RunSummary {
  RunStatus status = RunStatus::kMaxIters;
  long iterations = 0;
  long comm_units = 0;
  double final_accuracy = 0.0;
  double best_accuracy = 0.0;  // over recorded checkpoints
  KktResiduals kkt{0.0, 0.0, 0.0};
  RegimeReport regime;
  double lipschitz = 0.0;
  double optimal_value = 0.0;
  std::string diagnostic;
};

RunSummary summarize(const Experiment& e, const RunTrace& trace);
// key=value lines.
void write_summary(std::ostream& out, const RunSummary& s);

RunTrace run_experiment(const Experiment& e);

// Writes via a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& body);

// trace.csv, transcript.csv, summary.txt, config.txt, edges.txt, plot.gp.
void write_run_outputs(const std::filesystem::path& dir, const Experiment& e,
                       const RunTrace& trace, const RunSummary& summary);

struct AttackOutcome {
  AttackReport report;
  long horizon = 0;
  bool have_truth = false;
  std::vector<ScoreRow> rows;  // configured target, all requested coords
  std::optional<BoundCheck> bounds;  // terminal attack with truth
  CountReport counts;
  double max_abs_err_x = 0.0;
  double max_abs_err_y = 0.0;
};

// `truth` may be null; scoring columns are then left empty.
AttackOutcome run_attack(const Experiment& e, const Transcript& transcript,
                         const StateHistory* truth);
void write_attack_summary(std::ostream& out, const AttackOutcome& a);

// Sweep spec: one axis per line, "key = v1 | v2 | ...", plus
// "seeds = s1 | s2 | ..." or "seeds = count:10" (seeds 1..10). Each seed is
// applied to the graph, data and solver streams.
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

struct SweepSpec {
  std::vector<SweepAxis> axes;
  std::vector<std::uint64_t> seeds{1};
};

SweepSpec parse_sweep(std::istream& in);
SweepSpec load_sweep(const std::string& path);

struct SweepJob {
  std::size_t point = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> values;  // one per axis
  ExperimentConfig config;
};

// Grid points in row-major axis order, seeds innermost.
std::vector<SweepJob> expand_sweep(const ExperimentConfig& base,
                                   const SweepSpec& spec);

struct SweepRow {
  std::size_t point = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> values;
  long k = -1;
  long comm_units = 0;
  double accuracy = 0.0;
  double lagrangian = 0.0;
  double r_primal = 0.0;
  std::string status;
  std::string error;
};

// One row per (job, checkpoint). A job that throws contributes a single
// row with k = -1 and the message; the sweep continues.
std::vector<SweepRow> run_sweep_job(const SweepJob& job);

// Rows come back in job order whatever the execution order, so serial and
// parallel runs produce identical output.
std::vector<SweepRow> run_sweep_serial(const std::vector<SweepJob>& jobs);
std::vector<SweepRow> run_sweep_parallel(const std::vector<SweepJob>& jobs);

void write_sweep_csv(std::ostream& out, const SweepSpec& spec,
                     const std::vector<SweepRow>& rows);

}  // namespace iadmm

#endif  // IADMM_HARNESS_HPP_
