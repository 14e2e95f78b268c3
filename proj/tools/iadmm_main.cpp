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
// iadmm: run, attack, sweep, verify.
//
// Exit codes: 0 success, 1 invalid input, 2 runtime failure, 3 verify
// failure.
#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "iadmm/errors.hpp"
#include "iadmm/harness.hpp"
#include "iadmm/verify.hpp"

namespace {

using namespace iadmm;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitVerify = 3;

struct Common {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed_override;
  bool quiet = false;
};

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg =
      c.config_path.empty() ? ExperimentConfig{} : load_config(c.config_path);
  if (c.seed_override) cfg.override_seeds(*c.seed_override);
  cfg.validate();
  return cfg;
}

int cmd_run(const Common& c) {
  const Experiment e = prepare(load(c));
  const RunTrace trace = run_experiment(e);
  const RunSummary s = summarize(e, trace);
  write_run_outputs(c.out_dir, e, trace, s);
  if (!c.quiet) write_summary(std::cout, s);
  return s.status == RunStatus::kDiverged ? kExitRuntime : kExitOk;
}

int cmd_attack(const Common& c, const std::string& transcript_path) {
  const Experiment e = prepare(load(c));
  // The simulator is re-run for ground truth; it is used for scoring only,
  // and only when the transcript is the one this config produces.
  const RunTrace sim = run_experiment(e);
  Transcript transcript = sim.transcript;
  bool matches = true;
  if (!transcript_path.empty()) {
    std::ifstream in(transcript_path);
    if (!in) throw ValidationError("cannot open transcript '" + transcript_path + "'");
    transcript = read_transcript_csv(in);
    const auto& a = transcript.observations;
    const auto& b = sim.transcript.observations;
    matches = a.size() <= b.size();
    for (std::size_t i = 0; matches && i < a.size(); ++i)
      matches = a[i].from == b[i].from && a[i].z_next == b[i].z_next;
  }
  StateHistory truth;
  if (matches) truth = sim.truth();
  const AttackOutcome out = run_attack(e, transcript, matches ? &truth : nullptr);

  std::filesystem::create_directories(c.out_dir);
  const int agent = e.config.attack == AttackKind::kTerminal
                        ? transcript.sender(out.horizon)
                        : e.config.target;
  write_file_atomic(std::filesystem::path(c.out_dir) / "attack.csv",
                    [&](std::ostream& o) { write_attack_csv(o, agent, out.rows); });
  write_file_atomic(std::filesystem::path(c.out_dir) / "attack_summary.txt",
                    [&](std::ostream& o) { write_attack_summary(o, out); });
  if (!c.quiet) {
    write_attack_summary(std::cout, out);
    if (!matches)
      std::cout << "note=transcript differs from this config's run; "
                   "truth columns left empty\n";
  }
  return kExitOk;
}

int cmd_sweep(const Common& c, const std::string& sweep_path, bool serial) {
  const ExperimentConfig base = load(c);
  const SweepSpec spec = load_sweep(sweep_path);
  const std::vector<SweepJob> jobs = expand_sweep(base, spec);
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<SweepRow> rows =
      serial ? run_sweep_serial(jobs) : run_sweep_parallel(jobs);
  std::filesystem::create_directories(c.out_dir);
  write_file_atomic(std::filesystem::path(c.out_dir) / "sweep.csv",
                    [&](std::ostream& o) { write_sweep_csv(o, spec, rows); });
  std::size_t failed = 0;
  for (const SweepRow& r : rows)
    if (r.status == "error" || r.status == "diverged") ++failed;
  if (!c.quiet)
    std::cout << "jobs=" << jobs.size() << "\nrows=" << rows.size()
              << "\nfailed_rows=" << failed << "\nseconds="
              << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                     .count()
              << '\n';
  return kExitOk;
}

int cmd_verify(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<CheckResult> checks = run_verify_suite();
  bool ok = true;
  if (c.quiet) {
    for (const CheckResult& r : checks)
      if (!r.informational && !r.passed) {
        ok = false;
        std::cout << "FAIL " << r.name << ": " << r.detail << '\n';
      }
  } else {
    ok = report_checks(std::cout, checks);
    std::cout << (ok ? "verify: all checks passed" : "verify: FAILED") << " in "
              << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                     .count()
              << " s\n";
  }
  return ok ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental token-passing ADMM simulator and eavesdropper attacks"};
  app.require_subcommand(1);
  Common common;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub, bool with_config) {
    if (with_config)
      sub->add_option("--config", common.config_path, "experiment config file")
          ->check(CLI::ExistingFile);
    sub->add_option("--out", common.out_dir, "output directory")
        ->capture_default_str();
    sub->add_option("--seed-override", seed,
                    "use this seed for the graph, data and solver streams");
    sub->add_flag("--quiet", common.quiet, "print nothing on success");
  };

  CLI::App* run = app.add_subcommand("run", "simulate one configured run");
  add_common(run, true);

  CLI::App* attack = app.add_subcommand("attack", "attack a run's transcript");
  add_common(attack, true);
  std::string transcript_path;
  attack->add_option("--transcript", transcript_path,
                     "transcript CSV (default: simulate the config)")
      ->check(CLI::ExistingFile);

  CLI::App* sweep = app.add_subcommand("sweep", "grid x seeds sweep");
  add_common(sweep, true);
  std::string sweep_path;
  bool serial = false;
  sweep->add_option("--sweep", sweep_path, "sweep spec file")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_flag("--serial", serial, "run jobs one at a time");

  CLI::App* verify = app.add_subcommand("verify", "run the invariant suite");
  add_common(verify, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }
  for (CLI::App* sub : {run, attack, sweep, verify})
    if (sub->parsed() && sub->count("--seed-override")) common.seed_override = seed;

  try {
    if (run->parsed()) return cmd_run(common);
    if (attack->parsed()) return cmd_attack(common, transcript_path);
    if (sweep->parsed()) return cmd_sweep(common, sweep_path, serial);
    return cmd_verify(common);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
