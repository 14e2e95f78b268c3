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
#include "iadmm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "iadmm/errors.hpp"

namespace iadmm {

namespace fs = std::filesystem;

Experiment prepare(const ExperimentConfig& config) {
  config.validate();
  return Experiment{config, build_problem(config), build_graph(config)};
}

RunTrace run_experiment(const Experiment& e) {
  return run(e.problem, e.graph, solver_config(e.config));
}

RunSummary summarize(const Experiment& e, const RunTrace& trace) {
  RunSummary s;
  s.status = trace.status;
  s.iterations = trace.iterations;
  s.comm_units = trace.records.empty() ? 0 : trace.records.back().comm_units;
  s.final_accuracy = accuracy(trace.final_states, e.problem.optimum, trace.initial);
  s.best_accuracy = s.final_accuracy;
  for (const IterationRecord& r : trace.records)
    s.best_accuracy = std::min(s.best_accuracy, r.accuracy);
  s.kkt = kkt_residuals(e.problem, trace.final_states, trace.final_token.z);
  s.regime = trace.regime;
  s.lipschitz = e.problem.lipschitz;
  s.optimal_value = e.problem.optimal_value;
  s.diagnostic = trace.diagnostic;
  return s;
}

void write_summary(std::ostream& out, const RunSummary& s) {
  out << std::setprecision(10);
  out << "status=" << to_string(s.status) << '\n'
      << "iterations=" << s.iterations << '\n'
      << "comm_units=" << s.comm_units << '\n'
      << "final_accuracy=" << s.final_accuracy << '\n'
      << "best_accuracy=" << s.best_accuracy << '\n'
      << "kkt_gradient=" << s.kkt.gradient << '\n'
      << "kkt_dual_sum=" << s.kkt.dual_sum << '\n'
      << "kkt_consensus=" << s.kkt.consensus << '\n'
      << "lemma2=" << (s.regime.lemma2 ? "holds" : "not_guaranteed") << '\n'
      << "lemma3=" << (s.regime.lemma3 ? "holds" : "not_guaranteed") << '\n'
      << "lipschitz=" << s.lipschitz << '\n'
      << "optimal_value=" << s.optimal_value << '\n';
  if (!s.diagnostic.empty()) out << "diagnostic=" << s.diagnostic << '\n';
}

void write_file_atomic(const fs::path& path,
                       const std::function<void(std::ostream&)>& body) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    body(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

void write_plot_script(std::ostream& out) {
  out << "# gnuplot script; run from the output directory.\n"
         "set datafile separator ','\n"
         "set logscale y\n"
         "set xlabel 'communication units'\n"
         "set ylabel 'accuracy'\n"
         "set format y '10^{%L}'\n"
         "plot 'trace.csv' skip 2 using 8:3 with lines title 'accuracy'\n";
}

}  // namespace

void write_run_outputs(const fs::path& dir, const Experiment& e,
                       const RunTrace& trace, const RunSummary& summary) {
  fs::create_directories(dir);
  write_file_atomic(dir / "trace.csv",
                    [&](std::ostream& o) { write_trace_csv(o, trace); });
  write_file_atomic(dir / "transcript.csv", [&](std::ostream& o) {
    write_transcript_csv(o, trace.transcript);
  });
  write_file_atomic(dir / "summary.txt",
                    [&](std::ostream& o) { write_summary(o, summary); });
  write_file_atomic(dir / "config.txt",
                    [&](std::ostream& o) { write_config(o, e.config); });
  write_file_atomic(dir / "edges.txt",
                    [&](std::ostream& o) { write_edge_list(o, e.graph); });
  write_file_atomic(dir / "plot.gp", write_plot_script);
}

AttackOutcome run_attack(const Experiment& e, const Transcript& transcript,
                         const StateHistory* truth) {
  const ExperimentConfig& c = e.config;
  transcript.validate();
  if (transcript.n_agents != c.n_agents || transcript.dim != c.dim ||
      transcript.rho != c.rho)
    throw ValidationError(
        "transcript does not match the config (n_agents, dim or rho differ)");
  const long last = transcript.last_iteration();
  const long K = c.horizon < 0 ? last : c.horizon;
  if (K > last)
    throw ValidationError("attack.horizon " + std::to_string(K) +
                          " exceeds the transcript's last iteration " +
                          std::to_string(last));
  const Transcript t = transcript.truncated(K);
  const AttackOptions opt = attack_options(c);

  AttackOutcome out;
  out.horizon = K;
  out.have_truth = truth != nullptr;
  int target = c.target;
  switch (c.attack) {
    case AttackKind::kLsq:
      out.report = lsq_attack(t, c.variant, opt);
      break;
    case AttackKind::kExact:
      out.report = exact_recursion_attack(t, c.variant);
      break;
    case AttackKind::kTerminal:
      out.report = terminal_backward_attack(t);
      target = t.sender(K);
      if (truth)
        out.bounds = check_terminal_bounds(t, out.report, *truth, c.bound_eps);
      break;
    case AttackKind::kColluding:
      if (!truth)
        throw ValidationError(
            "colluding attack needs the colluders' own states; supply a "
            "transcript produced by this config");
      out.report = colluding_attack(t, c.target, truth->without_agent(c.target), opt);
      break;
  }
  out.counts = count_equations_unknowns(c.variant, K, c.n_agents, opt);

  std::vector<int> coords = c.coordinates;
  if (coords.empty())
    for (int i = 0; i < c.dim; ++i) coords.push_back(i);
  out.rows = score_agent(out.report.estimate, truth, target, K + 1, coords);
  for (const ScoreRow& r : out.rows) {
    if (!std::isnan(r.abs_err_x))
      out.max_abs_err_x = std::max(out.max_abs_err_x, r.abs_err_x);
    if (!std::isnan(r.abs_err_y))
      out.max_abs_err_y = std::max(out.max_abs_err_y, r.abs_err_y);
  }
  return out;
}

void write_attack_summary(std::ostream& out, const AttackOutcome& a) {
  out << std::setprecision(10);
  out << "method=" << a.report.method << '\n'
      << "horizon=" << a.horizon << '\n'
      << "equations=" << a.counts.implemented.equations << '\n'
      << "unknowns=" << a.counts.implemented.unknowns << '\n'
      << "unknowns_with_gamma=" << a.counts.with_gamma_unknowns.unknowns << '\n';
  for (const CoordinateSolve& s : a.report.solves)
    out << "solve.coordinate" << s.coordinate + 1 << "=rows:" << s.rows
        << ",cols:" << s.cols << ",iterations:" << s.iterations
        << ",converged:" << (s.converged ? "true" : "false")
        << ",residual:" << s.residual_norm << '\n';
  if (a.have_truth)
    out << "max_abs_err_x=" << a.max_abs_err_x << '\n'
        << "max_abs_err_y=" << a.max_abs_err_y << '\n';
  if (a.bounds) {
    out << "bound_precondition=" << (a.bounds->precondition ? "true" : "false")
        << '\n'
        << "bound_terminal_gap=" << a.bounds->terminal_gap << '\n'
        << "bounds_hold=" << (a.bounds->all_hold() ? "true" : "false") << '\n';
  }
  if (a.report.assumption_violated) out << "assumption_violated=true\n";
  if (!a.report.note.empty()) out << "note=" << a.report.note << '\n';
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_bar(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, '|')) {
    cell = trim(cell);
    if (!cell.empty()) out.push_back(cell);
  }
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

}  // namespace

SweepSpec parse_sweep(std::istream& in) {
  SweepSpec spec;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ValidationError("sweep line " + std::to_string(lineno) +
                            ": expected 'key = v1 | v2'");
    const std::string key = trim(t.substr(0, eq));
    const std::string rest = trim(t.substr(eq + 1));
    if (key == "seeds") {
      spec.seeds.clear();
      try {
        if (rest.rfind("count:", 0) == 0) {
          const long n = std::stol(rest.substr(6));
          if (n < 1) throw ValidationError("sweep seeds count must be >= 1");
          for (long s = 1; s <= n; ++s) spec.seeds.push_back(s);
        } else {
          for (const std::string& v : split_bar(rest))
            spec.seeds.push_back(std::stoull(v));
        }
      } catch (const std::logic_error&) {
        throw ValidationError("sweep line " + std::to_string(lineno) +
                              ": bad seeds '" + rest + "'");
      }
      if (spec.seeds.empty())
        throw ValidationError("sweep line " + std::to_string(lineno) +
                              ": no seeds");
      continue;
    }
    SweepAxis axis{key, split_bar(rest)};
    if (axis.values.empty())
      throw ValidationError("sweep line " + std::to_string(lineno) +
                            ": axis '" + key + "' has no values");
    // Reject unknown keys and bad values up front.
    ExperimentConfig probe;
    for (const std::string& v : axis.values) set_config_value(probe, key, v);
    spec.axes.push_back(std::move(axis));
  }
  return spec;
}

SweepSpec load_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open sweep spec '" + path + "'");
  return parse_sweep(in);
}

std::vector<SweepJob> expand_sweep(const ExperimentConfig& base,
                                   const SweepSpec& spec) {
  std::size_t points = 1;
  for (const SweepAxis& a : spec.axes) points *= a.values.size();
  std::vector<SweepJob> jobs;
  jobs.reserve(points * spec.seeds.size());
  for (std::size_t p = 0; p < points; ++p) {
    std::vector<std::string> values(spec.axes.size());
    std::size_t rem = p;
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      const auto n = spec.axes[a].values.size();
      values[a] = spec.axes[a].values[rem % n];
      rem /= n;
    }
    for (std::uint64_t seed : spec.seeds) {
      SweepJob job{p, seed, values, base};
      for (std::size_t a = 0; a < spec.axes.size(); ++a)
        set_config_value(job.config, spec.axes[a].key, values[a]);
      job.config.override_seeds(seed);
      jobs.push_back(std::move(job));
    }
  }
  return jobs;
}

std::vector<SweepRow> run_sweep_job(const SweepJob& job) {
  std::vector<SweepRow> rows;
  auto base_row = [&job]() {
    SweepRow r;
    r.point = job.point;
    r.seed = job.seed;
    r.values = job.values;
    return r;
  };
  try {
    ExperimentConfig cfg = job.config;
    const Experiment e = prepare(cfg);
    SolverConfig sc = solver_config(cfg);
    sc.keep_history = false;
    const RunTrace trace = run(e.problem, e.graph, sc);
    for (const IterationRecord& rec : trace.records) {
      SweepRow r = base_row();
      r.k = rec.k;
      r.comm_units = rec.comm_units;
      r.accuracy = rec.accuracy;
      r.lagrangian = rec.lagrangian;
      r.r_primal = rec.r_primal;
      r.status = to_string(trace.status);
      r.error = trace.diagnostic;
      rows.push_back(std::move(r));
    }
  } catch (const std::exception& ex) {
    SweepRow r = base_row();
    r.status = "error";
    r.error = ex.what();
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

std::vector<SweepRow> concat(std::vector<std::vector<SweepRow>>& parts) {
  std::vector<SweepRow> out;
  for (auto& p : parts)
    for (auto& r : p) out.push_back(std::move(r));
  return out;
}

}  // namespace

std::vector<SweepRow> run_sweep_serial(const std::vector<SweepJob>& jobs) {
  std::vector<std::vector<SweepRow>> parts(jobs.size());
  for (std::size_t j = 0; j < jobs.size(); ++j) parts[j] = run_sweep_job(jobs[j]);
  return concat(parts);
}

std::vector<SweepRow> run_sweep_parallel(const std::vector<SweepJob>& jobs) {
  std::vector<std::vector<SweepRow>> parts(jobs.size());
  const long n = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (long j = 0; j < n; ++j) parts[j] = run_sweep_job(jobs[j]);
  return concat(parts);
}

void write_sweep_csv(std::ostream& out, const SweepSpec& spec,
                     const std::vector<SweepRow>& rows) {
  out << "#schema=1\n";
  out << "point,seed";
  for (const SweepAxis& a : spec.axes) out << ',' << csv_escape(a.key);
  out << ",k,comm_units,accuracy,lagrangian,r_primal,status,error\n";
  out << std::setprecision(17);
  for (const SweepRow& r : rows) {
    out << r.point << ',' << r.seed;
    for (const std::string& v : r.values) out << ',' << csv_escape(v);
    out << ',' << r.k << ',' << r.comm_units << ',' << r.accuracy << ','
        << r.lagrangian << ',' << r.r_primal << ',' << r.status << ','
        << csv_escape(r.error) << '\n';
  }
}

}  // namespace iadmm
