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
#include "iadmm/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "iadmm/errors.hpp"

namespace iadmm {

const char* to_string(ProblemKind k) {
  return k == ProblemKind::kRidge ? "ridge" : "logistic";
}

const char* to_string(AttackKind k) {
  switch (k) {
    case AttackKind::kLsq: return "lsq";
    case AttackKind::kExact: return "exact";
    case AttackKind::kTerminal: return "terminal";
    case AttackKind::kColluding: return "colluding";
  }
  return "?";
}

const char* to_string(XUpdateMode m) {
  return m == XUpdateMode::kExactProx ? "exact_prox" : "first_order";
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw ValidationError(key + ": cannot parse '" + value + "' (expected " +
                        expected + ")");
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) bad_value(key, v, "a number");
    return d;
  } catch (const std::logic_error&) {
    bad_value(key, v, "a number");
  }
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    bad_value(key, v, "an integer");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    bad_value(key, v, "a non-negative integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "true|false");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
  return out;
}

}  // namespace

std::string to_string(const GammaSpec& g) {
  switch (g.kind) {
    case GammaSpec::Kind::kConstant: return "constant:" + fmt(g.a);
    case GammaSpec::Kind::kUniform: return "uniform:" + fmt(g.a) + "," + fmt(g.b);
    case GammaSpec::Kind::kLemma3Floor: return "lemma3_floor:" + fmt(g.a);
  }
  return "?";
}

GammaSpec parse_gamma(const std::string& text) {
  const std::string key = "solver.gamma";
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    bad_value(key, text, "constant:C | uniform:LO,HI | lemma3_floor:MARGIN");
  const std::string kind = text.substr(0, colon);
  const auto args = split(text.substr(colon + 1), ',');
  if (kind == "constant" && args.size() == 1)
    return GammaSpec::constant(to_double(key, args[0]));
  if (kind == "uniform" && args.size() == 2)
    return GammaSpec::uniform(to_double(key, args[0]), to_double(key, args[1]));
  if (kind == "lemma3_floor" && args.size() == 1)
    return GammaSpec::lemma3_floor(to_double(key, args[0]));
  bad_value(key, text, "constant:C | uniform:LO,HI | lemma3_floor:MARGIN");
}

void set_config_value(ExperimentConfig& c, const std::string& key,
                      const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "problem.kind") {
    if (v == "ridge") c.problem = ProblemKind::kRidge;
    else if (v == "logistic") c.problem = ProblemKind::kLogistic;
    else bad_value(key, v, "ridge|logistic");
  } else if (key == "problem.n_agents") {
    c.n_agents = static_cast<int>(to_long(key, v));
  } else if (key == "problem.dim") {
    c.dim = static_cast<int>(to_long(key, v));
  } else if (key == "problem.samples") {
    c.samples = static_cast<int>(to_long(key, v));
  } else if (key == "graph.eta") {
    c.eta = to_double(key, v);
  } else if (key == "solver.rho") {
    c.rho = to_double(key, v);
  } else if (key == "solver.variant") {
    c.variant = parse_variant(v);
  } else if (key == "solver.x_update") {
    if (v == "exact_prox") c.x_update = XUpdateMode::kExactProx;
    else if (v == "first_order") c.x_update = XUpdateMode::kFirstOrder;
    else bad_value(key, v, "exact_prox|first_order");
  } else if (key == "solver.gamma") {
    c.gamma = parse_gamma(v);
  } else if (key == "solver.sigma") {
    c.sigma = to_double(key, v);
  } else if (key == "solver.init_scale") {
    c.init_scale = to_double(key, v);
  } else if (key == "solver.max_iters") {
    c.max_iters = to_long(key, v);
  } else if (key == "solver.stop_eps") {
    c.stop_eps = to_double(key, v);
  } else if (key == "seeds.graph") {
    c.graph_seed = to_u64(key, v);
  } else if (key == "seeds.data") {
    c.data_seed = to_u64(key, v);
  } else if (key == "seeds.solver") {
    c.solver_seed = to_u64(key, v);
  } else if (key == "attack.kind") {
    if (v == "lsq") c.attack = AttackKind::kLsq;
    else if (v == "exact") c.attack = AttackKind::kExact;
    else if (v == "terminal") c.attack = AttackKind::kTerminal;
    else if (v == "colluding") c.attack = AttackKind::kColluding;
    else bad_value(key, v, "lsq|exact|terminal|colluding");
  } else if (key == "attack.kkt_row") {
    c.kkt_row = to_bool(key, v);
  } else if (key == "attack.pin_last_cycle") {
    c.pin_last_cycle = to_bool(key, v);
  } else if (key == "attack.horizon") {
    c.horizon = to_long(key, v);
  } else if (key == "attack.target") {
    c.target = static_cast<int>(to_long(key, v)) - 1;
  } else if (key == "attack.coordinates") {
    c.coordinates.clear();
    if (!v.empty() && v != "all")
      for (const std::string& s : split(v, ','))
        c.coordinates.push_back(static_cast<int>(to_long(key, s)) - 1);
  } else if (key == "attack.assumed_gamma") {
    c.assumed_gamma = to_double(key, v);
  } else if (key == "attack.bound_eps") {
    c.bound_eps = to_double(key, v);
  } else if (key == "output.checkpoint") {
    c.checkpoint = to_long(key, v);
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

void ExperimentConfig::validate() const {
  if (n_agents < 3) throw ValidationError("problem.n_agents must be >= 3");
  if (dim < 1) throw ValidationError("problem.dim must be >= 1");
  if (samples < 1) throw ValidationError("problem.samples must be >= 1");
  if (!(eta > 0.0 && eta <= 1.0))
    throw ValidationError("graph.eta must lie in (0, 1]");
  if (target_edge_count(n_agents, eta) < static_cast<std::size_t>(n_agents))
    throw ValidationError("graph.eta too small to hold the Hamiltonian cycle");
  if (problem == ProblemKind::kLogistic && x_update == XUpdateMode::kExactProx)
    throw ValidationError(
        "solver.x_update: logistic objectives have no closed-form prox; "
        "use first_order");
  solver_config(*this).validate();
  if (target < 0 || target >= n_agents)
    throw ValidationError("attack.target must be in 1..problem.n_agents");
  for (int c : coordinates)
    if (c < 0 || c >= dim)
      throw ValidationError("attack.coordinates must be in 1..problem.dim");
  if (horizon < -1) throw ValidationError("attack.horizon must be >= -1");
  if (!(assumed_gamma > 0.0))
    throw ValidationError("attack.assumed_gamma must be positive");
  if (!(bound_eps > 0.0)) throw ValidationError("attack.bound_eps must be positive");
}

void ExperimentConfig::override_seeds(std::uint64_t seed) {
  graph_seed = data_seed = solver_seed = seed;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) +
                            ": expected 'key = value'");
    try {
      set_config_value(c, trim(t.substr(0, eq)), t.substr(eq + 1));
    } catch (const ValidationError& e) {
      throw ValidationError("config line " + std::to_string(lineno) + ": " +
                            e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  out << "problem.kind = " << to_string(c.problem) << '\n'
      << "problem.n_agents = " << c.n_agents << '\n'
      << "problem.dim = " << c.dim << '\n'
      << "problem.samples = " << c.samples << '\n'
      << "graph.eta = " << fmt(c.eta) << '\n'
      << "solver.rho = " << fmt(c.rho) << '\n'
      << "solver.variant = " << to_string(c.variant) << '\n'
      << "solver.x_update = " << to_string(c.x_update) << '\n'
      << "solver.gamma = " << to_string(c.gamma) << '\n'
      << "solver.sigma = " << fmt(c.sigma) << '\n'
      << "solver.init_scale = " << fmt(c.init_scale) << '\n'
      << "solver.max_iters = " << c.max_iters << '\n'
      << "solver.stop_eps = " << fmt(c.stop_eps) << '\n'
      << "seeds.graph = " << c.graph_seed << '\n'
      << "seeds.data = " << c.data_seed << '\n'
      << "seeds.solver = " << c.solver_seed << '\n'
      << "attack.kind = " << to_string(c.attack) << '\n'
      << "attack.kkt_row = " << (c.kkt_row ? "true" : "false") << '\n'
      << "attack.pin_last_cycle = " << (c.pin_last_cycle ? "true" : "false")
      << '\n'
      << "attack.horizon = " << c.horizon << '\n'
      << "attack.target = " << c.target + 1 << '\n'
      << "attack.coordinates = ";
  if (c.coordinates.empty()) out << "all";
  for (std::size_t i = 0; i < c.coordinates.size(); ++i)
    out << (i ? "," : "") << c.coordinates[i] + 1;
  out << '\n'
      << "attack.assumed_gamma = " << fmt(c.assumed_gamma) << '\n'
      << "attack.bound_eps = " << fmt(c.bound_eps) << '\n'
      << "output.checkpoint = " << c.checkpoint << '\n';
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  write_config(os, c);
  return os.str();
}

SolverConfig solver_config(const ExperimentConfig& c) {
  SolverConfig s;
  s.rho = c.rho;
  s.variant = c.variant;
  s.x_update = c.x_update;
  s.gamma = c.gamma;
  s.sigma = c.sigma;
  s.init_scale = c.init_scale;
  s.seed = c.solver_seed;
  s.max_iters = c.max_iters;
  s.stop_eps = c.stop_eps;
  s.record_every = c.checkpoint;
  return s;
}

AttackOptions attack_options(const ExperimentConfig& c) {
  AttackOptions o;
  o.kkt_row = c.kkt_row;
  o.pin_last_cycle = c.pin_last_cycle;
  o.assumed_gamma = c.assumed_gamma;
  o.coordinates = c.coordinates;
  return o;
}

Problem build_problem(const ExperimentConfig& c) {
  if (c.problem == ProblemKind::kRidge)
    return make_ridge_problem(c.n_agents, c.samples, c.dim, c.data_seed);
  return make_logistic_problem(c.n_agents, c.samples, c.dim, c.data_seed,
                               c.data_seed);
}

Graph build_graph(const ExperimentConfig& c) {
  return generate_graph(c.n_agents, c.eta, c.graph_seed);
}

}  // namespace iadmm
