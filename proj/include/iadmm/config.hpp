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
// Experiment configuration: flat "section.key = value" text.
//
//   # comment
//   problem.kind = ridge
//   solver.gamma = uniform:0.9,1.1
//
// Every key has a default; see README.md for the full list.
#ifndef IADMM_CONFIG_HPP_
#define IADMM_CONFIG_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "iadmm/adversary.hpp"
#include "iadmm/consensus.hpp"

namespace iadmm {

enum class ProblemKind { kRidge, kLogistic };
enum class AttackKind { kLsq, kExact, kTerminal, kColluding };

const char* to_string(ProblemKind k);
const char* to_string(AttackKind k);
const char* to_string(XUpdateMode m);
std::string to_string(const GammaSpec& g);

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::kRidge;
  int n_agents = 20;
  int dim = 2;
  int samples = 30;
  double eta = 0.3;

  double rho = 10.0;
  Variant variant = Variant::kIadmm;
  XUpdateMode x_update = XUpdateMode::kExactProx;
  GammaSpec gamma = GammaSpec::constant(1.0);
  double sigma = 0.0;
  double init_scale = 100.0;
  long max_iters = 10000;
  double stop_eps = 1e-10;

  std::uint64_t graph_seed = 1;
  std::uint64_t data_seed = 1;
  std::uint64_t solver_seed = 1;

  AttackKind attack = AttackKind::kLsq;
  bool kkt_row = true;
  bool pin_last_cycle = true;
  long horizon = -1;  // last observed iteration used; -1 = all
  int target = 0;     // 0-based in memory, 1-based in text
  std::vector<int> coordinates;  // 0-based; empty = all
  double assumed_gamma = 1.0;
  double bound_eps = 1e-4;  // terminal attack: declared convergence radius

  long checkpoint = 0;  // trace cadence; 0 = once per cycle

  bool operator==(const ExperimentConfig&) const = default;

  // Throws ValidationError naming the offending key.
  void validate() const;
  void override_seeds(std::uint64_t seed);
};

// Keys not listed in the defaults are rejected with their line number.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
// Every key, fixed order; parse_config(serialize) reproduces the config.
void write_config(std::ostream& out, const ExperimentConfig& c);
std::string serialize_config(const ExperimentConfig& c);

// Applies one "key = value" assignment; used by the parser and by sweeps.
void set_config_value(ExperimentConfig& c, const std::string& key,
                      const std::string& value);
GammaSpec parse_gamma(const std::string& text);

SolverConfig solver_config(const ExperimentConfig& c);
AttackOptions attack_options(const ExperimentConfig& c);
Problem build_problem(const ExperimentConfig& c);
Graph build_graph(const ExperimentConfig& c);

}  // namespace iadmm

#endif  // IADMM_CONFIG_HPP_
