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
// Small-scale invariant suite behind `iadmm verify`.
#ifndef IADMM_VERIFY_HPP_
#define IADMM_VERIFY_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "iadmm/consensus.hpp"

namespace iadmm {

struct CheckResult {
  std::string name;
  bool passed = false;
  // Informational checks report a condition but never fail the suite.
  bool informational = false;
  std::string detail;
  double seconds = 0.0;
};

// max_k ||z^k - (1/N) sum_i (x_i^k - y_i^k / rho)|| over a run.
double max_token_gap(const Problem& problem, const Graph& graph,
                     const SolverConfig& config);

std::vector<CheckResult> run_verify_suite();

// One line per check; returns true when no non-informational check failed.
bool report_checks(std::ostream& out, const std::vector<CheckResult>& checks);

}  // namespace iadmm

#endif  // IADMM_VERIFY_HPP_
