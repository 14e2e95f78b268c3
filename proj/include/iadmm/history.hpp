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
// What travels on the wire (Transcript) and per-agent state trajectories
// (StateHistory). The simulator produces both; attacks consume only the
// transcript and produce a StateHistory of estimates.
#ifndef IADMM_HISTORY_HPP_
#define IADMM_HISTORY_HPP_

#include <iosfwd>
#include <vector>

#include "iadmm/linalg.hpp"

namespace iadmm {

// One token transmission: after the update at iteration k, `from` sends
// z^{k+1} to `to`.
struct Observation {
  long k;
  int from;
  int to;
  Vec z_next;
};

// Everything an eavesdropper on every link sees, plus the public
// parameters (N, rho) and the public initial token z^0 = 0.
struct Transcript {
  int n_agents = 0;
  int dim = 0;
  double rho = 0.0;
  Vec z0;
  std::vector<Observation> observations;

  // Index of the last observed iteration K (observations cover 0..K).
  long last_iteration() const {
    return static_cast<long>(observations.size()) - 1;
  }
  // z^k for 0 <= k <= K + 1.
  const Vec& z(long k) const { return k == 0 ? z0 : observations[k - 1].z_next; }
  int sender(long k) const { return observations[k].from; }
  // Throws ValidationError if iterations are not contiguous from 0 or
  // consecutive observations do not chain (to_k == from_{k+1}).
  void validate() const;
  // Prefix up to and including iteration k_last.
  Transcript truncated(long k_last) const;
};

// CSV: "#schema=1", "#n_agents=..,dim=..,rho=..", header
// "k,from_agent,to_agent,z1..zp", agents 1-based.
void write_transcript_csv(std::ostream& out, const Transcript& t);
Transcript read_transcript_csv(std::istream& in);

// The value an agent holds from iteration `k_begin` until its next
// activation.
struct EpochState {
  long k_begin;
  Vec x;
  Vec y;
};

// Piecewise-constant per-agent trajectories. Epoch 0 holds the initial
// state; a new epoch starts at k + 1 for every activation at iteration k.
class StateHistory {
 public:
  StateHistory() = default;
  explicit StateHistory(int n_agents) : tracks_(n_agents) {}

  int n_agents() const { return static_cast<int>(tracks_.size()); }
  bool known(int agent) const { return !tracks_[agent].empty(); }
  const std::vector<EpochState>& track(int agent) const { return tracks_[agent]; }
  std::vector<EpochState>& track(int agent) { return tracks_[agent]; }

  // State x_i^k, y_i^k. Throws if the agent is unknown.
  const EpochState& at(int agent, long k) const;
  // Index of the epoch current at iteration k.
  std::size_t epoch_index(int agent, long k) const;

  // Copy with one agent's track removed; handed to colluders.
  StateHistory without_agent(int agent) const;

 private:
  std::vector<std::vector<EpochState>> tracks_;
};

}  // namespace iadmm

#endif  // IADMM_HISTORY_HPP_
