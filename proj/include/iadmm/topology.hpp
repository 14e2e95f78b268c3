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
// Network graphs with an embedded Hamiltonian cycle, and the activation
// orders that walk them.
//
// Agents are 0-based in memory. Text formats use 1-based ids.
#ifndef IADMM_TOPOLOGY_HPP_
#define IADMM_TOPOLOGY_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "iadmm/rng.hpp"

namespace iadmm {

struct Edge {
  int u;  // u < v
  int v;
  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

// Undirected simple graph whose Hamiltonian cycle is the id order
// 0 -> 1 -> ... -> N-1 -> 0. Immutable after construction.
class Graph {
 public:
  // Validates: no self loops or duplicates, ids in range, every cycle edge
  // present.
  Graph(int n_agents, std::vector<Edge> edges);

  int n_agents() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const int> neighbors(int agent) const { return adj_[agent]; }
  bool has_edge(int a, int b) const;
  int cycle_successor(int agent) const { return (agent + 1) % n_; }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
};

// round(eta * N (N - 1) / 2), ties to even.
std::size_t target_edge_count(int n_agents, double eta);

// Cycle edges first, then extra edges drawn uniformly without replacement
// from the remaining pairs until target_edge_count is reached. Throws
// ValidationError if N < 3, eta not in (0, 1], or the target is below N.
Graph generate_graph(int n_agents, double eta, std::uint64_t seed);

// Breadth-first reachability from agent 0.
bool is_connected(const Graph& g);

// "N" on the first line, then one "u v" line per edge (1-based).
void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in);

enum class ScheduleKind { kCyclic, kRandomWalk };

// Chooses the agent that receives the token next. The cyclic order follows
// the Hamiltonian cycle; the random walk hops to a uniformly random neighbor
// drawn from its own seeded stream.
class ActivationSchedule {
 public:
  explicit ActivationSchedule(ScheduleKind kind, std::uint64_t seed = 0);

  ScheduleKind kind() const { return kind_; }
  int first_agent() const { return 0; }
  int next_agent(const Graph& g, long k, int prev);

 private:
  ScheduleKind kind_;
  Engine engine_;
};

}  // namespace iadmm

#endif  // IADMM_TOPOLOGY_HPP_
