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
#include "iadmm/topology.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>
#include <string>

#include "iadmm/errors.hpp"

namespace iadmm {

namespace {

Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

}  // namespace

Graph::Graph(int n_agents, std::vector<Edge> edges)
    : n_(n_agents), edges_(std::move(edges)), adj_(n_agents) {
  if (n_ < 3) throw ValidationError("graph needs at least 3 agents");
  for (Edge& e : edges_) {
    if (e.u == e.v) throw ValidationError("graph: self loop");
    if (e.u < 0 || e.v < 0 || e.u >= n_ || e.v >= n_)
      throw ValidationError("graph: agent id out of range");
    e = make_edge(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw ValidationError("graph: duplicate edge");
  for (const Edge& e : edges_) {
    adj_[e.u].push_back(e.v);
    adj_[e.v].push_back(e.u);
  }
  for (auto& a : adj_) std::sort(a.begin(), a.end());
  for (int i = 0; i < n_; ++i)
    if (!has_edge(i, cycle_successor(i)))
      throw ValidationError("graph: Hamiltonian cycle edge " +
                            std::to_string(i + 1) + "-" +
                            std::to_string(cycle_successor(i) + 1) +
                            " missing");
}

bool Graph::has_edge(int a, int b) const {
  if (a < 0 || a >= n_ || b < 0 || b >= n_) return false;
  return std::binary_search(adj_[a].begin(), adj_[a].end(), b);
}

std::size_t target_edge_count(int n_agents, double eta) {
  const double pairs = 0.5 * n_agents * (n_agents - 1.0);
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const double r = std::nearbyint(eta * pairs);
  std::fesetround(saved);
  return static_cast<std::size_t>(r);
}

Graph generate_graph(int n_agents, double eta, std::uint64_t seed) {
  if (n_agents < 3) throw ValidationError("generate_graph: N must be >= 3");
  if (!(eta > 0.0 && eta <= 1.0))
    throw ValidationError("generate_graph: eta must lie in (0, 1]");
  const std::size_t target = target_edge_count(n_agents, eta);
  const auto n = static_cast<std::size_t>(n_agents);
  if (target < n)
    throw ValidationError("generate_graph: eta too small to host a " +
                          std::to_string(n_agents) + "-cycle (" +
                          std::to_string(target) + " edges)");

  std::vector<Edge> edges;
  edges.reserve(target);
  for (int i = 0; i < n_agents; ++i)
    edges.push_back(make_edge(i, (i + 1) % n_agents));

  std::vector<Edge> pool;
  for (int a = 0; a < n_agents; ++a)
    for (int b = a + 1; b < n_agents; ++b) {
      const bool on_cycle = b == a + 1 || (a == 0 && b == n_agents - 1);
      if (!on_cycle) pool.push_back({a, b});
    }
  // Partial Fisher-Yates: the first `extra` slots are a uniform sample
  // without replacement.
  Engine rng(seed);
  const std::size_t extra = target - n;
  for (std::size_t i = 0; i < extra; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
    edges.push_back(pool[i]);
  }
  return Graph(n_agents, std::move(edges));
}

bool is_connected(const Graph& g) {
  std::vector<char> seen(g.n_agents(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int a = q.front();
    q.pop();
    for (int b : g.neighbors(a))
      if (!seen[b]) {
        seen[b] = 1;
        ++count;
        q.push(b);
      }
  }
  return count == g.n_agents();
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.n_agents() << '\n';
  for (const Edge& e : g.edges()) out << e.u + 1 << ' ' << e.v + 1 << '\n';
}

Graph read_edge_list(std::istream& in) {
  int n = 0;
  if (!(in >> n)) throw ValidationError("edge list: missing agent count");
  std::vector<Edge> edges;
  int u = 0, v = 0;
  while (in >> u >> v) edges.push_back({u - 1, v - 1});
  if (!in.eof()) throw ValidationError("edge list: malformed line");
  return Graph(n, std::move(edges));
}

ActivationSchedule::ActivationSchedule(ScheduleKind kind, std::uint64_t seed)
    : kind_(kind), engine_(seed) {}

int ActivationSchedule::next_agent(const Graph& g, long /*k*/, int prev) {
  if (prev < 0 || prev >= g.n_agents())
    throw ValidationError("next_agent: invalid agent id");
  if (kind_ == ScheduleKind::kCyclic) return g.cycle_successor(prev);
  const auto nbrs = g.neighbors(prev);
  if (nbrs.empty()) throw ValidationError("next_agent: isolated agent");
  std::uniform_int_distribution<std::size_t> pick(0, nbrs.size() - 1);
  return nbrs[pick(engine_)];
}

}  // namespace iadmm
