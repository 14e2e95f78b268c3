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
#include "iadmm/history.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "iadmm/errors.hpp"

namespace iadmm {

void Transcript::validate() const {
  if (n_agents < 1 || dim < 1 || !(rho > 0.0))
    throw ValidationError("transcript: bad header (n_agents, dim, rho)");
  if (z0.size() != static_cast<std::size_t>(dim))
    throw ValidationError("transcript: z0 has wrong dimension");
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const Observation& o = observations[i];
    if (o.k != static_cast<long>(i))
      throw ValidationError("transcript: iterations not contiguous at row " +
                            std::to_string(i));
    if (o.from < 0 || o.from >= n_agents || o.to < 0 || o.to >= n_agents)
      throw ValidationError("transcript: agent id out of range");
    if (o.z_next.size() != static_cast<std::size_t>(dim))
      throw ValidationError("transcript: token has wrong dimension");
    if (i + 1 < observations.size() && observations[i + 1].from != o.to)
      throw ValidationError("transcript: token path broken at iteration " +
                            std::to_string(i));
  }
}

Transcript Transcript::truncated(long k_last) const {
  Transcript t = *this;
  if (k_last + 1 < static_cast<long>(t.observations.size()))
    t.observations.resize(k_last + 1);
  return t;
}

void write_transcript_csv(std::ostream& out, const Transcript& t) {
  out << "#schema=1\n";
  out << std::setprecision(17);
  out << "#n_agents=" << t.n_agents << ",dim=" << t.dim << ",rho=" << t.rho
      << '\n';
  out << "k,from_agent,to_agent";
  for (int i = 0; i < t.dim; ++i) out << ",z" << i + 1;
  out << '\n';
  for (const Observation& o : t.observations) {
    out << o.k << ',' << o.from + 1 << ',' << o.to + 1;
    for (double v : o.z_next) out << ',' << v;
    out << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

}  // namespace

Transcript read_transcript_csv(std::istream& in) {
  Transcript t;
  std::string line;
  bool header_row = false;
  bool meta = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("#n_agents=", 0) == 0) {
      for (const std::string& kv : split(line.substr(1), ',')) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        if (key == "n_agents") t.n_agents = std::stoi(val);
        if (key == "dim") t.dim = std::stoi(val);
        if (key == "rho") t.rho = std::stod(val);
      }
      meta = true;
      continue;
    }
    if (line[0] == '#') continue;
    if (!header_row) {
      header_row = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (static_cast<int>(cells.size()) != 3 + t.dim)
      throw ValidationError("transcript csv: wrong column count");
    Observation o{std::stol(cells[0]), std::stoi(cells[1]) - 1,
                  std::stoi(cells[2]) - 1, Vec(t.dim)};
    for (int i = 0; i < t.dim; ++i) o.z_next[i] = std::stod(cells[3 + i]);
    t.observations.push_back(std::move(o));
  }
  if (!meta) throw ValidationError("transcript csv: missing #n_agents line");
  t.z0 = Vec(t.dim);
  t.validate();
  return t;
}

std::size_t StateHistory::epoch_index(int agent, long k) const {
  const auto& tr = tracks_.at(agent);
  if (tr.empty())
    throw ValidationError("state history: agent " + std::to_string(agent + 1) +
                          " unknown");
  auto it = std::upper_bound(
      tr.begin(), tr.end(), k,
      [](long kk, const EpochState& e) { return kk < e.k_begin; });
  if (it == tr.begin())
    throw ValidationError("state history: iteration before first epoch");
  return static_cast<std::size_t>(it - tr.begin()) - 1;
}

const EpochState& StateHistory::at(int agent, long k) const {
  return tracks_[agent][epoch_index(agent, k)];
}

StateHistory StateHistory::without_agent(int agent) const {
  StateHistory h = *this;
  h.tracks_.at(agent).clear();
  return h;
}

}  // namespace iadmm
