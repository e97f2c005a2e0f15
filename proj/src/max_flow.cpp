// Copyright 2026 The Falsiflow Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "falsiflow/max_flow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "falsiflow/error.hpp"

namespace falsiflow {

MaxFlow::MaxFlow(std::size_t num_nodes) : adjacency_(num_nodes) {}

std::size_t MaxFlow::add_arc(std::size_t from, std::size_t to,
                             Capacity capacity) {
  if (from >= adjacency_.size() || to >= adjacency_.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, "arc endpoint out of range");
  }
  if (capacity < 0) {
    throw Error(ErrorCode::kBadParameters, "negative arc capacity");
  }
  const std::size_t fwd = adjacency_[from].size();
  const std::size_t rev = adjacency_[to].size() + (from == to ? 1 : 0);
  adjacency_[from].push_back({to, rev, capacity, capacity});
  adjacency_[to].push_back({from, fwd, 0, 0});
  arc_refs_.emplace_back(from, fwd);
  return arc_refs_.size() - 1;
}

bool MaxFlow::build_levels(std::size_t source, std::size_t sink) {
  level_.assign(adjacency_.size(), -1);
  std::queue<std::size_t> queue;
  level_[source] = 0;
  queue.push(source);
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop();
    for (const Arc& a : adjacency_[v]) {
      if (a.residual > 0 && level_[a.to] < 0) {
        level_[a.to] = level_[v] + 1;
        queue.push(a.to);
      }
    }
  }
  return level_[sink] >= 0;
}

MaxFlow::Capacity MaxFlow::augment(std::size_t node, std::size_t sink,
                                   Capacity limit) {
  if (node == sink) return limit;
  for (std::size_t& i = cursor_[node]; i < adjacency_[node].size(); ++i) {
    Arc& a = adjacency_[node][i];
    if (a.residual <= 0 || level_[a.to] != level_[node] + 1) continue;
    const Capacity pushed = augment(a.to, sink, std::min(limit, a.residual));
    if (pushed > 0) {
      a.residual -= pushed;
      adjacency_[a.to][a.reverse].residual += pushed;
      return pushed;
    }
  }
  return 0;
}

MaxFlow::Capacity MaxFlow::solve(std::size_t source, std::size_t sink) {
  Capacity total = 0;
  while (build_levels(source, sink)) {
    cursor_.assign(adjacency_.size(), 0);
    while (Capacity pushed =
               augment(source, sink, std::numeric_limits<Capacity>::max())) {
      total += pushed;
    }
  }
  return total;
}

MaxFlow::Capacity MaxFlow::flow(std::size_t arc) const {
  const auto& [from, idx] = arc_refs_.at(arc);
  const Arc& a = adjacency_[from][idx];
  return a.capacity - a.residual;
}

std::vector<bool> MaxFlow::reachable_from(std::size_t source) const {
  std::vector<bool> seen(adjacency_.size(), false);
  std::vector<std::size_t> stack{source};
  seen[source] = true;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (const Arc& a : adjacency_[v]) {
      if (a.residual > 0 && !seen[a.to]) {
        seen[a.to] = true;
        stack.push_back(a.to);
      }
    }
  }
  return seen;
}

std::vector<bool> MaxFlow::reaches_sink(std::size_t sink) const {
  // Walk residual arcs backwards: v -> w has residual iff the stored reverse
  // entry at w says so.
  std::vector<bool> seen(adjacency_.size(), false);
  std::vector<std::size_t> stack{sink};
  seen[sink] = true;
  while (!stack.empty()) {
    const std::size_t w = stack.back();
    stack.pop_back();
    for (const Arc& back : adjacency_[w]) {
      const Arc& forward = adjacency_[back.to][back.reverse];
      if (forward.residual > 0 && !seen[back.to]) {
        seen[back.to] = true;
        stack.push_back(back.to);
      }
    }
  }
  return seen;
}

}  // namespace falsiflow
