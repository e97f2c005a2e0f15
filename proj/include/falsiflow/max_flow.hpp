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

#ifndef FALSIFLOW_MAX_FLOW_HPP
#define FALSIFLOW_MAX_FLOW_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace falsiflow {

// Dinic's algorithm on integer capacities.
class MaxFlow {
 public:
  using Capacity = std::int64_t;

  explicit MaxFlow(std::size_t num_nodes);

  // Returns the arc id.
  std::size_t add_arc(std::size_t from, std::size_t to, Capacity capacity);

  Capacity solve(std::size_t source, std::size_t sink);

  Capacity flow(std::size_t arc) const;
  // Nodes that can still reach `sink` through arcs with residual capacity.
  std::vector<bool> reaches_sink(std::size_t sink) const;
  // Nodes reachable from `source` through arcs with residual capacity.
  std::vector<bool> reachable_from(std::size_t source) const;

 private:
  struct Arc {
    std::size_t to;
    std::size_t reverse;
    Capacity residual;
    Capacity capacity;
  };

  bool build_levels(std::size_t source, std::size_t sink);
  Capacity augment(std::size_t node, std::size_t sink, Capacity limit);

  std::vector<std::vector<Arc>> adjacency_;
  std::vector<std::pair<std::size_t, std::size_t>> arc_refs_;
  std::vector<int> level_;
  std::vector<std::size_t> cursor_;
};

}  // namespace falsiflow

#endif  // FALSIFLOW_MAX_FLOW_HPP
