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

#ifndef FALSIFLOW_PARALLEL_HPP
#define FALSIFLOW_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace falsiflow {

// Worker count: FALSIFLOW_THREADS if set and positive, otherwise the hardware
// concurrency (at least 1).
std::size_t worker_count();

// Runs body(i) for i in [0, count) on up to `threads` workers. Results must
// be written to per-index slots; the first exception thrown (lowest index)
// is rethrown after all workers join.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace falsiflow

#endif  // FALSIFLOW_PARALLEL_HPP
