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

// The falsiflow command-line tool as a library entry point.

#ifndef FALSIFLOW_CLI_HPP
#define FALSIFLOW_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace falsiflow {

inline constexpr int kExitCompatible = 0;
inline constexpr int kExitIncompatible = 1;
inline constexpr int kExitError = 2;

// args excludes the program name. Reports go to `out` unless --out is given;
// diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct GridAxis {
  std::string name;
  std::vector<double> values;
};
// "name=start:stop:step,..." as a list of axes; the grid is their product.
std::vector<GridAxis> parse_grid_spec(const std::string& spec);

}  // namespace falsiflow

#endif  // FALSIFLOW_CLI_HPP
