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

// JSON and CSV formats shared by the command-line tool and the bindings.

#ifndef FALSIFLOW_JSON_IO_HPP
#define FALSIFLOW_JSON_IO_HPP

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "falsiflow/correspondence.hpp"
#include "falsiflow/inference.hpp"
#include "falsiflow/measure.hpp"
#include "falsiflow/models.hpp"
#include "falsiflow/semiparametric.hpp"
#include "falsiflow/transport.hpp"

namespace falsiflow {

using Json = nlohmann::ordered_json;

// {"support": [...], "mass": [numerator, ...], "denominator": 1000000000}.
// Reading also accepts {"support": [...], "prob": [...]}; `where` names the
// source in error messages.
Json to_json(const FiniteDistribution& d);
FiniteDistribution distribution_from_json(const Json& j, const std::string& where);

// {"latent": [...], "outcomes": [...], "G": {latent: [outcome, ...]}}.
Json to_json(const Correspondence& g);
Correspondence correspondence_from_json(const Json& j, const std::string& where);

// {"primal", "dual", "compatible", "witness", "plan": [[u, y, numerator]]}.
Json transport_report(const TransportResult& r, const Correspondence& g);

// {"T", "lambda", "compatible", "threshold", "minimizers": {y: u}, "iterations"}.
Json to_json(const DualCertificate& c);

Json to_json(const TestReport& r);

// Parses a JSON file; syntax errors name the file and line.
Json read_json_file(const std::string& path);

// One column with header "y"; fields containing commas or quotes are quoted.
std::vector<Outcome> read_data_csv(const std::string& path);
std::vector<Outcome> parse_data_csv(std::istream& in, const std::string& where);
void write_data_csv(std::ostream& out, std::span<const Outcome> data);
std::string csv_field(const std::string& text);

// A model specification {"model": name, "params": {...}} instantiated.
struct LoadedModel {
  std::string name;
  std::optional<ParametricTarget> parametric;
  std::optional<SemiparametricModel> semiparametric;
  std::optional<FiniteDistribution> p;  // population P shipped with the model
  std::optional<SelectionRule> rule;

  TestTarget target() const;
};

LoadedModel load_model(const Json& spec, const std::string& where);

}  // namespace falsiflow

#endif  // FALSIFLOW_JSON_IO_HPP
