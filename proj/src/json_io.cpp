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

#include "falsiflow/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "falsiflow/error.hpp"

namespace falsiflow {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kParseError, where + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

std::vector<Label> labels_from(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of labels");
  std::vector<Label> out;
  for (const auto& e : j) {
    if (!e.is_string()) fail(where, "labels must be strings");
    out.emplace_back(e.get<std::string>());
  }
  return out;
}

std::vector<double> numbers_from(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) fail(where, "expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> matrix_from(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of rows");
  std::vector<std::vector<double>> out;
  for (const auto& row : j) out.push_back(numbers_from(row, where));
  return out;
}

double number(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_number()) fail(where, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::string string_field(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_string()) fail(where, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

Json to_json(const FiniteDistribution& d) {
  Json j;
  Json support = Json::array();
  for (const auto& l : d.support()) support.push_back(l.text);
  j["support"] = std::move(support);
  j["mass"] = Json(std::vector<Mass>(d.masses().begin(), d.masses().end()));
  j["denominator"] = kDenominator;
  return j;
}

FiniteDistribution distribution_from_json(const Json& j, const std::string& where) {
  const auto support = labels_from(field(j, "support", where), where);
  if (j.contains("mass")) {
    const Json& m = j["mass"];
    if (!m.is_array() || m.size() != support.size()) {
      fail(where, "'mass' must list one numerator per support label");
    }
    const Mass denominator = j.contains("denominator") ? j["denominator"].get<Mass>() : kDenominator;
    if (denominator <= 0) fail(where, "'denominator' must be positive");
    std::vector<Mass> masses;
    for (const auto& e : m) {
      if (!e.is_number_integer()) fail(where, "'mass' entries must be integers");
      masses.push_back(e.get<Mass>());
    }
    if (denominator == kDenominator) {
      return FiniteDistribution::from_numerators(support, std::move(masses));
    }
    Mass total = 0;
    for (Mass v : masses) total += v;
    if (total != denominator) {
      throw Error(ErrorCode::kMassSumOutOfTolerance,
                  where + ": numerators sum to " + std::to_string(total) + ", not " +
                      std::to_string(denominator));
    }
    std::vector<double> probs;
    for (Mass v : masses) probs.push_back(static_cast<double>(v) / static_cast<double>(denominator));
    return make_distribution(support, probs);
  }
  const auto probs = numbers_from(field(j, "prob", where), where);
  if (probs.size() != support.size()) fail(where, "'prob' must match 'support'");
  return make_distribution(support, probs);
}

Json to_json(const Correspondence& g) {
  Json j;
  Json latent = Json::array(), outcomes = Json::array();
  for (const auto& l : g.latent_support()) latent.push_back(l.text);
  for (const auto& l : g.outcome_support()) outcomes.push_back(l.text);
  j["latent"] = std::move(latent);
  j["outcomes"] = std::move(outcomes);
  Json images = Json::object();
  for (std::size_t u = 0; u < g.latent_size(); ++u) {
    Json img = Json::array();
    for (const auto& y : g.labels_of(g.image(u))) img.push_back(y.text);
    images[g.latent_support()[u].text] = std::move(img);
  }
  j["G"] = std::move(images);
  return j;
}

Correspondence correspondence_from_json(const Json& j, const std::string& where) {
  auto latent = labels_from(field(j, "latent", where), where);
  auto outcomes = labels_from(field(j, "outcomes", where), where);
  const Json& gj = field(j, "G", where);
  if (!gj.is_object()) fail(where, "'G' must map latent labels to outcome lists");
  std::vector<std::vector<Label>> images;
  for (const auto& u : latent) {
    auto it = gj.find(u.text);
    if (it == gj.end()) fail(where, "'G' has no entry for latent '" + u.text + "'");
    images.push_back(labels_from(*it, where));
  }
  for (auto it = gj.begin(); it != gj.end(); ++it) {
    if (std::find(latent.begin(), latent.end(), Label(it.key())) == latent.end()) {
      fail(where, "'G' names unknown latent '" + it.key() + "'");
    }
  }
  return Correspondence::from_labels(std::move(latent), std::move(outcomes), images);
}

Json transport_report(const TransportResult& r, const Correspondence& g) {
  Json j;
  j["primal"] = r.primal_value();
  j["dual"] = r.dual_value();
  j["compatible"] = r.compatible();
  Json witness = Json::array();
  for (const auto& y : g.labels_of(r.witness)) witness.push_back(y.text);
  j["witness"] = std::move(witness);
  Json plan = Json::array();
  for (const auto& e : r.plan) {
    plan.push_back(Json::array({g.latent_support()[e.latent].text,
                                g.outcome_support()[e.outcome].text, e.mass}));
  }
  j["plan"] = std::move(plan);
  return j;
}

Json to_json(const DualCertificate& c) {
  Json j;
  j["T"] = c.T;
  j["lambda"] = Json(c.lambda);
  j["compatible"] = c.compatible;
  j["threshold"] = c.threshold;
  Json mins = Json::object();
  for (const auto& [y, u] : c.minimizers) mins[y.text] = u.text;
  j["minimizers"] = std::move(mins);
  j["iterations"] = c.iterations;
  j["upper_bound"] = c.upper_bound;
  j["box"] = c.box;
  j["boundary_active"] = c.boundary_active;
  return j;
}

Json to_json(const TestReport& r) {
  Json j;
  j["statistic"] = r.statistic;
  j["value"] = r.value;
  j["scaled_value"] = r.scaled_value;
  j["pvalue"] = r.pvalue ? Json(*r.pvalue) : Json(nullptr);
  j["B"] = r.B;
  j["seed"] = r.seed;
  j["n"] = r.n;
  if (!r.scheme.empty()) j["scheme"] = r.scheme;
  Json witness = Json::array();
  for (const auto& y : r.witness) witness.push_back(y.text);
  j["witness"] = std::move(witness);
  if (r.halfline) {
    j["halfline"] = {{"side", r.halfline->lower ? "lower" : "upper"},
                     {"endpoint", r.halfline->endpoint}};
  }
  if (r.certificate) j["certificate"] = to_json(*r.certificate);
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw Error(ErrorCode::kParseError,
                path + ":" + std::to_string(line) + ": invalid JSON (" + e.what() + ")");
  }
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<Outcome> parse_data_csv(std::istream& in, const std::string& where) {
  std::vector<Outcome> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header) {
      if (line != "y") fail(where + ":" + std::to_string(lineno), "expected header \"y\"");
      header = true;
      continue;
    }
    if (line.empty()) continue;
    std::string value;
    if (line.front() == '"') {
      std::size_t i = 1;
      bool closed = false;
      for (; i < line.size(); ++i) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            value += '"';
            ++i;
          } else {
            closed = true;
            ++i;
            break;
          }
        } else {
          value += line[i];
        }
      }
      if (!closed || i != line.size()) {
        fail(where + ":" + std::to_string(lineno), "malformed quoted field");
      }
    } else {
      if (line.find(',') != std::string::npos) {
        fail(where + ":" + std::to_string(lineno),
             "expected a single column; quote labels that contain commas");
      }
      value = line;
    }
    out.emplace_back(std::move(value));
  }
  if (!header) fail(where + ":1", "expected header \"y\"");
  return out;
}

std::vector<Outcome> read_data_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");
  return parse_data_csv(in, path);
}

void write_data_csv(std::ostream& out, std::span<const Outcome> data) {
  out << "y\n";
  for (const auto& y : data) out << csv_field(y.text) << '\n';
}

TestTarget LoadedModel::target() const {
  if (parametric) return *parametric;
  return *semiparametric;
}

namespace {

LatentGrid grid_from_json(const Json& j, std::size_t dimension, const std::string& where) {
  if (j.contains("nodes")) {
    LatentGrid grid;
    std::vector<std::pair<Label, double>> weights;
    bool weighted = false;
    for (const auto& row : j["nodes"]) {
      std::vector<double> v = numbers_from(row, where);
      if (v.size() == dimension + 1) {
        weighted = true;
      } else if (v.size() != dimension) {
        fail(where, "grid nodes need " + std::to_string(dimension) + " coordinates (plus an optional weight)");
      }
      GridNode node;
      node.coordinates.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(dimension));
      node.label = dimension == 1 ? Label(format_number(node.coordinates[0]))
                                  : tuple_label(node.coordinates);
      weights.emplace_back(node.label, v.size() > dimension ? v.back() : 1.0);
      grid.nodes.push_back(std::move(node));
    }
    if (grid.nodes.empty()) fail(where, "grid has no nodes");
    if (!weighted) {
      for (auto& w : weights) w.second = 1.0 / static_cast<double>(weights.size());
    }
    grid.weights = make_distribution(weights);
    grid.truncated = j.value("truncated", false);
    return grid;
  }
  const double lo = j.value("lo", -2.0);
  const double hi = j.value("hi", 2.0);
  if (j.contains("cells")) {
    if (dimension != 2) fail(where, "'cells' grids are two-dimensional");
    return cell_centred_grid(lo, hi, j["cells"].get<std::size_t>());
  }
  const std::size_t count = j.value("count", std::size_t{41});
  LatentGrid base = uniform_grid(lo, hi, count);
  LatentGrid grid = base;
  for (std::size_t d = 1; d < dimension; ++d) grid = product_grid(grid, base);
  grid.truncated = j.value("truncated", false);
  return grid;
}

std::vector<double> coordinates_of(const LatentGrid& grid) {
  std::vector<double> out;
  for (const auto& n : grid.nodes) out.push_back(n.coordinates.at(0));
  return out;
}

}  // namespace

LoadedModel load_model(const Json& spec, const std::string& where) {
  try {
    LoadedModel m;
    m.name = string_field(spec, "model", where);
    const Json params = spec.contains("params") ? spec["params"] : Json::object();
    if (!params.is_object()) fail(where, "'params' must be an object");
    if (m.name == "entry_game") {
      const double d1 = number(params, "delta1", where);
      const double d2 = number(params, "delta2", where);
      const LatentGrid grid = params.contains("grid")
                                  ? grid_from_json(params["grid"], 2, where)
                                  : cell_centred_grid(-2.0, 2.0, 40);
      auto inst = entry_game(d1, d2, grid);
      m.parametric = ParametricTarget{std::move(inst.g), std::move(inst.nu)};
    } else if (m.name == "line_network") {
      const auto masses = numbers_from(field(params, "masses", where), where);
      auto inst = line_network_game(masses);
      m.parametric = ParametricTarget{std::move(inst.g), std::move(inst.nu)};
    } else if (m.name == "search") {
      const auto eps = numbers_from(field(params, "epsilon", where), where);
      const auto alpha = numbers_from(field(params, "alpha", where), where);
      Json nodes = Json::array();
      const auto weights = params.contains("weights")
                               ? numbers_from(params["weights"], where)
                               : std::vector<double>(eps.size(), 1.0 / static_cast<double>(eps.size()));
      if (weights.size() != eps.size()) fail(where, "'weights' must match 'epsilon'");
      for (std::size_t i = 0; i < eps.size(); ++i) nodes.push_back({eps[i], weights[i]});
      const LatentGrid grid = grid_from_json(Json{{"nodes", nodes}}, 1, where);
      auto game = search_game(grid, alpha);
      m.parametric = ParametricTarget{std::move(game.instance.g), std::move(game.instance.nu)};
    } else if (m.name == "pilot") {
      const double eta = number(params, "eta", where);
      if (params.contains("epsilon")) {
        const Json& e = params["epsilon"];
        const auto eps = e.is_array() ? numbers_from(e, where) : coordinates_of(grid_from_json(e, 1, where));
        m.semiparametric = binary_response_pilot(eta, eps);
      } else {
        m.semiparametric = binary_response_pilot(eta);
      }
    } else if (m.name == "moment_inequality") {
      const auto outcomes = labels_from(field(params, "outcomes", where), where);
      const auto phi = matrix_from(field(params, "phi", where), where);
      const std::size_t d = phi.empty() ? 0 : phi[0].size();
      const LatentGrid grid = grid_from_json(params.value("grid", Json::object()), d, where);
      m.semiparametric = moment_inequality_model(outcomes, phi, grid);
    } else if (m.name == "example4") {
      const Json& mj = field(params, "M", where);
      if (!mj.is_number_integer()) fail(where, "'M' must be an integer");
      auto ex = params.contains("p")
                    ? example4_instance(mj.get<std::int64_t>(), distribution_from_json(params["p"], where))
                    : example4_instance(mj.get<std::int64_t>());
      m.semiparametric = std::move(ex.model);
      m.p = std::move(ex.p);
    } else if (m.name == "custom") {
      Correspondence g = correspondence_from_json(params, where);
      if (params.contains("moments")) {
        m.semiparametric = SemiparametricModel(std::move(g), matrix_from(params["moments"], where),
                                               {"custom", params.value("truncated", false)});
      } else {
        FiniteDistribution nu = distribution_from_json(field(params, "nu", where), where);
        m.parametric = ParametricTarget{std::move(g), std::move(nu)};
      }
    } else {
      fail(where, "unknown model '" + m.name + "'");
    }
    if (params.contains("p") && !m.p) m.p = distribution_from_json(params["p"], where);
    if (params.contains("rule")) {
      m.rule = parse_rule(string_field(params, "rule", where), params.value("rule_seed", std::uint64_t{0}));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(where, e.what());
  }
}

}  // namespace falsiflow
