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

// Python bindings. Reports are returned as plain dicts with the same field
// names as the CLI's JSON output.

#include <pybind11/gil_safe_call_once.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "falsiflow/correspondence.hpp"
#include "falsiflow/error.hpp"
#include "falsiflow/inference.hpp"
#include "falsiflow/json_io.hpp"
#include "falsiflow/measure.hpp"
#include "falsiflow/models.hpp"
#include "falsiflow/semiparametric.hpp"
#include "falsiflow/transport.hpp"

namespace py = pybind11;
using namespace falsiflow;

namespace {

py::object to_python(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return py::none();
    case Json::value_t::boolean: return py::bool_(j.get<bool>());
    case Json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case Json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case Json::value_t::number_float: return py::float_(j.get<double>());
    case Json::value_t::string: return py::str(j.get<std::string>());
    case Json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(to_python(v));
      return std::move(out);
    }
    case Json::value_t::object: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_python(v);
      return std::move(out);
    }
    default: return py::none();
  }
}

std::vector<Label> to_labels(const std::vector<std::string>& v) {
  return {v.begin(), v.end()};
}

std::vector<std::string> from_labels(const std::vector<Label>& v) {
  std::vector<std::string> out;
  for (const auto& l : v) out.push_back(l.text);
  return out;
}

Correspondence make_correspondence(const std::vector<std::string>& latent,
                                   const std::vector<std::string>& outcomes,
                                   const std::map<std::string, std::vector<std::string>>& images) {
  std::vector<std::vector<Label>> rows;
  for (const auto& u : latent) {
    auto it = images.find(u);
    if (it == images.end()) {
      throw Error(ErrorCode::kSupportMismatch, "no image for latent '" + u + "'");
    }
    rows.push_back(to_labels(it->second));
  }
  return Correspondence::from_labels(to_labels(latent), to_labels(outcomes), rows);
}

TestTarget make_target(const std::optional<Correspondence>& g, const std::optional<FiniteDistribution>& nu,
                       const std::optional<SemiparametricModel>& model) {
  if (model) return *model;
  if (g && nu) return ParametricTarget{*g, *nu};
  throw Error(ErrorCode::kBadParameters, "pass either model= or both g= and nu=");
}

}  // namespace

PYBIND11_MODULE(_falsiflow, m) {
  m.doc() = "Zero-one cost optimal transport tests of incomplete models";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&m] { return py::object(py::exception<Error>(m, "FalsiflowError")); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object& type = error_type.get_stored();
      py::object instance = type(e.what());
      instance.attr("code") = py::str(std::string(to_string(e.code())));
      PyErr_SetObject(type.ptr(), instance.ptr());
    }
  });

  py::class_<FiniteDistribution>(m, "Distribution")
      .def(py::init([](const std::vector<std::string>& support, const std::vector<double>& probs) {
             return make_distribution(to_labels(support), probs);
           }),
           py::arg("support"), py::arg("probabilities"))
      .def_static("from_masses",
                  [](const std::vector<std::string>& support, const std::vector<Mass>& masses) {
                    return FiniteDistribution::from_numerators(to_labels(support), masses);
                  })
      .def_property_readonly("support", [](const FiniteDistribution& d) { return from_labels(d.support()); })
      .def_property_readonly("masses", [](const FiniteDistribution& d) {
        return std::vector<Mass>(d.masses().begin(), d.masses().end());
      })
      .def("probabilities", [](const FiniteDistribution& d) {
        std::vector<double> out;
        for (std::size_t i = 0; i < d.size(); ++i) out.push_back(d.probability(i));
        return out;
      })
      .def("to_dict", [](const FiniteDistribution& d) { return to_python(to_json(d)); })
      .def("__len__", &FiniteDistribution::size);
  m.attr("DENOMINATOR") = kDenominator;

  py::class_<Correspondence>(m, "Correspondence")
      .def(py::init(&make_correspondence), py::arg("latent"), py::arg("outcomes"), py::arg("images"))
      .def_property_readonly("latent", [](const Correspondence& g) { return from_labels(g.latent_support()); })
      .def_property_readonly("outcomes", [](const Correspondence& g) { return from_labels(g.outcome_support()); })
      .def("image", [](const Correspondence& g, const std::string& u) {
        const auto idx = g.latent_index(Label(u));
        if (!idx) throw Error(ErrorCode::kIndexOutOfRange, "unknown latent '" + u + "'");
        return from_labels(g.labels_of(g.image(*idx)));
      })
      .def("to_dict", [](const Correspondence& g) { return to_python(to_json(g)); });

  py::class_<SemiparametricModel>(m, "SemiparametricModel")
      .def(py::init([](const Correspondence& g, std::vector<std::vector<double>> moments, bool truncated) {
             return SemiparametricModel(g, std::move(moments), {"custom", truncated});
           }),
           py::arg("g"), py::arg("moments"), py::arg("truncated") = false)
      .def_property_readonly("correspondence", &SemiparametricModel::correspondence)
      .def_property_readonly("moments", &SemiparametricModel::moments);

  m.def("empirical", [](const std::vector<std::string>& data) {
    const auto labels = to_labels(data);
    return empirical(labels);
  });
  m.def("total_variation", &total_variation);
  m.def("solve_zero_one", [](const FiniteDistribution& p, const FiniteDistribution& nu, const Correspondence& g) {
    return to_python(transport_report(solve_zero_one(p, nu, g), g));
  }, py::arg("p"), py::arg("nu"), py::arg("g"));
  m.def("core_deficiency_bruteforce", [](const Correspondence& g, const FiniteDistribution& nu,
                                         const FiniteDistribution& p) {
    const Deficiency d = core_deficiency_bruteforce(g, nu, p);
    py::dict out;
    out["value"] = to_probability(d.value);
    out["raw"] = to_probability(d.raw);
    out["witness"] = from_labels(g.labels_of(d.witness));
    return out;
  }, py::arg("g"), py::arg("nu"), py::arg("p"));
  m.def("selection_minimax_check", [](const Correspondence& g, const FiniteDistribution& nu,
                                      const FiniteDistribution& p) {
    const MinimaxReport r = selection_minimax_check(g, nu, p);
    py::dict out;
    out["lhs"] = to_probability(r.lhs);
    out["lhs_deterministic"] = to_probability(r.lhs_deterministic);
    out["rhs"] = to_probability(r.rhs);
    out["equal"] = r.equal;
    out["selections"] = r.selections;
    return out;
  }, py::arg("g"), py::arg("nu"), py::arg("p"));

  m.def("maximize_dual", [](const SemiparametricModel& model, const FiniteDistribution& p) {
    return to_python(to_json(maximize_dual(model, p)));
  }, py::arg("model"), py::arg("p"));
  m.def("primal_lp", [](const SemiparametricModel& model, const FiniteDistribution& p) {
    return primal_lp(model, p).value;
  }, py::arg("model"), py::arg("p"));
  m.def("pin_latent_distribution", &pin_latent_distribution, py::arg("g"), py::arg("nu"));

  m.def("line_network_game", [](const std::vector<double>& masses) {
    auto inst = line_network_game(masses);
    return py::make_tuple(inst.g, inst.nu);
  }, py::arg("region_masses"));
  m.def("entry_game", [](double d1, double d2, std::size_t cells, double lo, double hi) {
    auto inst = entry_game(d1, d2, cell_centred_grid(lo, hi, cells));
    return py::make_tuple(inst.g, inst.nu);
  }, py::arg("delta1"), py::arg("delta2"), py::arg("cells") = 40, py::arg("lo") = -2.0, py::arg("hi") = 2.0);
  m.def("search_game", [](const std::vector<double>& epsilon, const std::vector<double>& alpha) {
    LatentGrid grid;
    for (double e : epsilon) grid.nodes.push_back({Label(format_number(e)), {e}});
    auto game = search_game(grid, alpha);
    return py::make_tuple(game.instance.g, game.instance.nu);
  }, py::arg("epsilon"), py::arg("alpha"));
  m.def("binary_response_pilot", py::overload_cast<double>(&binary_response_pilot), py::arg("eta"));
  m.def("pilot_distribution", &pilot_distribution, py::arg("prob_x1"), py::arg("p_z1_given_x1"),
        py::arg("p_z1_given_xm1"));
  m.def("example4_instance", [](std::int64_t big_m) {
    auto ex = example4_instance(big_m);
    return py::make_tuple(ex.model, ex.p);
  }, py::arg("M"));

  m.def("statistic", [](const std::vector<std::string>& data, const std::string& kind,
                        std::optional<Correspondence> g, std::optional<FiniteDistribution> nu,
                        std::optional<SemiparametricModel> model) {
    const auto labels = to_labels(data);
    return to_python(to_json(compute_statistic(labels, make_target(g, nu, model), parse_statistic(kind))));
  }, py::arg("data"), py::arg("kind") = "tv-core", py::arg("g") = py::none(), py::arg("nu") = py::none(),
     py::arg("model") = py::none());
  m.def("bootstrap", [](const std::vector<std::string>& data, const std::string& kind, std::size_t B,
                        std::uint64_t seed, std::optional<Correspondence> g,
                        std::optional<FiniteDistribution> nu, std::optional<SemiparametricModel> model,
                        const std::string& scheme) {
    if (scheme != "recentered" && scheme != "naive") {
      throw Error(ErrorCode::kBadParameters, "scheme must be recentered or naive");
    }
    const auto labels = to_labels(data);
    const TestReport r = [&] {
      py::gil_scoped_release release;
      return bootstrap_pvalue(labels, make_target(g, nu, model), parse_statistic(kind), B, seed,
                              scheme == "naive" ? BootstrapScheme::kNaive : BootstrapScheme::kRecentered);
    }();
    return to_python(to_json(r));
  }, py::arg("data"), py::arg("kind") = "tv-core", py::arg("B") = 200, py::arg("seed") = 0,
     py::arg("g") = py::none(), py::arg("nu") = py::none(), py::arg("model") = py::none(),
     py::arg("scheme") = "recentered");
  m.def("simulate", [](const Correspondence& g, const FiniteDistribution& nu, std::size_t n,
                       std::uint64_t seed, const std::string& rule, std::uint64_t rule_seed) {
    return from_labels(simulate(g, nu, parse_rule(rule, rule_seed), n, seed));
  }, py::arg("g"), py::arg("nu"), py::arg("n"), py::arg("seed") = 0, py::arg("rule") = "first",
     py::arg("rule_seed") = 0);
}
