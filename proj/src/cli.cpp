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

#include "falsiflow/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "falsiflow/error.hpp"
#include "falsiflow/inference.hpp"
#include "falsiflow/json_io.hpp"
#include "falsiflow/models.hpp"
#include "falsiflow/parallel.hpp"
#include "falsiflow/random.hpp"
#include "falsiflow/semiparametric.hpp"
#include "falsiflow/transport.hpp"

namespace falsiflow {

namespace {

struct RunConfig {
  std::string command;
  std::string model;
  std::string data;
  std::string dist;
  std::string out;
  std::string stat;
  std::string format;
  std::string grid;
  std::string rule;
  std::size_t B = 200;
  std::uint64_t seed = 0;
  std::size_t n = 1000;
  double alpha = 0.05;
};

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw Error(ErrorCode::kParseError, "grid spec: '" + text + "' is not a number in " + what);
  }
  return v;
}

// Rounds away representation noise from start + i * step.
double tidy(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

std::vector<std::vector<double>> grid_points(const std::vector<GridAxis>& axes) {
  std::vector<std::vector<double>> points;
  if (axes.empty()) return points;
  for (const auto& a : axes) {
    if (a.values.empty()) return points;
  }
  std::vector<std::size_t> odometer(axes.size(), 0);
  for (;;) {
    std::vector<double> p;
    for (std::size_t i = 0; i < axes.size(); ++i) p.push_back(axes[i].values[odometer[i]]);
    points.push_back(std::move(p));
    std::size_t i = axes.size();
    while (i > 0) {
      --i;
      if (++odometer[i] < axes[i].values.size()) break;
      odometer[i] = 0;
      if (i == 0) return points;
    }
  }
}

LoadedModel load_model_file(const RunConfig& cfg, Json* spec_out = nullptr) {
  if (cfg.model.empty()) throw Error(ErrorCode::kBadParameters, "--model is required");
  Json spec = read_json_file(cfg.model);
  if (spec_out) *spec_out = spec;
  return load_model(spec, cfg.model);
}

std::optional<FiniteDistribution> population(const RunConfig& cfg, const LoadedModel& m) {
  if (!cfg.dist.empty()) return distribution_from_json(read_json_file(cfg.dist), cfg.dist);
  if (!cfg.data.empty()) {
    const auto data = read_data_csv(cfg.data);
    if (data.empty()) throw Error(ErrorCode::kEmptyData, cfg.data + ": no observations");
    return empirical(data);
  }
  return m.p;
}

std::vector<Label> unknown(const FiniteDistribution& p, const std::vector<Label>& support) {
  std::vector<Label> extra;
  for (const auto& y : p.support()) {
    if (std::find(support.begin(), support.end(), y) == support.end()) extra.push_back(y);
  }
  return extra;
}

struct ExactVerdict {
  bool compatible = false;
  Json report;
};

ExactVerdict exact_verdict(const LoadedModel& m, const FiniteDistribution& p) {
  ExactVerdict v;
  v.report["model"] = m.name;
  if (m.parametric) {
    const auto extra = unknown(p, m.parametric->g.outcome_support());
    const Correspondence g = m.parametric->g.with_extra_outcomes(extra);
    const TransportResult r = solve_zero_one(p, m.parametric->nu, g);
    const Json t = transport_report(r, g);
    for (const auto& [k, val] : t.items()) v.report[k] = val;
    v.compatible = r.compatible();
    return v;
  }
  const auto extra = unknown(p, m.semiparametric->correspondence().outcome_support());
  const SemiparametricModel model = m.semiparametric->with_extra_outcomes(extra);
  DualCertificate cert;
  bool diverged = false;
  try {
    cert = maximize_dual(model, p);
  } catch (const DivergedError& e) {
    cert = e.certificate();
    diverged = true;
    // On the boundary the objective is still an attained lower bound of the
    // supremum, so only a positive value is conclusive.
    if (cert.T <= cert.threshold) throw;
  }
  v.compatible = !diverged && cert.compatible;
  v.report["compatible"] = v.compatible;
  v.report["T"] = cert.T;
  v.report["diverged"] = diverged;
  v.report["certificate"] = to_json(cert);
  return v;
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw Error(ErrorCode::kBadParameters, "cannot write " + cfg.out);
  f << text;
}

std::string format_or(const RunConfig& cfg, const std::string& fallback) {
  const std::string f = cfg.format.empty() ? fallback : cfg.format;
  if (f != "json" && f != "csv") {
    throw Error(ErrorCode::kBadParameters, "--format must be json or csv");
  }
  return f;
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const LoadedModel m = load_model_file(cfg);
  const auto p = population(cfg, m);
  if (!p) throw Error(ErrorCode::kBadParameters, "check needs --dist or --data");
  const ExactVerdict v = exact_verdict(m, *p);
  emit(cfg, v.report.dump(2) + "\n", out);
  return v.compatible ? kExitCompatible : kExitIncompatible;
}

StatisticKind statistic_for(const RunConfig& cfg, const LoadedModel& m) {
  if (!cfg.stat.empty()) return parse_statistic(cfg.stat);
  return m.parametric ? StatisticKind::kTvCore : StatisticKind::kSemiparametric;
}

int cmd_test(const RunConfig& cfg, std::ostream& out) {
  const LoadedModel m = load_model_file(cfg);
  if (cfg.data.empty()) throw Error(ErrorCode::kBadParameters, "test needs --data");
  const auto data = read_data_csv(cfg.data);
  const StatisticKind kind = statistic_for(cfg, m);
  const std::string format = format_or(cfg, "json");
  const TestReport r = bootstrap_pvalue(data, m.target(), kind, cfg.B, cfg.seed);
  std::ostringstream s;
  if (format == "json") {
    s << to_json(r).dump(2) << "\n";
  } else {
    s << "replicate,value\n";
    for (std::size_t b = 0; b < r.replicates.size(); ++b) {
      s << b << ',' << format_number(r.replicates[b]) << '\n';
    }
  }
  emit(cfg, s.str(), out);
  return kExitCompatible;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const LoadedModel m = load_model_file(cfg);
  if (!m.parametric) {
    throw Error(ErrorCode::kBadParameters, "simulate needs a model with a latent distribution nu");
  }
  SelectionRule rule = m.rule.value_or(SelectionRule::first());
  if (!cfg.rule.empty()) rule = parse_rule(cfg.rule, cfg.seed);
  const auto data = simulate(m.parametric->g, m.parametric->nu, rule, cfg.n, cfg.seed);
  std::ostringstream s;
  write_data_csv(s, data);
  emit(cfg, s.str(), out);
  return kExitCompatible;
}

int cmd_invert(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Json spec;
  load_model_file(cfg, &spec);  // validates the base specification
  const auto axes = parse_grid_spec(cfg.grid);
  const auto points = grid_points(axes);
  if (cfg.data.empty() && cfg.dist.empty()) {
    throw Error(ErrorCode::kBadParameters, "invert needs --data or --dist");
  }
  std::optional<std::vector<Outcome>> data;
  std::optional<FiniteDistribution> dist;
  if (!cfg.dist.empty()) {
    dist = distribution_from_json(read_json_file(cfg.dist), cfg.dist);
  } else {
    data = read_data_csv(cfg.data);
  }
  const std::string format = format_or(cfg, "csv");
  if (points.empty()) err << "warning: empty parameter grid; the region is empty\n";

  struct PointResult {
    bool accepted = false;
    double score = 0.0;  // pvalue with data, T or primal with an exact P
  };
  std::vector<PointResult> results(points.size());
  parallel_for(points.size(), worker_count(), [&](std::size_t k) {
    Json s = spec;
    if (!s.contains("params")) s["params"] = Json::object();
    for (std::size_t i = 0; i < axes.size(); ++i) s["params"][axes[i].name] = points[k][i];
    const LoadedModel m = load_model(s, cfg.model);
    if (dist) {
      try {
        const ExactVerdict v = exact_verdict(m, *dist);
        results[k].accepted = v.compatible;
        results[k].score = v.report.contains("T") ? v.report["T"].get<double>()
                                                  : v.report["primal"].get<double>();
      } catch (const DivergedError& e) {
        throw Error(ErrorCode::kDiverged, "at grid point " + std::to_string(k) + ": " + e.what());
      }
    } else {
      const TestReport r = bootstrap_pvalue(*data, m.target(), statistic_for(cfg, m), cfg.B,
                                            derive_seed(cfg.seed, k));
      results[k].accepted = *r.pvalue >= cfg.alpha;
      results[k].score = *r.pvalue;
    }
  });

  std::ostringstream s;
  if (format == "csv") {
    for (std::size_t i = 0; i < axes.size(); ++i) s << (i ? "," : "") << csv_field(axes[i].name);
    s << '\n';
    for (std::size_t k = 0; k < points.size(); ++k) {
      if (!results[k].accepted) continue;
      for (std::size_t i = 0; i < axes.size(); ++i) {
        s << (i ? "," : "") << format_number(points[k][i]);
      }
      s << '\n';
    }
  } else {
    Json j;
    Json names = Json::array();
    for (const auto& a : axes) names.push_back(a.name);
    j["parameters"] = std::move(names);
    j["alpha"] = cfg.alpha;
    j["score"] = dist ? "T" : "pvalue";
    Json rows = Json::array(), accepted = Json::array();
    for (std::size_t k = 0; k < points.size(); ++k) {
      rows.push_back({{"point", points[k]}, {"score", results[k].score},
                      {"accepted", results[k].accepted}});
      if (results[k].accepted) accepted.push_back(points[k]);
    }
    j["points"] = std::move(rows);
    j["accepted"] = std::move(accepted);
    s << j.dump(2) << "\n";
  }
  emit(cfg, s.str(), out);
  return kExitCompatible;
}

}  // namespace

std::vector<GridAxis> parse_grid_spec(const std::string& spec) {
  std::vector<GridAxis> axes;
  if (spec.empty()) return axes;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::kParseError, "grid spec: expected name=start:stop:step, got '" + item + "'");
    }
    GridAxis axis;
    axis.name = item.substr(0, eq);
    std::vector<std::string> parts;
    std::stringstream rs(item.substr(eq + 1));
    std::string part;
    while (std::getline(rs, part, ':')) parts.push_back(part);
    if (parts.size() == 1) {
      axis.values.push_back(parse_double(parts[0], item));
    } else if (parts.size() == 3) {
      const double start = parse_double(parts[0], item);
      const double stop = parse_double(parts[1], item);
      const double step = parse_double(parts[2], item);
      if (!(step > 0.0)) throw Error(ErrorCode::kParseError, "grid spec: step must be positive in '" + item + "'");
      if (stop >= start) {
        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < count; ++i) {
          axis.values.push_back(tidy(start + step * static_cast<double>(i)));
        }
      }
    } else {
      throw Error(ErrorCode::kParseError, "grid spec: expected name=start:stop:step, got '" + item + "'");
    }
    axes.push_back(std::move(axis));
  }
  return axes;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Falsification tests for incompletely specified models"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--model", cfg.model, "model specification JSON");
    sub->add_option("--data", cfg.data, "CSV of observed outcome labels (header \"y\")");
    sub->add_option("--dist", cfg.dist, "distribution JSON of P");
    sub->add_option("--stat", cfg.stat, "tv-core, tn-halflines or semi");
    sub->add_option("--B", cfg.B, "bootstrap replicates");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--alpha", cfg.alpha, "test level for invert");
    sub->add_option("--grid", cfg.grid, "parameter grid name=start:stop:step,...");
    sub->add_option("--format", cfg.format, "json or csv");
    sub->add_option("--out", cfg.out, "output path (default stdout)");
    sub->add_option("--n", cfg.n, "sample size for simulate");
    sub->add_option("--rule", cfg.rule, "selection rule for simulate: first or uniform-random");
  };
  for (const char* name : {"check", "test", "simulate", "invert"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub);
    sub->callback([&cfg, name] { cfg.command = name; });
  }
  app.get_subcommand("check")->description("exact compatibility verdict for P");
  app.get_subcommand("test")->description("test statistic with bootstrap p-value");
  app.get_subcommand("simulate")->description("simulate outcome data from the model");
  app.get_subcommand("invert")->description("confidence region over a parameter grid");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "falsiflow: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (cfg.command == "check") return cmd_check(cfg, out);
    if (cfg.command == "test") return cmd_test(cfg, out);
    if (cfg.command == "simulate") return cmd_simulate(cfg, out);
    if (cfg.command == "invert") return cmd_invert(cfg, out, err);
    err << "falsiflow: unknown command\n";
  } catch (const std::exception& e) {
    err << "falsiflow: " << e.what() << "\n";
  }
  return kExitError;
}

}  // namespace falsiflow
