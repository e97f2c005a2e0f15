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

#include "falsiflow/inference.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "falsiflow/error.hpp"
#include "falsiflow/parallel.hpp"
#include "falsiflow/random.hpp"
#include "falsiflow/transport.hpp"

namespace falsiflow {

StatisticKind parse_statistic(const std::string& name) {
  if (name == "tv-core") return StatisticKind::kTvCore;
  if (name == "tn-halflines") return StatisticKind::kTnHalflines;
  if (name == "semi") return StatisticKind::kSemiparametric;
  throw Error(ErrorCode::kBadParameters,
              "unknown statistic '" + name + "' (expected tv-core, tn-halflines or semi)");
}

std::string to_string(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::kTvCore: return "tv-core";
    case StatisticKind::kTnHalflines: return "tn-halflines";
    case StatisticKind::kSemiparametric: return "semi";
  }
  return "?";
}

std::string to_string(BootstrapScheme scheme) {
  return scheme == BootstrapScheme::kRecentered ? "recentered" : "naive";
}

namespace {

void require_data(std::span<const Outcome> data) {
  if (data.empty()) throw Error(ErrorCode::kEmptyData, "no observations");
}

// Data labels missing from `support`, in first-appearance order.
std::vector<Label> unknown_labels(std::span<const Outcome> data,
                                  const std::vector<Label>& support) {
  std::set<Label> known(support.begin(), support.end());
  std::vector<Label> extra;
  for (const auto& y : data) {
    if (known.insert(y).second) extra.push_back(y);
  }
  return extra;
}

double parse_real(const Label& label) {
  const std::string& s = label.text;
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw Error(ErrorCode::kNotOrdered,
                "tn-halflines needs real-valued outcomes; '" + s +
                    "' is not a number, so the outcome space has no total order");
  }
  return v;
}

TestReport base_report(std::string name, std::size_t n, double value) {
  TestReport r;
  r.statistic = std::move(name);
  r.n = n;
  r.value = value;
  r.scaled_value = std::sqrt(static_cast<double>(n)) * value;
  return r;
}

// Half-line geometry shared by the statistic and its bootstrap.
struct HalfLineFrame {
  Correspondence g;                 // extended by unknown data outcomes
  std::vector<Mass> nu;             // aligned to g's latent support
  std::vector<double> value;        // numeric value per outcome
  std::vector<double> cuts;         // distinct observed values, increasing
  std::vector<OutcomeSet> lower;    // (-inf, cut]
  std::vector<OutcomeSet> upper;    // [cut, inf)
  std::vector<Mass> lower_capacity;
  std::vector<Mass> upper_capacity;

  HalfLineFrame(std::span<const Outcome> data, const FiniteDistribution& nu_in,
                const Correspondence& g_in) {
    const auto extra = unknown_labels(data, g_in.outcome_support());
    g = g_in.with_extra_outcomes(extra);
    nu = nu_in.aligned_to(g.latent_support());
    for (const auto& y : g.outcome_support()) value.push_back(parse_real(y));
    std::set<double> distinct;
    for (const auto& y : data) distinct.insert(parse_real(y));
    cuts.assign(distinct.begin(), distinct.end());
    for (double c : cuts) {
      OutcomeSet lo(g.outcome_size()), hi(g.outcome_size());
      for (std::size_t i = 0; i < g.outcome_size(); ++i) {
        if (value[i] <= c) lo.insert(i);
        if (value[i] >= c) hi.insert(i);
      }
      lower_capacity.push_back(capacity(g, nu, lo));
      upper_capacity.push_back(capacity(g, nu, hi));
      lower.push_back(std::move(lo));
      upper.push_back(std::move(hi));
    }
  }

  std::vector<Mass> masses(std::span<const Outcome> sample) const {
    return empirical(sample).aligned_to(g.outcome_support());
  }

  static Mass measure(std::span<const Mass> m, const OutcomeSet& a) {
    Mass s = 0;
    for (std::size_t i : a.indices()) s += m[i];
    return s;
  }
};

TestReport halfline_report(const HalfLineFrame& f, std::size_t n,
                           std::span<const Mass> pn) {
  Mass best = 0;
  std::optional<std::pair<std::size_t, bool>> arg;
  bool first = true;
  for (std::size_t k = 0; k < f.cuts.size(); ++k) {
    for (bool is_lower : {true, false}) {
      const OutcomeSet& a = is_lower ? f.lower[k] : f.upper[k];
      const Mass cap = is_lower ? f.lower_capacity[k] : f.upper_capacity[k];
      const Mass d = HalfLineFrame::measure(pn, a) - cap;
      if (first || d > best) {
        best = d;
        arg = {k, is_lower};
        first = false;
      }
    }
  }
  TestReport r = base_report("tn-halflines", n, to_probability(std::max<Mass>(best, 0)));
  const auto [k, is_lower] = *arg;
  r.halfline = HalfLine{is_lower, f.cuts[k]};
  if (best > 0) r.witness = f.g.labels_of(is_lower ? f.lower[k] : f.upper[k]);
  return r;
}

std::pair<FiniteDistribution, SemiparametricModel> semi_problem(
    std::span<const Outcome> data, const SemiparametricModel& model) {
  const auto extra = unknown_labels(data, model.correspondence().outcome_support());
  return {empirical(data), extra.empty() ? model : model.with_extra_outcomes(extra)};
}

const ParametricTarget& parametric(const TestTarget& target, StatisticKind kind) {
  if (const auto* p = std::get_if<ParametricTarget>(&target)) return *p;
  throw Error(ErrorCode::kBadParameters,
              to_string(kind) + " needs a parametric model (G, nu); use semi for moment models");
}

const SemiparametricModel& semiparametric(const TestTarget& target) {
  if (const auto* m = std::get_if<SemiparametricModel>(&target)) return *m;
  throw Error(ErrorCode::kBadParameters, "semi needs a model with moment restrictions");
}

}  // namespace

TestReport statistic_tv_core(std::span<const Outcome> data, const FiniteDistribution& nu,
                             const Correspondence& g) {
  require_data(data);
  const auto extra = unknown_labels(data, g.outcome_support());
  const Correspondence ge = g.with_extra_outcomes(extra);
  const TransportResult res = solve_zero_one(empirical(data), nu, ge);
  TestReport r = base_report("tv-core", data.size(), res.primal_value());
  r.witness = ge.labels_of(res.witness);
  return r;
}

TestReport statistic_tn_halflines(std::span<const Outcome> data, const FiniteDistribution& nu,
                                  const Correspondence& g) {
  require_data(data);
  const HalfLineFrame frame(data, nu, g);
  return halfline_report(frame, data.size(), frame.masses(data));
}

TestReport statistic_semiparametric(std::span<const Outcome> data,
                                    const SemiparametricModel& model,
                                    const DualOptions& options) {
  require_data(data);
  auto [pn, m] = semi_problem(data, model);
  DualCertificate cert = maximize_dual(m, pn, options);
  TestReport r = base_report("semi", data.size(), std::max(cert.T, 0.0));
  r.certificate = std::move(cert);
  return r;
}

TestReport compute_statistic(std::span<const Outcome> data, const TestTarget& target,
                             StatisticKind kind) {
  switch (kind) {
    case StatisticKind::kTvCore: {
      const auto& t = parametric(target, kind);
      return statistic_tv_core(data, t.nu, t.g);
    }
    case StatisticKind::kTnHalflines: {
      const auto& t = parametric(target, kind);
      return statistic_tn_halflines(data, t.nu, t.g);
    }
    case StatisticKind::kSemiparametric:
      return statistic_semiparametric(data, semiparametric(target));
  }
  throw Error(ErrorCode::kBadParameters, "unknown statistic kind");
}

TestReport bootstrap_pvalue(std::span<const Outcome> data, const TestTarget& target,
                            StatisticKind kind, std::size_t B, std::uint64_t seed,
                            BootstrapScheme scheme) {
  require_data(data);
  if (B == 0) throw Error(ErrorCode::kBadParameters, "bootstrap needs B >= 1");
  std::vector<Outcome> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  TestReport report = compute_statistic(sorted, target, kind);
  const FiniteDistribution pn = empirical(sorted);

  // Per-statistic replicate evaluators; each reads only shared immutable state.
  std::optional<HalfLineFrame> frame;
  std::vector<Mass> frame_pn;
  std::optional<std::pair<FiniteDistribution, SemiparametricModel>> semi;
  if (kind == StatisticKind::kTnHalflines) {
    const auto& t = parametric(target, kind);
    frame.emplace(sorted, t.nu, t.g);
    frame_pn = frame->masses(sorted);
  }
  if (kind == StatisticKind::kSemiparametric) semi = semi_problem(sorted, semiparametric(target));

  auto replicate = [&](std::span<const Outcome> sample) -> double {
    if (scheme == BootstrapScheme::kNaive) {
      if (kind == StatisticKind::kTnHalflines) {
        // The half-line class stays the one observed in the original data.
        return halfline_report(*frame, n, frame->masses(sample)).value;
      }
      return compute_statistic(sample, target, kind).value;
    }
    switch (kind) {
      case StatisticKind::kTvCore:
        return total_variation(empirical(sample), pn);
      case StatisticKind::kTnHalflines: {
        const auto star = frame->masses(sample);
        Mass best = 0;
        for (std::size_t k = 0; k < frame->cuts.size(); ++k) {
          for (const OutcomeSet* a : {&frame->lower[k], &frame->upper[k]}) {
            best = std::max(best, HalfLineFrame::measure(star, *a) -
                                      HalfLineFrame::measure(frame_pn, *a));
          }
        }
        return to_probability(best);
      }
      case StatisticKind::kSemiparametric: {
        const FiniteDistribution ps = empirical(sample);
        return maximize_dual(semi->second, ps).T - report.value;
      }
    }
    return 0.0;
  };

  std::vector<double> draws(B, 0.0);
  parallel_for(B, worker_count(), [&](std::size_t b) {
    Engine engine(derive_seed(seed, b + 1));
    std::vector<Outcome> sample;
    sample.reserve(n);
    for (std::size_t i = 0; i < n; ++i) sample.push_back(sorted[uniform_below(engine, n)]);
    try {
      draws[b] = replicate(sample);
    } catch (const Error& e) {
      throw Error(e.code(), "bootstrap replicate " + std::to_string(b) + " (seed " +
                                std::to_string(seed) + ") failed: " + e.what());
    }
  });

  const double tol = 1e-12 * std::max(1.0, std::abs(report.value));
  std::size_t exceed = 0;
  for (double t : draws) {
    if (t >= report.value - tol) ++exceed;
  }
  report.pvalue = static_cast<double>(1 + exceed) / static_cast<double>(B + 1);
  report.B = B;
  report.seed = seed;
  report.scheme = to_string(scheme);
  report.replicates = std::move(draws);
  return report;
}

}  // namespace falsiflow
