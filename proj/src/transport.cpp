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

#include "falsiflow/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "falsiflow/error.hpp"
#include "falsiflow/lp.hpp"
#include "falsiflow/max_flow.hpp"

namespace falsiflow {

TransportResult solve_zero_one(const FiniteDistribution& p,
                               const FiniteDistribution& nu,
                               const Correspondence& g,
                               const TransportOptions& options) {
  const std::vector<Mass> nu_mass = nu.aligned_to(g.latent_support());
  const std::vector<Mass> p_mass = p.aligned_to(g.outcome_support());
  const std::size_t nl = g.latent_size();
  const std::size_t no = g.outcome_size();

  // Node layout: 0 source, 1 sink, then latent atoms, then outcomes.
  const std::size_t source = 0;
  const std::size_t sink = 1;
  auto latent_node = [](std::size_t u) { return 2 + u; };
  auto outcome_node = [nl](std::size_t y) { return 2 + nl + y; };
  MaxFlow network(2 + nl + no);

  auto keep_latent = [&](std::size_t u) {
    return !options.prune_zero_mass || nu_mass[u] > 0;
  };
  auto keep_outcome = [&](std::size_t y) {
    return !options.prune_zero_mass || p_mass[y] > 0;
  };

  struct Link {
    std::size_t arc, u, y;
  };
  std::vector<Link> links;
  for (std::size_t u = 0; u < nl; ++u) {
    if (!keep_latent(u)) continue;
    network.add_arc(source, latent_node(u), nu_mass[u]);
    for (auto y : g.image(u).indices()) {
      if (!keep_outcome(y)) continue;
      links.push_back({network.add_arc(latent_node(u), outcome_node(y), kDenominator), u, y});
    }
  }
  for (std::size_t y = 0; y < no; ++y) {
    if (keep_outcome(y)) network.add_arc(outcome_node(y), sink, p_mass[y]);
  }

  const Mass flow = network.solve(source, sink);
  TransportResult result;
  result.primal = kDenominator - flow;
  for (const auto& l : links) {
    if (Mass f = network.flow(l.arc); f > 0) result.plan.push_back({l.u, l.y, f});
  }
  std::sort(result.plan.begin(), result.plan.end(),
            [](const PlanEntry& a, const PlanEntry& b) {
              return a.latent != b.latent ? a.latent < b.latent : a.outcome < b.outcome;
            });

  const std::vector<bool> to_sink = network.reaches_sink(sink);
  result.witness = OutcomeSet(no);
  for (std::size_t y = 0; y < no; ++y) {
    if (keep_outcome(y) && to_sink[outcome_node(y)]) result.witness.insert(y);
  }
  for (auto y : result.witness.indices()) result.witness_probability += p_mass[y];
  result.witness_capacity = capacity(g, nu_mass, result.witness);
  result.dual = result.witness_probability - result.witness_capacity;
  if (result.dual != result.primal) {
    throw std::logic_error("min-cut witness does not certify the max flow");
  }
  return result;
}

std::vector<std::vector<double>> zero_one_cost(const Correspondence& g,
                                               const FiniteDistribution& p,
                                               const FiniteDistribution& nu) {
  std::vector<std::vector<double>> cost(p.size(), std::vector<double>(nu.size(), 1.0));
  for (std::size_t j = 0; j < nu.size(); ++j) {
    auto u = g.latent_index(nu.support()[j]);
    if (!u) {
      throw Error(ErrorCode::kSupportMismatch,
                  "latent '" + nu.support()[j].text + "' not in correspondence");
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      auto y = g.outcome_index(p.support()[i]);
      if (!y) {
        throw Error(ErrorCode::kSupportMismatch,
                    "outcome '" + p.support()[i].text + "' not in correspondence");
      }
      if (g.image(*u).contains(*y)) cost[i][j] = 0.0;
    }
  }
  return cost;
}

GeneralCostResult solve_general_cost(
    const FiniteDistribution& p, const FiniteDistribution& nu,
    const std::vector<std::vector<double>>& cost) {
  const std::size_t ny = p.size();
  const std::size_t nu_n = nu.size();
  if (cost.size() != ny) {
    throw Error(ErrorCode::kSupportMismatch, "cost rows must match P's support");
  }
  for (const auto& row : cost) {
    if (row.size() != nu_n) {
      throw Error(ErrorCode::kSupportMismatch, "cost columns must match nu's support");
    }
    for (double c : row) {
      if (!std::isfinite(c) || c < 0.0) {
        throw Error(ErrorCode::kBadParameters, "costs must be finite and nonnegative");
      }
    }
  }
  // Variable (y, u) lives at y * |U| + u.
  lp::LinearProgram prog(ny * nu_n);
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t u = 0; u < nu_n; ++u) prog.set_objective(y * nu_n + u, cost[y][u]);
  }
  std::vector<std::pair<std::size_t, double>> entries;
  for (std::size_t y = 0; y < ny; ++y) {
    entries.clear();
    for (std::size_t u = 0; u < nu_n; ++u) entries.emplace_back(y * nu_n + u, 1.0);
    prog.add_sparse_row(entries, lp::RowSense::kEqual, p.probability(y));
  }
  for (std::size_t u = 0; u < nu_n; ++u) {
    entries.clear();
    for (std::size_t y = 0; y < ny; ++y) entries.emplace_back(y * nu_n + u, 1.0);
    prog.add_sparse_row(entries, lp::RowSense::kEqual, nu.probability(u));
  }
  const lp::Solution sol = lp::solve(prog);
  if (sol.status != lp::Status::kOptimal) {
    throw Error(ErrorCode::kLpFailure, "transport LP returned " + lp::to_string(sol.status));
  }

  // Basic solutions of a transportation problem with integral marginals are
  // integral, so rounding recovers the exact fixed-point plan.
  GeneralCostResult result;
  std::vector<Mass> row_sum(ny, 0), col_sum(nu_n, 0);
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t u = 0; u < nu_n; ++u) {
      const Mass m = std::llround(sol.x[y * nu_n + u] * static_cast<double>(kDenominator));
      if (m <= 0) continue;
      result.plan.push_back({u, y, m});
      row_sum[y] += m;
      col_sum[u] += m;
      result.value += cost[y][u] * to_probability(m);
    }
  }
  for (std::size_t y = 0; y < ny; ++y) {
    if (row_sum[y] != p.mass(y)) {
      throw Error(ErrorCode::kLpFailure, "rounded plan misses an outcome marginal");
    }
  }
  for (std::size_t u = 0; u < nu_n; ++u) {
    if (col_sum[u] != nu.mass(u)) {
      throw Error(ErrorCode::kLpFailure, "rounded plan misses a latent marginal");
    }
  }
  std::sort(result.plan.begin(), result.plan.end(),
            [](const PlanEntry& a, const PlanEntry& b) {
              return a.latent != b.latent ? a.latent < b.latent : a.outcome < b.outcome;
            });
  return result;
}

Verdict compatibility_verdict(const FiniteDistribution& p,
                              const FiniteDistribution& nu,
                              const Correspondence& g) {
  Verdict v;
  v.result = solve_zero_one(p, nu, g);
  v.compatible = v.result.compatible();
  if (!v.compatible) v.witness = g.labels_of(v.result.witness);
  return v;
}

}  // namespace falsiflow
