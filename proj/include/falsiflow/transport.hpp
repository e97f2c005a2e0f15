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

#ifndef FALSIFLOW_TRANSPORT_HPP
#define FALSIFLOW_TRANSPORT_HPP

#include <cstddef>
#include <vector>

#include "falsiflow/correspondence.hpp"
#include "falsiflow/measure.hpp"

namespace falsiflow {

struct PlanEntry {
  std::size_t latent;
  std::size_t outcome;
  Mass mass;

  friend bool operator==(const PlanEntry&, const PlanEntry&) = default;
};

// Zero-one cost transport of nu onto P along G.
struct TransportResult {
  Mass primal = 0;  // minimal mass forced off the graph of G
  Mass dual = 0;    // P(witness) - nu G^{-1}(witness)
  std::vector<PlanEntry> plan;  // compatible arcs with positive flow
  OutcomeSet witness;
  Mass witness_probability = 0;
  Mass witness_capacity = 0;

  bool compatible() const { return primal == 0; }
  double primal_value() const { return to_probability(primal); }
  double dual_value() const { return to_probability(dual); }
};

struct TransportOptions {
  // Drop zero-mass atoms from the flow network.
  bool prune_zero_mass = true;
};

// Max flow on source -> u (nu(u)) -> y (unbounded, y in G(u)) -> sink (P(y)).
// The witness is the set of outcomes that can still reach the sink in the
// final residual graph: the smallest maximizer of P(A) - nu G^{-1}(A).
TransportResult solve_zero_one(const FiniteDistribution& p,
                               const FiniteDistribution& nu,
                               const Correspondence& g,
                               const TransportOptions& options = {});

struct GeneralCostResult {
  double value = 0.0;
  // Indices refer to nu.support() and p.support(); masses are exact.
  std::vector<PlanEntry> plan;
};

// min sum cost[y][u] pi(y, u) over couplings of P and nu, solved as an LP.
// cost is indexed by p.support() rows and nu.support() columns.
GeneralCostResult solve_general_cost(
    const FiniteDistribution& p, const FiniteDistribution& nu,
    const std::vector<std::vector<double>>& cost);

// Zero-one cost matrix 1{y not in G(u)} in the layout solve_general_cost takes.
std::vector<std::vector<double>> zero_one_cost(const Correspondence& g,
                                               const FiniteDistribution& p,
                                               const FiniteDistribution& nu);

struct Verdict {
  bool compatible = false;
  TransportResult result;
  std::vector<Label> witness;  // empty when compatible
};

Verdict compatibility_verdict(const FiniteDistribution& p,
                              const FiniteDistribution& nu,
                              const Correspondence& g);

}  // namespace falsiflow

#endif  // FALSIFLOW_TRANSPORT_HPP
