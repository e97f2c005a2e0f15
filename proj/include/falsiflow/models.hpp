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

// Concrete instances of the example families and a data simulator.

#ifndef FALSIFLOW_MODELS_HPP
#define FALSIFLOW_MODELS_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "falsiflow/correspondence.hpp"
#include "falsiflow/measure.hpp"
#include "falsiflow/semiparametric.hpp"

namespace falsiflow {

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);
// "(1,0)" style label for multi-component outcomes.
Label tuple_label(std::span<const double> components);
Label tuple_label(std::initializer_list<double> components);

struct GridNode {
  Label label;
  std::vector<double> coordinates;
};

struct LatentGrid {
  std::vector<GridNode> nodes;
  std::optional<FiniteDistribution> weights;  // over node labels
  bool truncated = false;  // a bounded box stands in for an unbounded space
  double step = 0.0;

  std::vector<Label> labels() const;
};

// `count` equally spaced nodes on [lo, hi], endpoints included, with equal
// weights. An odd count on a symmetric interval places a node at zero.
LatentGrid uniform_grid(double lo, double hi, std::size_t count);
// Product of two node grids with product weights.
LatentGrid product_grid(const LatentGrid& a, const LatentGrid& b);
// Midpoints of a cells x cells partition of [lo, hi]^2 with equal weights, so
// region masses are exact area ratios whenever boundaries fall on cell edges.
LatentGrid cell_centred_grid(double lo, double hi, std::size_t cells);

struct ParametricInstance {
  Correspondence g;
  FiniteDistribution nu;
  // For grid-built families: region index of every grid node.
  std::vector<std::size_t> node_region;
};

// Social network game on a line of three agents. The four masses are those of
// the regions whose equilibrium sets are {000}, {000,011}, {000,110} and
// {000,111}.
ParametricInstance line_network_game(std::span<const double> region_masses);

// Two-firm entry game with Y_i = 1 iff delta_{-i} Y_{-i} + eps_i >= 0.
// Nodes carry (eps_1, eps_2); the latent support is one atom per region of
// equal equilibrium sets, with the grid weights aggregated per region. The
// closed rectangle [0,-delta_2] x [0,-delta_1] maps to {(1,0),(0,1)}.
ParametricInstance entry_game(double delta1, double delta2, const LatentGrid& grid);

// Outcome labels of the entry game in support order.
std::vector<Label> entry_game_outcomes();

// Search-externality game: G(eps) = {0, alpha(eps)}. Nodes carry eps in
// increasing order; alpha is tabulated on the nodes, strictly increasing with
// values in [0,1].
struct SearchGame {
  ParametricInstance instance;
  std::vector<double> alpha;
  std::vector<double> outcome_values;  // numeric value of every outcome
};
SearchGame search_game(const LatentGrid& grid, std::span<const double> alpha);

struct IntervalCheck {
  Mass deficiency = 0;  // max over interval classes, may be negative
  OutcomeSet maximizer;
  bool lower = true;    // [0, y] if true, [y, 1] otherwise
  double endpoint = 0.0;
};
// max over A in {[0,y], [y,1] : y an outcome value} of P(A) - nu G^{-1}(A).
IntervalCheck search_interval_check(const SearchGame& game,
                                    const FiniteDistribution& p);

// Binary response Z = 1{X + eps <= 0} with X in {-1, 1} and the conditional
// median restriction Pr(eps <= 0 | X) = eta on the supplied eps nodes.
SemiparametricModel binary_response_pilot(double eta,
                                          std::span<const double> epsilon);
SemiparametricModel binary_response_pilot(double eta);  // 41 nodes on [-2,2]
std::vector<Label> pilot_outcomes();
// P over the pilot outcomes from Pr(X=1) and Pr(Z=1 | X=x).
FiniteDistribution pilot_distribution(double prob_x1, double p_z1_given_x1,
                                      double p_z1_given_xm1);

inline const Label kDummyOutcome{"(none)"};

// G(u) = {y : u_i >= phi_i(y) for all i} with moments m_i(u) = u_i. Latent
// nodes dominating no outcome map to the zero-mass dummy outcome.
SemiparametricModel moment_inequality_model(
    std::span<const Label> outcomes,
    const std::vector<std::vector<double>>& phi, const LatentGrid& grid);

struct Example4 {
  SemiparametricModel model;
  FiniteDistribution p;
};
// Latent {1, 1-M}, moment m(u) = u, G(1) = all real outcomes, G(1-M) = the
// dummy outcome. Default P puts 1/2 on each of "y1" and "y2".
Example4 example4_instance(std::int64_t m);
Example4 example4_instance(std::int64_t m, const FiniteDistribution& p);

struct SelectionRule {
  enum class Kind { kFirst, kUniformRandom, kCustom };
  Kind kind = Kind::kFirst;
  std::uint64_t seed = 0;
  std::map<Label, Label> custom;  // latent label -> chosen outcome

  static SelectionRule first() { return {}; }
  static SelectionRule uniform_random(std::uint64_t seed) {
    return {Kind::kUniformRandom, seed, {}};
  }
  static SelectionRule from_map(std::map<Label, Label> choice) {
    return {Kind::kCustom, 0, std::move(choice)};
  }
};

// "first" or "uniform-random"; BadRule otherwise.
SelectionRule parse_rule(const std::string& name, std::uint64_t seed = 0);
std::string to_string(SelectionRule::Kind kind);

// Deterministic selection realized by a first or custom rule.
Selection selection_for(const Correspondence& g, const SelectionRule& rule);

// Exact outcome distribution generated by the rule (random rules split each
// latent atom equally over its image, in floating point).
std::vector<double> rule_pushforward(const Correspondence& g,
                                     const FiniteDistribution& nu,
                                     const SelectionRule& rule);

// n i.i.d. outcomes: u ~ nu by inverse CDF on the fixed-point masses, then
// y = rule(u). Latent and selection draws use separate seeded streams.
std::vector<Outcome> simulate(const Correspondence& g,
                              const FiniteDistribution& nu,
                              const SelectionRule& rule, std::size_t n,
                              std::uint64_t seed);

}  // namespace falsiflow

#endif  // FALSIFLOW_MODELS_HPP
