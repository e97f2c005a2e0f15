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

#include "falsiflow/models.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "falsiflow/error.hpp"
#include "falsiflow/random.hpp"

namespace falsiflow {

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::logic_error("to_chars failed");
  return std::string(buf.data(), end);
}

Label tuple_label(std::span<const double> components) {
  std::string s = "(";
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i > 0) s += ',';
    s += format_number(components[i]);
  }
  s += ')';
  return Label(std::move(s));
}

Label tuple_label(std::initializer_list<double> components) {
  return tuple_label(std::span<const double>(components.begin(), components.size()));
}

std::vector<Label> LatentGrid::labels() const {
  std::vector<Label> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back(n.label);
  return out;
}

namespace {

FiniteDistribution equal_weights(const std::vector<Label>& labels) {
  const Mass n = static_cast<Mass>(labels.size());
  std::vector<Mass> masses(labels.size(), kDenominator / n);
  masses[0] += kDenominator - (kDenominator / n) * n;
  return FiniteDistribution::from_numerators(labels, std::move(masses));
}

}  // namespace

LatentGrid uniform_grid(double lo, double hi, std::size_t count) {
  if (count == 0 || !(lo <= hi) || (count > 1 && lo == hi)) {
    throw Error(ErrorCode::kBadParameters, "grid needs count >= 1 and lo < hi");
  }
  LatentGrid grid;
  grid.step = count > 1 ? (hi - lo) / static_cast<double>(count - 1) : 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    double x = count > 1 ? lo + grid.step * static_cast<double>(i) : lo;
    if (i + 1 == count) x = hi;
    if (std::abs(x) < 1e-12 * std::max(1.0, std::abs(hi - lo))) x = 0.0;
    grid.nodes.push_back({Label(format_number(x)), {x}});
  }
  grid.weights = equal_weights(grid.labels());
  return grid;
}

LatentGrid product_grid(const LatentGrid& a, const LatentGrid& b) {
  if (!a.weights || !b.weights) {
    throw Error(ErrorCode::kBadParameters, "product_grid needs weighted factors");
  }
  LatentGrid grid;
  grid.truncated = a.truncated || b.truncated;
  grid.step = std::max(a.step, b.step);
  std::vector<std::pair<Label, double>> weights;
  for (const auto& na : a.nodes) {
    for (const auto& nb : b.nodes) {
      std::vector<double> c = na.coordinates;
      c.insert(c.end(), nb.coordinates.begin(), nb.coordinates.end());
      Label label = tuple_label(c);
      weights.emplace_back(label, a.weights->probability_of(na.label) *
                                      b.weights->probability_of(nb.label));
      grid.nodes.push_back({std::move(label), std::move(c)});
    }
  }
  grid.weights = make_distribution(weights);
  return grid;
}

LatentGrid cell_centred_grid(double lo, double hi, std::size_t cells) {
  if (cells == 0 || !(lo < hi)) {
    throw Error(ErrorCode::kBadParameters, "grid needs cells >= 1 and lo < hi");
  }
  LatentGrid grid;
  grid.step = (hi - lo) / static_cast<double>(cells);
  std::vector<double> mid(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    mid[i] = lo + grid.step * (static_cast<double>(i) + 0.5);
  }
  for (double e1 : mid) {
    for (double e2 : mid) {
      grid.nodes.push_back({tuple_label({e1, e2}), {e1, e2}});
    }
  }
  grid.weights = equal_weights(grid.labels());
  return grid;
}

ParametricInstance line_network_game(std::span<const double> region_masses) {
  if (region_masses.size() != 4) {
    throw Error(ErrorCode::kDimensionMismatch, "line_network_game takes 4 region masses");
  }
  const std::vector<Label> latent = {"q000", "q000_011", "q000_110", "q000_111"};
  const std::vector<Label> outcomes = {"(0,0,0)", "(0,1,1)", "(1,1,0)", "(1,1,1)"};
  ParametricInstance out;
  out.g = Correspondence(latent, outcomes, {{0}, {0, 1}, {0, 2}, {0, 3}});
  out.nu = make_distribution(latent, region_masses);
  return out;
}

std::vector<Label> entry_game_outcomes() { return {"(0,0)", "(0,1)", "(1,0)", "(1,1)"}; }

ParametricInstance entry_game(double delta1, double delta2, const LatentGrid& grid) {
  if (!(delta1 < 0.0) || !(delta2 < 0.0)) {
    throw Error(ErrorCode::kBadParameters, "entry game needs delta1 < 0 and delta2 < 0");
  }
  if (!grid.weights) {
    throw Error(ErrorCode::kBadParameters, "entry game needs grid weights");
  }
  if (grid.nodes.empty()) throw Error(ErrorCode::kEmptyData, "empty latent grid");

  // Region r in 0..3 is the single equilibrium r; region 4 is multiplicity.
  static const std::array<const char*, 5> kRegionNames = {
      "only(0,0)", "only(0,1)", "only(1,0)", "only(1,1)", "multiple"};
  std::vector<std::size_t> node_region(grid.nodes.size());
  for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
    const auto& c = grid.nodes[k].coordinates;
    if (c.size() != 2) {
      throw Error(ErrorCode::kDimensionMismatch, "entry game nodes are (eps1, eps2)");
    }
    const double e1 = c[0], e2 = c[1];
    if (e1 >= 0.0 && e1 <= -delta2 && e2 >= 0.0 && e2 <= -delta1) {
      node_region[k] = 4;
      continue;
    }
    std::vector<std::size_t> equilibria;
    for (int y1 = 0; y1 <= 1; ++y1) {
      for (int y2 = 0; y2 <= 1; ++y2) {
        const bool br1 = (delta2 * y2 + e1 >= 0.0) == (y1 == 1);
        const bool br2 = (delta1 * y1 + e2 >= 0.0) == (y2 == 1);
        if (br1 && br2) equilibria.push_back(static_cast<std::size_t>(2 * y1 + y2));
      }
    }
    if (equilibria.size() != 1) {
      throw std::logic_error("entry game: unexpected equilibrium set outside the rectangle");
    }
    node_region[k] = equilibria[0];
  }

  std::array<Mass, 5> mass{};
  std::array<bool, 5> present{};
  for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
    mass[node_region[k]] += grid.weights->mass_of(grid.nodes[k].label);
    present[node_region[k]] = true;
  }
  std::vector<Label> latent;
  std::vector<Mass> masses;
  std::vector<std::vector<std::size_t>> images;
  std::array<std::size_t, 5> compact{};
  for (std::size_t r = 0; r < 5; ++r) {
    if (!present[r]) continue;
    compact[r] = latent.size();
    latent.emplace_back(kRegionNames[r]);
    masses.push_back(mass[r]);
    images.push_back(r == 4 ? std::vector<std::size_t>{1, 2} : std::vector<std::size_t>{r});
  }
  ParametricInstance out;
  out.g = Correspondence(latent, entry_game_outcomes(), images);
  out.nu = FiniteDistribution::from_numerators(latent, std::move(masses));
  for (auto& r : node_region) r = compact[r];
  out.node_region = std::move(node_region);
  return out;
}

SearchGame search_game(const LatentGrid& grid, std::span<const double> alpha) {
  if (!grid.weights) throw Error(ErrorCode::kBadParameters, "search game needs grid weights");
  if (grid.nodes.empty()) throw Error(ErrorCode::kEmptyData, "empty latent grid");
  if (alpha.size() != grid.nodes.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "alpha must have one value per node");
  }
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (!(alpha[k] >= 0.0 && alpha[k] <= 1.0)) {
      throw Error(ErrorCode::kBadParameters, "alpha values must lie in [0,1]");
    }
    if (grid.nodes[k].coordinates.size() != 1) {
      throw Error(ErrorCode::kDimensionMismatch, "search game nodes are scalar");
    }
    if (k > 0 && !(grid.nodes[k].coordinates[0] > grid.nodes[k - 1].coordinates[0])) {
      throw Error(ErrorCode::kNotMonotone, "grid nodes must be increasing");
    }
    if (k > 0 && !(alpha[k] > alpha[k - 1])) {
      throw Error(ErrorCode::kNotMonotone, "alpha must be strictly increasing");
    }
  }
  SearchGame game;
  game.alpha.assign(alpha.begin(), alpha.end());
  std::vector<Label> outcomes = {"0"};
  game.outcome_values = {0.0};
  std::vector<std::vector<std::size_t>> images;
  for (double a : alpha) {
    if (a == 0.0) {
      images.push_back({0});
      continue;
    }
    images.push_back({0, outcomes.size()});
    outcomes.emplace_back(format_number(a));
    game.outcome_values.push_back(a);
  }
  game.instance.g = Correspondence(grid.labels(), std::move(outcomes), images);
  game.instance.nu = FiniteDistribution::from_numerators(
      grid.labels(), grid.weights->aligned_to(grid.labels()));
  return game;
}

IntervalCheck search_interval_check(const SearchGame& game, const FiniteDistribution& p) {
  const auto& g = game.instance.g;
  const auto pm = p.aligned_to(g.outcome_support());
  const auto nu = game.instance.nu.aligned_to(g.latent_support());
  const std::size_t k = g.outcome_size();
  IntervalCheck best;
  bool first = true;
  // Outcome values are increasing in support order.
  for (std::size_t j = 0; j < k; ++j) {
    for (int side = 0; side < 2; ++side) {
      OutcomeSet a(k);
      Mass pa = 0;
      for (std::size_t i = 0; i < k; ++i) {
        if (side == 0 ? i <= j : i >= j) {
          a.insert(i);
          pa += pm[i];
        }
      }
      const Mass d = pa - capacity(g, nu, a);
      if (first || d > best.deficiency) {
        best = {d, a, side == 0, game.outcome_values[j]};
        first = false;
      }
    }
  }
  return best;
}

std::vector<Label> pilot_outcomes() { return {"(0,-1)", "(0,1)", "(1,-1)", "(1,1)"}; }

SemiparametricModel binary_response_pilot(double eta, std::span<const double> epsilon) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw Error(ErrorCode::kBadParameters, "eta must lie in (0,1)");
  }
  bool below = false, low = false, high = false, above = false;
  for (double e : epsilon) {
    below |= e <= -1.0;
    low |= e > -1.0 && e <= 0.0;
    high |= e > 0.0 && e <= 1.0;
    above |= e > 1.0;
  }
  if (!(below && low && high && above)) {
    throw Error(ErrorCode::kGridTooCoarse,
                "epsilon grid needs nodes in (-inf,-1], (-1,0], (0,1] and (1,inf)");
  }
  std::vector<Label> latent;
  std::vector<std::vector<std::size_t>> images;
  std::vector<std::vector<double>> moments(2);
  for (double x : {-1.0, 1.0}) {
    for (double e : epsilon) {
      latent.push_back(tuple_label({x, e}));
      const int z = (x + e <= 0.0) ? 1 : 0;
      // outcome index: 2 z + (x == 1)
      images.push_back({static_cast<std::size_t>(2 * z + (x > 0 ? 1 : 0))});
      const double r = (e <= 0.0 ? 1.0 : 0.0) - eta;
      moments[0].push_back(r * (1.0 + x));
      moments[1].push_back(r * (1.0 - x));
    }
  }
  return SemiparametricModel(Correspondence(latent, pilot_outcomes(), images),
                             std::move(moments), {"pilot", false});
}

SemiparametricModel binary_response_pilot(double eta) {
  const LatentGrid grid = uniform_grid(-2.0, 2.0, 41);
  std::vector<double> eps;
  for (const auto& n : grid.nodes) eps.push_back(n.coordinates[0]);
  return binary_response_pilot(eta, eps);
}

FiniteDistribution pilot_distribution(double prob_x1, double p_z1_given_x1,
                                      double p_z1_given_xm1) {
  for (double v : {prob_x1, p_z1_given_x1, p_z1_given_xm1}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kBadParameters, "pilot probabilities must lie in [0,1]");
    }
  }
  const double q = 1.0 - prob_x1;
  const std::vector<double> probs = {q * (1.0 - p_z1_given_xm1), prob_x1 * (1.0 - p_z1_given_x1),
                                     q * p_z1_given_xm1, prob_x1 * p_z1_given_x1};
  return make_distribution(pilot_outcomes(), probs);
}

SemiparametricModel moment_inequality_model(std::span<const Label> outcomes,
                                            const std::vector<std::vector<double>>& phi,
                                            const LatentGrid& grid) {
  if (outcomes.empty()) throw Error(ErrorCode::kEmptyData, "no outcomes");
  if (phi.size() != outcomes.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "phi needs one row per outcome");
  }
  const std::size_t d = phi[0].size();
  if (d == 0) throw Error(ErrorCode::kDimensionMismatch, "phi needs at least one column");
  for (const auto& row : phi) {
    if (row.size() != d) throw Error(ErrorCode::kDimensionMismatch, "ragged phi matrix");
  }
  if (grid.nodes.empty()) throw Error(ErrorCode::kEmptyData, "empty latent grid");
  for (std::size_t i = 0; i < d; ++i) {
    double lo = phi[0][i], hi = phi[0][i];
    for (const auto& row : phi) {
      lo = std::min(lo, row[i]);
      hi = std::max(hi, row[i]);
    }
    double glo = INFINITY, ghi = -INFINITY;
    for (const auto& n : grid.nodes) {
      if (n.coordinates.size() != d) {
        throw Error(ErrorCode::kDimensionMismatch, "latent nodes need one coordinate per phi column");
      }
      glo = std::min(glo, n.coordinates[i]);
      ghi = std::max(ghi, n.coordinates[i]);
    }
    if (glo > lo || ghi < hi) {
      throw Error(ErrorCode::kGridTooCoarse,
                  "latent grid does not span the range of phi in coordinate " + std::to_string(i));
    }
  }
  std::vector<Label> out_labels(outcomes.begin(), outcomes.end());
  std::vector<std::vector<std::size_t>> images;
  bool dummy = false;
  for (const auto& n : grid.nodes) {
    std::vector<std::size_t> img;
    for (std::size_t y = 0; y < outcomes.size(); ++y) {
      bool ok = true;
      for (std::size_t i = 0; i < d && ok; ++i) ok = n.coordinates[i] >= phi[y][i];
      if (ok) img.push_back(y);
    }
    if (img.empty()) {
      img.push_back(outcomes.size());
      dummy = true;
    }
    images.push_back(std::move(img));
  }
  if (dummy) out_labels.push_back(kDummyOutcome);
  std::vector<std::vector<double>> moments(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (const auto& n : grid.nodes) moments[i].push_back(n.coordinates[i]);
  }
  return SemiparametricModel(Correspondence(grid.labels(), std::move(out_labels), images),
                             std::move(moments), {"moment_inequality", grid.truncated});
}

Example4 example4_instance(std::int64_t m) {
  const std::vector<Label> ys = {"y1", "y2"};
  const std::vector<double> half = {0.5, 0.5};
  return example4_instance(m, make_distribution(ys, half));
}

Example4 example4_instance(std::int64_t m, const FiniteDistribution& p) {
  if (m < 2) throw Error(ErrorCode::kBadParameters, "the non-attainment instance needs M >= 2");
  std::vector<Label> outcomes = p.support();
  for (const auto& y : outcomes) {
    if (y == kDummyOutcome) {
      throw Error(ErrorCode::kBadParameters, "P may not charge the dummy outcome");
    }
  }
  std::vector<std::size_t> all(outcomes.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const std::size_t dummy = outcomes.size();
  outcomes.push_back(kDummyOutcome);
  const std::vector<Label> latent = {"1", Label(std::to_string(1 - m))};
  Correspondence g(latent, std::move(outcomes), {all, {dummy}});
  std::vector<std::vector<double>> moments = {{1.0, static_cast<double>(1 - m)}};
  return {SemiparametricModel(std::move(g), std::move(moments), {"example4", true}), p};
}

SelectionRule parse_rule(const std::string& name, std::uint64_t seed) {
  if (name == "first") return SelectionRule::first();
  if (name == "uniform-random") return SelectionRule::uniform_random(seed);
  throw Error(ErrorCode::kBadRule,
              "unknown selection rule '" + name + "' (expected first or uniform-random)");
}

std::string to_string(SelectionRule::Kind kind) {
  switch (kind) {
    case SelectionRule::Kind::kFirst: return "first";
    case SelectionRule::Kind::kUniformRandom: return "uniform-random";
    case SelectionRule::Kind::kCustom: return "custom";
  }
  return "?";
}

Selection selection_for(const Correspondence& g, const SelectionRule& rule) {
  Selection s(g.latent_size());
  for (std::size_t u = 0; u < g.latent_size(); ++u) {
    switch (rule.kind) {
      case SelectionRule::Kind::kFirst:
        s[u] = g.image(u).indices().front();
        break;
      case SelectionRule::Kind::kCustom: {
        auto it = rule.custom.find(g.latent_support()[u]);
        if (it == rule.custom.end()) {
          throw Error(ErrorCode::kBadRule,
                      "custom rule has no choice for latent '" + g.latent_support()[u].text + "'");
        }
        auto y = g.outcome_index(it->second);
        if (!y || !g.image(u).contains(*y)) {
          throw Error(ErrorCode::kBadRule, "custom rule picks '" + it->second.text +
                                               "' outside G('" + g.latent_support()[u].text + "')");
        }
        s[u] = *y;
        break;
      }
      case SelectionRule::Kind::kUniformRandom:
        throw Error(ErrorCode::kBadRule, "uniform-random is not a deterministic selection");
    }
  }
  return s;
}

std::vector<double> rule_pushforward(const Correspondence& g, const FiniteDistribution& nu,
                                     const SelectionRule& rule) {
  const auto nm = nu.aligned_to(g.latent_support());
  std::vector<double> out(g.outcome_size(), 0.0);
  if (rule.kind == SelectionRule::Kind::kUniformRandom) {
    for (std::size_t u = 0; u < g.latent_size(); ++u) {
      const auto idx = g.image(u).indices();
      for (std::size_t y : idx) out[y] += to_probability(nm[u]) / static_cast<double>(idx.size());
    }
    return out;
  }
  const Selection s = selection_for(g, rule);
  for (std::size_t u = 0; u < g.latent_size(); ++u) out[s[u]] += to_probability(nm[u]);
  return out;
}

std::vector<Outcome> simulate(const Correspondence& g, const FiniteDistribution& nu,
                              const SelectionRule& rule, std::size_t n, std::uint64_t seed) {
  const auto nm = nu.aligned_to(g.latent_support());
  Selection fixed;
  if (rule.kind != SelectionRule::Kind::kUniformRandom) fixed = selection_for(g, rule);
  std::vector<std::vector<std::size_t>> images(g.latent_size());
  for (std::size_t u = 0; u < g.latent_size(); ++u) images[u] = g.image(u).indices();
  std::vector<Mass> cdf(nm.size());
  Mass acc = 0;
  for (std::size_t u = 0; u < nm.size(); ++u) cdf[u] = (acc += nm[u]);

  Engine latent_stream(derive_seed(seed, 0));
  Engine choice_stream(derive_seed(seed ^ splitmix64(rule.seed), 1));
  std::vector<Outcome> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Mass r = static_cast<Mass>(uniform_below(latent_stream, kDenominator));
    const std::size_t u = static_cast<std::size_t>(
        std::upper_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
    std::size_t y;
    if (rule.kind == SelectionRule::Kind::kUniformRandom) {
      const auto& img = images[u];
      // Single-valued images consume no randomness, so first and
      // uniform-random agree draw for draw there.
      y = img.size() == 1 ? img[0] : img[uniform_below(choice_stream, img.size())];
    } else {
      y = fixed[u];
    }
    out.push_back(g.outcome_support()[y]);
  }
  return out;
}

}  // namespace falsiflow
