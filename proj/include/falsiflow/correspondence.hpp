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

#ifndef FALSIFLOW_CORRESPONDENCE_HPP
#define FALSIFLOW_CORRESPONDENCE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "falsiflow/measure.hpp"

namespace falsiflow {

// Subset of an outcome support, as a bitset over outcome indices.
class OutcomeSet {
 public:
  OutcomeSet() = default;
  explicit OutcomeSet(std::size_t universe);
  static OutcomeSet from_indices(std::size_t universe,
                                 std::span<const std::size_t> indices);
  static OutcomeSet from_mask(std::size_t universe, std::uint64_t mask);
  static OutcomeSet full(std::size_t universe);

  std::size_t universe() const { return universe_; }
  bool contains(std::size_t i) const;
  void insert(std::size_t i);
  void erase(std::size_t i);
  bool intersects(const OutcomeSet& other) const;
  bool is_subset_of(const OutcomeSet& other) const;
  bool empty() const;
  std::size_t count() const;
  std::vector<std::size_t> indices() const;
  // Only valid for universes of at most 64 outcomes.
  std::uint64_t mask() const;

  friend bool operator==(const OutcomeSet&, const OutcomeSet&) = default;

 private:
  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

// The model correspondence G from latent atoms to nonempty outcome sets.
class Correspondence {
 public:
  Correspondence() = default;
  // images[u] lists outcome indices; every image must be nonempty.
  Correspondence(std::vector<Label> latent, std::vector<Label> outcomes,
                 const std::vector<std::vector<std::size_t>>& images);

  static Correspondence from_labels(
      std::vector<Label> latent, std::vector<Label> outcomes,
      const std::vector<std::vector<Label>>& images);

  std::size_t latent_size() const { return latent_.size(); }
  std::size_t outcome_size() const { return outcomes_.size(); }
  const std::vector<Label>& latent_support() const { return latent_; }
  const std::vector<Label>& outcome_support() const { return outcomes_; }
  const OutcomeSet& image(std::size_t u) const { return images_[u]; }

  std::optional<std::size_t> latent_index(const Label& label) const;
  std::optional<std::size_t> outcome_index(const Label& label) const;

  // Outcomes without any preimage, appended after the existing ones.
  Correspondence with_extra_outcomes(std::span<const Label> extra) const;

  // Throws UnknownOutcome for labels outside the outcome support.
  OutcomeSet outcome_set(std::span<const Label> labels) const;
  std::vector<Label> labels_of(const OutcomeSet& set) const;

 private:
  std::vector<Label> latent_;
  std::vector<Label> outcomes_;
  std::vector<OutcomeSet> images_;
};

// G^{-1}(A) = {u : G(u) intersects A}, as latent indices in support order.
std::vector<std::size_t> preimage(const Correspondence& g, const OutcomeSet& a);

// nu(G^{-1}(A)) in fixed point. nu must live on g's latent support.
Mass capacity(const Correspondence& g, const FiniteDistribution& nu,
              const OutcomeSet& a);
// Same, with nu already aligned to the latent support.
Mass capacity(const Correspondence& g, std::span<const Mass> nu,
              const OutcomeSet& a);

struct Deficiency {
  Mass value = 0;    // max(raw, 0)
  Mass raw = 0;      // max over subsets of P(A) - nu G^{-1}(A)
  OutcomeSet witness;
};

inline constexpr std::size_t kMaxBruteForceOutcomes = 20;

// Exhaustive maximization over all subsets of the outcome support. The witness
// is the smallest maximizer, ties broken by the lexicographically smallest
// sorted index list.
Deficiency core_deficiency_bruteforce(const Correspondence& g,
                                      const FiniteDistribution& nu,
                                      const FiniteDistribution& p);

// One chosen outcome index per latent atom.
using Selection = std::vector<std::size_t>;

inline constexpr std::uint64_t kMaxSelections = 1'000'000;

// Product of image sizes, saturating at kMaxSelections + 1.
std::uint64_t count_selections(const Correspondence& g);

// Visits every selection in lexicographic order over the image choices
// (last latent atom varies fastest).
void for_each_selection(const Correspondence& g,
                        const std::function<void(const Selection&)>& visit);
std::vector<Selection> enumerate_selections(const Correspondence& g);

// Pushforward nu s^{-1} of a selection, indexed by outcome.
std::vector<Mass> pushforward(const Correspondence& g,
                              std::span<const Mass> nu, const Selection& s);

struct MinimaxReport {
  Mass lhs = 0;                // min over randomized selections of TV(P, nu s^-1)
  Mass lhs_deterministic = 0;  // min over deterministic selections
  Mass rhs = 0;                // core deficiency
  bool equal = false;          // lhs == rhs in fixed point
  std::size_t selections = 0;
};

MinimaxReport selection_minimax_check(const Correspondence& g,
                                      const FiniteDistribution& nu,
                                      const FiniteDistribution& p);

}  // namespace falsiflow

#endif  // FALSIFLOW_CORRESPONDENCE_HPP
