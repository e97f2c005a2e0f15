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

#include "falsiflow/correspondence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include "falsiflow/error.hpp"
#include "falsiflow/lp.hpp"

namespace falsiflow {

OutcomeSet::OutcomeSet(std::size_t universe)
    : universe_(universe), words_((universe + 63) / 64, 0) {}

OutcomeSet OutcomeSet::from_indices(std::size_t universe,
                                    std::span<const std::size_t> indices) {
  OutcomeSet s(universe);
  for (auto i : indices) s.insert(i);
  return s;
}

OutcomeSet OutcomeSet::from_mask(std::size_t universe, std::uint64_t mask) {
  if (universe > 64) {
    throw Error(ErrorCode::kIndexOutOfRange, "mask form needs universe <= 64");
  }
  OutcomeSet s(universe);
  if (universe > 0) {
    const std::uint64_t valid =
        universe == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << universe) - 1;
    if (mask & ~valid) {
      throw Error(ErrorCode::kIndexOutOfRange, "mask has bits beyond universe");
    }
    s.words_[0] = mask;
  } else if (mask != 0) {
    throw Error(ErrorCode::kIndexOutOfRange, "mask has bits beyond universe");
  }
  return s;
}

OutcomeSet OutcomeSet::full(std::size_t universe) {
  OutcomeSet s(universe);
  for (std::size_t i = 0; i < universe; ++i) s.insert(i);
  return s;
}

bool OutcomeSet::contains(std::size_t i) const {
  return i < universe_ && ((words_[i / 64] >> (i % 64)) & 1U);
}

void OutcomeSet::insert(std::size_t i) {
  if (i >= universe_) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "outcome index " + std::to_string(i) + " >= " +
                    std::to_string(universe_));
  }
  words_[i / 64] |= std::uint64_t{1} << (i % 64);
}

void OutcomeSet::erase(std::size_t i) {
  if (i < universe_) words_[i / 64] &= ~(std::uint64_t{1} << (i % 64));
}

bool OutcomeSet::intersects(const OutcomeSet& other) const {
  const std::size_t n = std::min(words_.size(), other.words_.size());
  for (std::size_t w = 0; w < n; ++w) {
    if (words_[w] & other.words_[w]) return true;
  }
  return false;
}

bool OutcomeSet::is_subset_of(const OutcomeSet& other) const {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    const std::uint64_t o = w < other.words_.size() ? other.words_[w] : 0;
    if (words_[w] & ~o) return false;
  }
  return true;
}

bool OutcomeSet::empty() const {
  return std::all_of(words_.begin(), words_.end(),
                     [](std::uint64_t w) { return w == 0; });
}

std::size_t OutcomeSet::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<std::size_t> OutcomeSet::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < universe_; ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

std::uint64_t OutcomeSet::mask() const {
  if (universe_ > 64) {
    throw Error(ErrorCode::kIndexOutOfRange, "mask form needs universe <= 64");
  }
  return words_.empty() ? 0 : words_[0];
}

namespace {

void require_distinct(const std::vector<Label>& labels, const char* what) {
  std::unordered_map<std::string, int> seen;
  for (const auto& l : labels) {
    if (!seen.emplace(l.text, 0).second) {
      throw Error(ErrorCode::kDuplicateLabel,
                  std::string(what) + " label '" + l.text + "' appears twice");
    }
  }
}

}  // namespace

Correspondence::Correspondence(
    std::vector<Label> latent, std::vector<Label> outcomes,
    const std::vector<std::vector<std::size_t>>& images)
    : latent_(std::move(latent)), outcomes_(std::move(outcomes)) {
  require_distinct(latent_, "latent");
  require_distinct(outcomes_, "outcome");
  if (images.size() != latent_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "one image per latent atom is required");
  }
  images_.reserve(images.size());
  for (std::size_t u = 0; u < images.size(); ++u) {
    if (images[u].empty()) {
      throw Error(ErrorCode::kEmptyValue,
                  "G('" + latent_[u].text + "') is empty");
    }
    images_.push_back(OutcomeSet::from_indices(outcomes_.size(), images[u]));
  }
}

Correspondence Correspondence::from_labels(
    std::vector<Label> latent, std::vector<Label> outcomes,
    const std::vector<std::vector<Label>>& images) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < outcomes.size(); ++i) index.emplace(outcomes[i].text, i);
  std::vector<std::vector<std::size_t>> idx(images.size());
  for (std::size_t u = 0; u < images.size(); ++u) {
    for (const auto& y : images[u]) {
      auto it = index.find(y.text);
      if (it == index.end()) {
        throw Error(ErrorCode::kUnknownOutcome,
                    "image refers to unknown outcome '" + y.text + "'");
      }
      idx[u].push_back(it->second);
    }
  }
  return Correspondence(std::move(latent), std::move(outcomes), idx);
}

std::optional<std::size_t> Correspondence::latent_index(const Label& label) const {
  auto it = std::find(latent_.begin(), latent_.end(), label);
  if (it == latent_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - latent_.begin());
}

std::optional<std::size_t> Correspondence::outcome_index(const Label& label) const {
  auto it = std::find(outcomes_.begin(), outcomes_.end(), label);
  if (it == outcomes_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - outcomes_.begin());
}

Correspondence Correspondence::with_extra_outcomes(
    std::span<const Label> extra) const {
  std::vector<Label> outcomes = outcomes_;
  outcomes.insert(outcomes.end(), extra.begin(), extra.end());
  std::vector<std::vector<std::size_t>> images(latent_.size());
  for (std::size_t u = 0; u < latent_.size(); ++u) images[u] = images_[u].indices();
  return Correspondence(latent_, std::move(outcomes), images);
}

OutcomeSet Correspondence::outcome_set(std::span<const Label> labels) const {
  OutcomeSet s(outcomes_.size());
  for (const auto& l : labels) {
    auto i = outcome_index(l);
    if (!i) {
      throw Error(ErrorCode::kUnknownOutcome, "unknown outcome '" + l.text + "'");
    }
    s.insert(*i);
  }
  return s;
}

std::vector<Label> Correspondence::labels_of(const OutcomeSet& set) const {
  std::vector<Label> out;
  for (auto i : set.indices()) out.push_back(outcomes_.at(i));
  return out;
}

std::vector<std::size_t> preimage(const Correspondence& g, const OutcomeSet& a) {
  std::vector<std::size_t> out;
  for (std::size_t u = 0; u < g.latent_size(); ++u) {
    if (g.image(u).intersects(a)) out.push_back(u);
  }
  return out;
}

Mass capacity(const Correspondence& g, std::span<const Mass> nu,
              const OutcomeSet& a) {
  if (nu.size() != g.latent_size()) {
    throw Error(ErrorCode::kSupportMismatch,
                "latent distribution has the wrong length");
  }
  Mass total = 0;
  for (std::size_t u = 0; u < g.latent_size(); ++u) {
    if (g.image(u).intersects(a)) total += nu[u];
  }
  return total;
}

Mass capacity(const Correspondence& g, const FiniteDistribution& nu,
              const OutcomeSet& a) {
  return capacity(g, nu.aligned_to(g.latent_support()), a);
}

namespace {

// Smaller cardinality first, then lexicographically smaller index list.
bool better_witness(std::uint64_t a, std::uint64_t b) {
  const int ca = std::popcount(a);
  const int cb = std::popcount(b);
  if (ca != cb) return ca < cb;
  const std::uint64_t diff = a ^ b;
  if (diff == 0) return false;
  return (a & (diff & (~diff + 1))) != 0;
}

}  // namespace

Deficiency core_deficiency_bruteforce(const Correspondence& g,
                                      const FiniteDistribution& nu,
                                      const FiniteDistribution& p) {
  const std::size_t k = g.outcome_size();
  if (k > kMaxBruteForceOutcomes) {
    throw Error(ErrorCode::kSupportTooLarge,
                std::to_string(k) + " outcomes exceed the brute-force limit of " +
                    std::to_string(kMaxBruteForceOutcomes));
  }
  const std::vector<Mass> nu_mass = nu.aligned_to(g.latent_support());
  const std::vector<Mass> p_mass = p.aligned_to(g.outcome_support());
  std::vector<std::uint64_t> images(g.latent_size());
  for (std::size_t u = 0; u < g.latent_size(); ++u) images[u] = g.image(u).mask();

  const std::uint64_t subsets = std::uint64_t{1} << k;
  std::vector<Mass> p_of(subsets, 0);
  Mass best = std::numeric_limits<Mass>::min();
  std::uint64_t best_mask = 0;
  for (std::uint64_t mask = 0; mask < subsets; ++mask) {
    if (mask != 0) {
      const int low = std::countr_zero(mask);
      p_of[mask] = p_of[mask & (mask - 1)] + p_mass[static_cast<std::size_t>(low)];
    }
    Mass cap = 0;
    for (std::size_t u = 0; u < images.size(); ++u) {
      if (images[u] & mask) cap += nu_mass[u];
    }
    const Mass d = p_of[mask] - cap;
    if (d > best || (d == best && better_witness(mask, best_mask))) {
      best = d;
      best_mask = mask;
    }
  }
  return {std::max<Mass>(best, 0), best, OutcomeSet::from_mask(k, best_mask)};
}

std::uint64_t count_selections(const Correspondence& g) {
  std::uint64_t total = 1;
  for (std::size_t u = 0; u < g.latent_size(); ++u) {
    total *= g.image(u).count();
    if (total > kMaxSelections) return kMaxSelections + 1;
  }
  return total;
}

void for_each_selection(const Correspondence& g,
                        const std::function<void(const Selection&)>& visit) {
  if (count_selections(g) > kMaxSelections) {
    throw Error(ErrorCode::kTooManySelections,
                "more than " + std::to_string(kMaxSelections) + " selections");
  }
  const std::size_t n = g.latent_size();
  std::vector<std::vector<std::size_t>> choices(n);
  for (std::size_t u = 0; u < n; ++u) choices[u] = g.image(u).indices();
  std::vector<std::size_t> odometer(n, 0);
  Selection s(n);
  for (;;) {
    for (std::size_t u = 0; u < n; ++u) s[u] = choices[u][odometer[u]];
    visit(s);
    std::size_t u = n;
    while (u > 0) {
      --u;
      if (++odometer[u] < choices[u].size()) break;
      odometer[u] = 0;
      if (u == 0) return;
    }
    if (n == 0) return;
  }
}

std::vector<Selection> enumerate_selections(const Correspondence& g) {
  std::vector<Selection> out;
  for_each_selection(g, [&](const Selection& s) { out.push_back(s); });
  return out;
}

std::vector<Mass> pushforward(const Correspondence& g,
                              std::span<const Mass> nu, const Selection& s) {
  if (nu.size() != g.latent_size() || s.size() != g.latent_size()) {
    throw Error(ErrorCode::kSupportMismatch, "selection or nu has wrong length");
  }
  std::vector<Mass> q(g.outcome_size(), 0);
  for (std::size_t u = 0; u < s.size(); ++u) {
    if (!g.image(u).contains(s[u])) {
      throw Error(ErrorCode::kBadRule, "selection leaves G(u)");
    }
    q[s[u]] += nu[u];
  }
  return q;
}

MinimaxReport selection_minimax_check(const Correspondence& g,
                                      const FiniteDistribution& nu,
                                      const FiniteDistribution& p) {
  MinimaxReport report;
  report.rhs = core_deficiency_bruteforce(g, nu, p).value;

  const std::vector<Mass> nu_mass = nu.aligned_to(g.latent_support());
  const std::vector<Mass> p_mass = p.aligned_to(g.outcome_support());
  std::set<std::vector<Mass>> distinct;
  Mass det = std::numeric_limits<Mass>::max();
  for_each_selection(g, [&](const Selection& s) {
    auto q = pushforward(g, nu_mass, s);
    Mass tv = 0;
    for (std::size_t y = 0; y < q.size(); ++y) tv += std::max<Mass>(p_mass[y] - q[y], 0);
    det = std::min(det, tv);
    ++report.selections;
    distinct.insert(std::move(q));
  });
  report.lhs_deterministic = det;

  // Randomized selections: min over mixtures w of sum_y (P(y) - sum_k w_k Q_k(y))^+.
  const std::size_t kq = distinct.size();
  const std::size_t ny = g.outcome_size();
  lp::LinearProgram prog(kq + ny);
  for (std::size_t y = 0; y < ny; ++y) prog.set_objective(kq + y, 1.0);
  std::vector<std::vector<Mass>> pushes(distinct.begin(), distinct.end());
  for (std::size_t y = 0; y < ny; ++y) {
    std::vector<double> row(kq + ny, 0.0);
    for (std::size_t k = 0; k < kq; ++k) row[k] = to_probability(pushes[k][y]);
    row[kq + y] = 1.0;
    prog.add_row(row, lp::RowSense::kGreaterEqual, to_probability(p_mass[y]));
  }
  std::vector<double> simplex_row(kq + ny, 0.0);
  for (std::size_t k = 0; k < kq; ++k) simplex_row[k] = 1.0;
  prog.add_row(simplex_row, lp::RowSense::kEqual, 1.0);
  const lp::Solution sol = lp::solve(prog);
  if (sol.status != lp::Status::kOptimal) {
    throw Error(ErrorCode::kLpFailure,
                "selection mixture LP returned " + lp::to_string(sol.status));
  }
  report.lhs = std::llround(sol.objective * static_cast<double>(kDenominator));
  report.equal = report.lhs == report.rhs;
  return report;
}

}  // namespace falsiflow
