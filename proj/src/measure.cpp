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

#include "falsiflow/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "falsiflow/error.hpp"

namespace falsiflow {

namespace {

constexpr double kSumTolerance = 1e-9;

std::unordered_map<std::string, std::size_t> build_index(
    const std::vector<Label>& support) {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!index.emplace(support[i].text, i).second) {
      throw Error(ErrorCode::kDuplicateLabel,
                  "label '" + support[i].text + "' appears twice");
    }
  }
  return index;
}

// Gives the residual needed to hit kDenominator to the largest atom.
void restore_exact_sum(std::vector<Mass>& masses) {
  if (masses.empty()) return;
  const Mass total = std::accumulate(masses.begin(), masses.end(), Mass{0});
  const auto largest = std::max_element(masses.begin(), masses.end());
  *largest += kDenominator - total;
}

}  // namespace

std::vector<Label> make_labels(std::span<const std::string> texts) {
  return {texts.begin(), texts.end()};
}

FiniteDistribution FiniteDistribution::from_numerators(
    std::vector<Label> support, std::vector<Mass> masses) {
  if (support.size() != masses.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "support and mass lists differ in length");
  }
  if (support.empty()) {
    throw Error(ErrorCode::kEmptyData, "distribution has empty support");
  }
  Mass total = 0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (masses[i] < 0) {
      throw Error(ErrorCode::kNegativeMass,
                  "mass of '" + support[i].text + "' is negative");
    }
    total += masses[i];
  }
  if (total != kDenominator) {
    throw Error(ErrorCode::kMassSumOutOfTolerance,
                "numerators sum to " + std::to_string(total) + ", expected " +
                    std::to_string(kDenominator));
  }
  FiniteDistribution d;
  d.index_ = build_index(support);
  d.support_ = std::move(support);
  d.masses_ = std::move(masses);
  return d;
}

std::optional<std::size_t> FiniteDistribution::index_of(
    const Label& label) const {
  if (auto it = index_.find(label.text); it != index_.end()) return it->second;
  return std::nullopt;
}

Mass FiniteDistribution::mass_of(const Label& label) const {
  auto i = index_of(label);
  return i ? masses_[*i] : 0;
}

std::vector<Mass> FiniteDistribution::aligned_to(
    std::span<const Label> labels) const {
  std::vector<Mass> out(labels.size(), 0);
  std::size_t matched = 0;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (auto i = index_of(labels[j])) {
      out[j] = masses_[*i];
      ++matched;
    }
  }
  if (matched != support_.size()) {
    for (const auto& l : support_) {
      if (std::find(labels.begin(), labels.end(), l) == labels.end()) {
        throw Error(ErrorCode::kSupportMismatch,
                    "label '" + l.text + "' is not in the target support");
      }
    }
    throw Error(ErrorCode::kSupportMismatch, "target support has duplicates");
  }
  return out;
}

FiniteDistribution make_distribution(
    std::span<const std::pair<Label, double>> pairs) {
  std::vector<Label> support;
  std::vector<double> probs;
  support.reserve(pairs.size());
  probs.reserve(pairs.size());
  for (const auto& [label, p] : pairs) {
    support.push_back(label);
    probs.push_back(p);
  }
  return make_distribution(support, probs);
}

FiniteDistribution make_distribution(std::span<const Label> support,
                                     std::span<const double> probabilities) {
  if (support.size() != probabilities.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "support and probability lists differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (!std::isfinite(probabilities[i]) || probabilities[i] < 0.0) {
      throw Error(ErrorCode::kNegativeMass,
                  "mass of '" + support[i].text + "' is negative or not finite");
    }
    total += probabilities[i];
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::kMassSumOutOfTolerance,
                "masses sum to " + std::to_string(total));
  }
  std::vector<Mass> masses(probabilities.size());
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    masses[i] = std::llround(probabilities[i] * static_cast<double>(kDenominator));
  }
  build_index({support.begin(), support.end()});
  restore_exact_sum(masses);
  return FiniteDistribution::from_numerators({support.begin(), support.end()},
                                             std::move(masses));
}

FiniteDistribution empirical(std::span<const Label> observations) {
  if (observations.empty()) {
    throw Error(ErrorCode::kEmptyData, "no observations");
  }
  std::vector<Label> support;
  std::vector<std::int64_t> counts;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& y : observations) {
    auto [it, inserted] = index.emplace(y.text, support.size());
    if (inserted) {
      support.push_back(y);
      counts.push_back(0);
    }
    ++counts[it->second];
  }
  // Sorted support makes the rounding repair independent of data order.
  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });
  {
    std::vector<Label> s2;
    std::vector<std::int64_t> c2;
    for (std::size_t i : order) {
      s2.push_back(support[i]);
      c2.push_back(counts[i]);
    }
    support = std::move(s2);
    counts = std::move(c2);
  }
  const auto n = static_cast<__int128>(observations.size());
  std::vector<Mass> masses(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    // round(count * D / n) in exact integer arithmetic
    const __int128 num = static_cast<__int128>(counts[i]) * kDenominator * 2 + n;
    masses[i] = static_cast<Mass>(num / (2 * n));
  }
  restore_exact_sum(masses);
  return FiniteDistribution::from_numerators(std::move(support),
                                             std::move(masses));
}

Mass total_variation_mass(const FiniteDistribution& p,
                          const FiniteDistribution& q) {
  Mass tv = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    tv += std::max<Mass>(p.mass(i) - q.mass_of(p.support()[i]), 0);
  }
  return tv;
}

double total_variation(const FiniteDistribution& p,
                       const FiniteDistribution& q) {
  return to_probability(total_variation_mass(p, q));
}

}  // namespace falsiflow
