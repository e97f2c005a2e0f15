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

#ifndef FALSIFLOW_MEASURE_HPP
#define FALSIFLOW_MEASURE_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace falsiflow {

// Probabilities are integer numerators over a fixed denominator so that
// feasibility verdicts are decided by exact integer comparisons.
using Mass = std::int64_t;
inline constexpr Mass kDenominator = 1'000'000'000;

inline constexpr double to_probability(Mass m) {
  return static_cast<double>(m) / static_cast<double>(kDenominator);
}

// Opaque identifier of an outcome or latent atom, e.g. "(1,0)".
struct Label {
  std::string text;

  Label() = default;
  Label(std::string t) : text(std::move(t)) {}  // NOLINT(runtime/explicit)
  Label(const char* t) : text(t) {}             // NOLINT(runtime/explicit)

  friend auto operator<=>(const Label&, const Label&) = default;
  friend bool operator==(const Label&, const Label&) = default;
};

using Outcome = Label;

std::vector<Label> make_labels(std::span<const std::string> texts);

class FiniteDistribution {
 public:
  FiniteDistribution() = default;

  // Masses must be nonnegative and sum to exactly kDenominator.
  static FiniteDistribution from_numerators(std::vector<Label> support,
                                            std::vector<Mass> masses);

  std::size_t size() const { return support_.size(); }
  const std::vector<Label>& support() const { return support_; }
  std::span<const Mass> masses() const { return masses_; }
  Mass mass(std::size_t i) const { return masses_[i]; }
  double probability(std::size_t i) const { return to_probability(masses_[i]); }

  std::optional<std::size_t> index_of(const Label& label) const;
  // Zero for labels outside the support.
  Mass mass_of(const Label& label) const;
  double probability_of(const Label& label) const {
    return to_probability(mass_of(label));
  }

  // Masses re-indexed by `labels`. Labels missing from this support get
  // zero; a support label absent from `labels` raises SupportMismatch.
  std::vector<Mass> aligned_to(std::span<const Label> labels) const;

  friend bool operator==(const FiniteDistribution& a,
                         const FiniteDistribution& b) {
    return a.support_ == b.support_ && a.masses_ == b.masses_;
  }

 private:
  std::vector<Label> support_;
  std::vector<Mass> masses_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Rounds each weight to the fixed-point grid and gives the rounding residual
// to the largest atom (first one on ties).
FiniteDistribution make_distribution(
    std::span<const std::pair<Label, double>> pairs);
FiniteDistribution make_distribution(std::span<const Label> support,
                                     std::span<const double> probabilities);

// Masses count/n on the distinct labels in first-appearance order.
FiniteDistribution empirical(std::span<const Label> observations);

// Sum over the merged support of max(p - q, 0); equals sup_A p(A) - q(A).
Mass total_variation_mass(const FiniteDistribution& p,
                          const FiniteDistribution& q);
double total_variation(const FiniteDistribution& p,
                       const FiniteDistribution& q);

}  // namespace falsiflow

#endif  // FALSIFLOW_MEASURE_HPP
