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

// Empirical falsification statistics and bootstrap calibration.

#ifndef FALSIFLOW_INFERENCE_HPP
#define FALSIFLOW_INFERENCE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "falsiflow/correspondence.hpp"
#include "falsiflow/measure.hpp"
#include "falsiflow/semiparametric.hpp"

namespace falsiflow {

enum class StatisticKind { kTvCore, kTnHalflines, kSemiparametric };

// "tv-core", "tn-halflines" or "semi".
StatisticKind parse_statistic(const std::string& name);
std::string to_string(StatisticKind kind);

enum class BootstrapScheme {
  // Replicates of a null-centred version of the statistic (see bootstrap_pvalue).
  kRecentered,
  // The statistic recomputed verbatim on every resample.
  kNaive,
};
std::string to_string(BootstrapScheme scheme);

// (-inf, endpoint] when lower, (endpoint, inf) otherwise.
struct HalfLine {
  bool lower = true;
  double endpoint = 0.0;
};

struct TestReport {
  std::string statistic;
  double value = 0.0;
  double scaled_value = 0.0;  // sqrt(n) * value
  std::optional<double> pvalue;
  std::size_t B = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::vector<Label> witness;
  std::optional<HalfLine> halfline;
  std::optional<DualCertificate> certificate;
  std::vector<double> replicates;  // bootstrap draws of the statistic
  std::string scheme;
};

struct ParametricTarget {
  Correspondence g;
  FiniteDistribution nu;
};
using TestTarget = std::variant<ParametricTarget, SemiparametricModel>;

// Minimal violation mass of P_n. Data outcomes outside the support of G are
// added without preimage, so they count fully against the model.
TestReport statistic_tv_core(std::span<const Outcome> data,
                             const FiniteDistribution& nu,
                             const Correspondence& g);

// Deficiency maximized over (-inf, Y_i] and (Y_i, inf) only. Outcome labels
// must parse as real numbers; the value is clamped at zero.
TestReport statistic_tn_halflines(std::span<const Outcome> data,
                                  const FiniteDistribution& nu,
                                  const Correspondence& g);

TestReport statistic_semiparametric(std::span<const Outcome> data,
                                    const SemiparametricModel& model,
                                    const DualOptions& options = {});

TestReport compute_statistic(std::span<const Outcome> data,
                             const TestTarget& target, StatisticKind kind);

// Nonparametric bootstrap with p = (1 + #{T*_b >= T_obs}) / (B + 1). Data are
// put in canonical order first and replicate b resamples with its own derived
// seed, so the result depends only on (data multiset, B, seed). Under
// kRecentered the replicates are
//   tv-core:      TV(P*_b, P_n)
//   tn-halflines: max over the observed half-lines of (P*_b - P_n)(A)
//   semi:         T(P*_b) - T(P_n)
// Any replicate failure aborts the whole computation.
TestReport bootstrap_pvalue(std::span<const Outcome> data,
                            const TestTarget& target, StatisticKind kind,
                            std::size_t B, std::uint64_t seed,
                            BootstrapScheme scheme = BootstrapScheme::kRecentered);

}  // namespace falsiflow

#endif  // FALSIFLOW_INFERENCE_HPP
