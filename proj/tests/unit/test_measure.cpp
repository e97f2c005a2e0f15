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

#include <algorithm>
#include <map>
#include <random>

#include "doctest.h"
#include "falsiflow/error.hpp"
#include "falsiflow/measure.hpp"
#include "falsiflow/models.hpp"
#include "oracles.hpp"

namespace falsiflow {
namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kParseError;
}

TEST_CASE("make_distribution on a symmetric pair") {
  const std::vector<std::pair<Label, double>> pairs = {{"a", 0.5}, {"b", 0.5}};
  const auto d = make_distribution(pairs);
  CHECK(d.size() == 2);
  CHECK(d.mass(0) == kDenominator / 2);
  CHECK(d.mass(1) == kDenominator / 2);
  CHECK(d.support()[0].text == "a");
}

TEST_CASE("make_distribution absorbs sums within tolerance") {
  const std::vector<std::pair<Label, double>> pairs = {{"a", 0.3}, {"b", 0.7000000001}};
  const auto d = make_distribution(pairs);
  CHECK(d.mass_of("a") == 300'000'000);
  CHECK(d.mass_of("b") == 700'000'000);
}

TEST_CASE("make_distribution errors") {
  const std::vector<std::pair<Label, double>> dup = {{"a", 0.5}, {"a", 0.5}};
  CHECK(code_of([&] { make_distribution(dup); }) == ErrorCode::kDuplicateLabel);
  const std::vector<std::pair<Label, double>> neg = {{"a", -0.1}, {"b", 1.1}};
  CHECK(code_of([&] { make_distribution(neg); }) == ErrorCode::kNegativeMass);
  const std::vector<std::pair<Label, double>> off = {{"a", 0.5}, {"b", 0.6}};
  CHECK(code_of([&] { make_distribution(off); }) == ErrorCode::kMassSumOutOfTolerance);
  CHECK(code_of([&] { FiniteDistribution::from_numerators({"a", "b"}, {1, 2}); }) ==
        ErrorCode::kMassSumOutOfTolerance);
}

TEST_CASE("rounding residual goes to the largest atom") {
  const std::vector<std::pair<Label, double>> thirds = {
      {"a", 1.0 / 3}, {"b", 1.0 / 3}, {"c", 1.0 / 3}};
  const auto d = make_distribution(thirds);
  Mass total = 0;
  for (Mass m : d.masses()) total += m;
  CHECK(total == kDenominator);
  CHECK(d.mass(0) == 333'333'334);
  CHECK(d.mass(1) == 333'333'333);
}

TEST_CASE("empirical counts in first-appearance order") {
  const std::vector<Outcome> obs = {"a", "a", "b", "a"};
  const auto d = empirical(obs);
  REQUIRE(d.size() == 2);
  CHECK(d.support()[0].text == "a");
  CHECK(d.mass(0) == 750'000'000);
  CHECK(d.mass(1) == 250'000'000);
  const std::vector<Outcome> one = {"x"};
  CHECK(empirical(one).mass(0) == kDenominator);
  CHECK(code_of([] { empirical(std::vector<Outcome>{}); }) == ErrorCode::kEmptyData);
}

TEST_CASE("empirical of simulated entry game data matches an independent tally") {
  const auto game = entry_game(-1.0, -1.0, cell_centred_grid(-2.0, 2.0, 40));
  const auto data = simulate(game.g, game.nu, SelectionRule::uniform_random(3), 1000, 11);
  std::map<std::string, long> tally;
  for (const auto& y : data) ++tally[y.text];
  const auto d = empirical(data);
  Mass total = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(d.mass(i) == tally[d.support()[i].text] * (kDenominator / 1000));
    total += d.mass(i);
  }
  CHECK(total == kDenominator);
}

TEST_CASE("empirical is permutation covariant") {
  std::mt19937_64 eng(5);
  std::vector<Outcome> obs;
  for (int i = 0; i < 97; ++i) obs.emplace_back(std::to_string(eng() % 7));
  const auto a = empirical(obs);
  std::shuffle(obs.begin(), obs.end(), eng);
  const auto b = empirical(obs);
  for (const auto& l : a.support()) CHECK(a.mass_of(l) == b.mass_of(l));
}

TEST_CASE("total variation examples") {
  const std::vector<Label> ab = {"a", "b"};
  const std::vector<double> p73 = {0.7, 0.3}, half = {0.5, 0.5};
  const auto p = make_distribution(ab, p73);
  const auto q = make_distribution(ab, half);
  CHECK(total_variation(p, p) == 0.0);
  CHECK(total_variation_mass(p, q) == 200'000'000);
  const std::vector<Label> a = {"a"}, b = {"b"};
  const std::vector<double> one = {1.0};
  CHECK(total_variation(make_distribution(a, one), make_distribution(b, one)) == 1.0);
}

TEST_CASE("total variation equals the subset maximum (property)") {
  std::mt19937_64 eng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + eng() % 12;
    const auto pm = oracle::random_masses(eng, k, true);
    const auto qm = oracle::random_masses(eng, k, true);
    std::vector<Label> labels;
    for (std::size_t i = 0; i < k; ++i) labels.emplace_back("y" + std::to_string(i));
    const auto p = FiniteDistribution::from_numerators(labels, pm);
    const auto q = FiniteDistribution::from_numerators(labels, qm);
    oracle::Mass best = 0;
    for (std::uint32_t a = 0; a < (1u << k); ++a) {
      oracle::Mass s = 0;
      for (std::size_t i = 0; i < k; ++i) {
        if (a >> i & 1u) s += pm[i] - qm[i];
      }
      best = std::max(best, s);
    }
    CHECK(total_variation_mass(p, q) == best);
  }
}

TEST_CASE("total variation merges supports by label") {
  const std::vector<Label> ab = {"a", "b"}, bc = {"b", "c"};
  const std::vector<double> half = {0.5, 0.5};
  CHECK(total_variation_mass(make_distribution(ab, half), make_distribution(bc, half)) ==
        kDenominator / 2);
}

TEST_CASE("aligned_to fills zeros and rejects dropped labels") {
  const std::vector<Label> ab = {"a", "b"};
  const std::vector<double> half = {0.5, 0.5};
  const auto d = make_distribution(ab, half);
  const std::vector<Label> bca = {"b", "c", "a"};
  const auto m = d.aligned_to(bca);
  CHECK(m == std::vector<Mass>{kDenominator / 2, 0, kDenominator / 2});
  const std::vector<Label> only_a = {"a"};
  CHECK(code_of([&] { d.aligned_to(only_a); }) == ErrorCode::kSupportMismatch);
}

}  // namespace
}  // namespace falsiflow
