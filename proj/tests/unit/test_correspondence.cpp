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

#include <random>

#include "doctest.h"
#include "falsiflow/correspondence.hpp"
#include "falsiflow/error.hpp"
#include "falsiflow/models.hpp"
#include "oracles.hpp"

namespace falsiflow {
namespace {

// Regions only-(0,0), multiplicity, only-(1,1) with nu = (0.3, 0.4, 0.3).
struct SmallEntry {
  Correspondence g = Correspondence::from_labels(
      {"only(0,0)", "multiple", "only(1,1)"}, {"(0,0)", "(0,1)", "(1,0)", "(1,1)"},
      {{"(0,0)"}, {"(0,1)", "(1,0)"}, {"(1,1)"}});
  FiniteDistribution nu = FiniteDistribution::from_numerators(
      g.latent_support(), {300'000'000, 400'000'000, 300'000'000});
};

FiniteDistribution dist(const Correspondence& g, std::vector<Mass> m) {
  return FiniteDistribution::from_numerators(g.outcome_support(), std::move(m));
}

TEST_CASE("construction rejects empty images and bad indices") {
  CHECK_THROWS_AS(Correspondence({"u"}, {"a"}, {{}}), Error);
  try {
    Correspondence({"u"}, {"a"}, {{}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyValue);
  }
  try {
    Correspondence({"u"}, {"a"}, {{3}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIndexOutOfRange);
  }
  try {
    Correspondence({"u", "u"}, {"a"}, {{0}, {0}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDuplicateLabel);
  }
}

TEST_CASE("preimage examples") {
  const auto net = line_network_game(std::vector<double>{0.4, 0.2, 0.2, 0.2});
  const auto& g = net.g;
  CHECK(preimage(g, OutcomeSet(g.outcome_size())).empty());
  CHECK(preimage(g, OutcomeSet::full(g.outcome_size())).size() == 4);
  const std::vector<Label> a = {"(0,1,1)", "(1,1,0)"};
  CHECK(preimage(g, g.outcome_set(a)) == std::vector<std::size_t>{1, 2});
}

TEST_CASE("capacity examples and SupportMismatch") {
  SmallEntry e;
  CHECK(capacity(e.g, e.nu, OutcomeSet(4)) == 0);
  CHECK(capacity(e.g, e.nu, OutcomeSet::full(4)) == kDenominator);
  const std::vector<Label> a = {"(0,1)"};
  CHECK(capacity(e.g, e.nu, e.g.outcome_set(a)) == 400'000'000);
  const auto wrong = FiniteDistribution::from_numerators({"zzz"}, {kDenominator});
  CHECK_THROWS_AS(capacity(e.g, wrong, OutcomeSet(4)), Error);
}

TEST_CASE("capacity is monotone and bounded") {
  std::mt19937_64 eng(3);
  SmallEntry e;
  for (std::uint64_t a = 0; a < 16; ++a) {
    for (std::uint64_t b = 0; b < 16; ++b) {
      if ((a & b) != a) continue;
      CHECK(capacity(e.g, e.nu, OutcomeSet::from_mask(4, a)) <=
            capacity(e.g, e.nu, OutcomeSet::from_mask(4, b)));
    }
  }
}

TEST_CASE("core_deficiency_bruteforce examples") {
  SmallEntry e;
  const auto in_core = core_deficiency_bruteforce(e.g, e.nu, dist(e.g, {300'000'000, 200'000'000, 200'000'000, 300'000'000}));
  CHECK(in_core.value == 0);
  CHECK(in_core.raw == 0);
  CHECK(in_core.witness.empty());
  const auto out = core_deficiency_bruteforce(e.g, e.nu, dist(e.g, {300'000'000, 500'000'000, 0, 200'000'000}));
  CHECK(out.value == 100'000'000);
  CHECK(e.g.labels_of(out.witness) == std::vector<Label>{"(0,1)"});

  const auto id = Correspondence::from_labels({"a", "b"}, {"a", "b"}, {{"a"}, {"b"}});
  const auto nu = FiniteDistribution::from_numerators({"a", "b"}, {500'000'000, 500'000'000});
  const auto r = core_deficiency_bruteforce(id, nu, dist(id, {700'000'000, 300'000'000}));
  CHECK(r.value == 200'000'000);
  CHECK(id.labels_of(r.witness) == std::vector<Label>{"a"});
}

TEST_CASE("core_deficiency_bruteforce guard") {
  std::vector<Label> ys;
  std::vector<std::vector<std::size_t>> images(1);
  for (int i = 0; i < 21; ++i) {
    ys.emplace_back("y" + std::to_string(i));
    images[0].push_back(static_cast<std::size_t>(i));
  }
  const Correspondence g({"u"}, ys, images);
  const auto nu = FiniteDistribution::from_numerators({"u"}, {kDenominator});
  std::vector<Mass> pm(21, 0);
  pm[0] = kDenominator;
  try {
    core_deficiency_bruteforce(g, nu, FiniteDistribution::from_numerators(ys, pm));
    FAIL("expected SupportTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSupportTooLarge);
  }
}

TEST_CASE("core_deficiency_bruteforce agrees with the oracle (property)") {
  std::mt19937_64 eng(23);
  for (int trial = 0; trial < 300; ++trial) {
    oracle::Instance in;
    in.outcomes = 1 + eng() % 8;
    const std::size_t nl = 1 + eng() % 8;
    std::vector<Label> ys, us;
    std::vector<std::vector<std::size_t>> images(nl);
    for (std::size_t y = 0; y < in.outcomes; ++y) ys.emplace_back("y" + std::to_string(y));
    for (std::size_t u = 0; u < nl; ++u) {
      us.emplace_back("u" + std::to_string(u));
      std::uint32_t mask = 0;
      for (std::size_t y = 0; y < in.outcomes; ++y) {
        if (eng() & 1u) mask |= 1u << y;
      }
      if (mask == 0) mask = 1u << (eng() % in.outcomes);
      in.adjacency.push_back(mask);
      for (std::size_t y = 0; y < in.outcomes; ++y) {
        if (mask >> y & 1u) images[u].push_back(y);
      }
    }
    in.nu = oracle::random_masses(eng, nl, true);
    in.p = oracle::random_masses(eng, in.outcomes, true);
    const Correspondence g(us, ys, images);
    const auto r = core_deficiency_bruteforce(g, FiniteDistribution::from_numerators(us, in.nu),
                                              FiniteDistribution::from_numerators(ys, in.p));
    CHECK(r.raw == oracle::max_deficiency(in));
    CHECK(r.value == std::max<Mass>(0, r.raw));
  }
}

TEST_CASE("selections: counts, order and guard") {
  const auto single = Correspondence::from_labels({"u1", "u2"}, {"a", "b"}, {{"a"}, {"b"}});
  CHECK(enumerate_selections(single) == std::vector<Selection>{{0, 1}});
  const auto two = Correspondence::from_labels({"u1", "u2"}, {"a", "b"}, {{"a"}, {"a", "b"}});
  CHECK(enumerate_selections(two) == std::vector<Selection>{{0, 0}, {0, 1}});
  const auto net = line_network_game(std::vector<double>{0.4, 0.2, 0.2, 0.2});
  CHECK(enumerate_selections(net.g).size() == 8);
  CHECK(count_selections(net.g) == 8);

  std::vector<Label> us;
  std::vector<std::vector<std::size_t>> images;
  for (int i = 0; i < 21; ++i) {
    us.emplace_back("u" + std::to_string(i));
    images.push_back({0, 1});
  }
  const Correspondence big(us, {"a", "b"}, images);
  CHECK(count_selections(big) == kMaxSelections + 1);
  try {
    enumerate_selections(big);
    FAIL("expected TooManySelections");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTooManySelections);
  }
}

TEST_CASE("selection pushforwards are dominated by the capacity") {
  SmallEntry e;
  const auto nu = e.nu.aligned_to(e.g.latent_support());
  for (const auto& s : enumerate_selections(e.g)) {
    const auto push = pushforward(e.g, nu, s);
    for (std::uint64_t a = 0; a < 16; ++a) {
      Mass pa = 0;
      for (std::size_t y = 0; y < 4; ++y) {
        if (a >> y & 1u) pa += push[y];
      }
      CHECK(pa <= capacity(e.g, e.nu, OutcomeSet::from_mask(4, a)));
    }
  }
}

TEST_CASE("selection_minimax_check examples") {
  SmallEntry e;
  const auto out = selection_minimax_check(e.g, e.nu, dist(e.g, {300'000'000, 500'000'000, 0, 200'000'000}));
  CHECK(out.lhs == 100'000'000);
  CHECK(out.rhs == 100'000'000);
  CHECK(out.equal);
  CHECK(out.selections == 2);
  const auto in = selection_minimax_check(e.g, e.nu, dist(e.g, {300'000'000, 200'000'000, 200'000'000, 300'000'000}));
  CHECK(in.lhs == 0);
  CHECK(in.rhs == 0);
  CHECK(in.equal);
  // Only a randomized selection reaches zero here; every deterministic one
  // sends the whole multiplicity mass to one outcome.
  CHECK(in.lhs_deterministic == 200'000'000);

  const auto single = Correspondence::from_labels({"u1", "u2"}, {"a", "b"}, {{"a"}, {"b"}});
  const auto nu = FiniteDistribution::from_numerators({"u1", "u2"}, {600'000'000, 400'000'000});
  const auto r = selection_minimax_check(single, nu, dist(single, {100'000'000, 900'000'000}));
  CHECK(r.lhs == r.rhs);
  CHECK(r.lhs == 500'000'000);
}

TEST_CASE("with_extra_outcomes appends unreachable outcomes") {
  SmallEntry e;
  const std::vector<Label> extra = {"(2,2)"};
  const auto g2 = e.g.with_extra_outcomes(extra);
  CHECK(g2.outcome_size() == 5);
  CHECK(g2.outcome_index("(2,2)") == 4u);
  CHECK(preimage(g2, g2.outcome_set(extra)).empty());
  const std::vector<Label> bogus = {"nope"};
  try {
    e.g.outcome_set(bogus);
    FAIL("expected UnknownOutcome");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kUnknownOutcome);
  }
}

}  // namespace
}  // namespace falsiflow
