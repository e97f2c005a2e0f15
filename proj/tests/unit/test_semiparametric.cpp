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

#include <cmath>
#include <random>

#include "doctest.h"
#include "falsiflow/error.hpp"
#include "falsiflow/models.hpp"
#include "falsiflow/semiparametric.hpp"
#include "falsiflow/transport.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace falsiflow {
namespace {

TEST_CASE("g_lambda at zero multiplier is zero on the range of G") {
  const auto m = binary_response_pilot(0.5);
  const std::vector<double> zero = {0.0, 0.0};
  for (const auto& y : pilot_outcomes()) CHECK(g_lambda(m, y, zero).value == 0.0);
}

TEST_CASE("g_lambda pilot example") {
  const auto m = binary_response_pilot(0.5);
  const std::vector<double> lambda = {0.25, 0.0};
  const auto r = g_lambda(m, Label("(1,1)"), lambda);
  CHECK(r.value == doctest::Approx(-0.25).epsilon(1e-15));
  // Smallest latent index of the cell {x = 1, eps <= -1}.
  CHECK(m.correspondence().latent_support()[r.argmin].text == "(1,-2)");
  const std::vector<double> short_lambda = {0.25};
  CHECK_THROWS_AS(g_lambda(m, Label("(1,1)"), short_lambda), Error);
  try {
    g_lambda(m, Label("(2,2)"), lambda);
    FAIL("expected UnknownOutcome");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnknownOutcome);
  }
}

TEST_CASE("pilot moment values") {
  for (double eta : {0.2, 0.5, 0.8}) {
    const auto m = binary_response_pilot(eta);
    const auto u = *m.correspondence().latent_index(Label("(1,-1.5)"));
    CHECK(m.moment(0, u) == doctest::Approx(2.0 * (1.0 - eta)));
    CHECK(m.moment(1, u) == 0.0);
    const auto v = *m.correspondence().latent_index(Label("(-1,0.5)"));
    CHECK(m.moment(0, v) == 0.0);
    CHECK(m.moment(1, v) == doctest::Approx(-2.0 * eta));
  }
}

TEST_CASE("dual objective at zero and its supergradient") {
  const auto m = binary_response_pilot(0.5);
  const auto p = pilot_distribution(0.5, 0.3, 0.7);
  const std::vector<double> zero = {0.0, 0.0};
  const auto v = dual_objective(m, p, zero);
  CHECK(v.value == 0.0);
  std::vector<double> expect(2, 0.0);
  for (std::size_t y = 0; y < 4; ++y) {
    for (std::size_t i = 0; i < 2; ++i) {
      expect[i] -= p.probability_of(m.correspondence().outcome_support()[y]) * m.moment(i, v.minimizers[y]);
    }
  }
  CHECK(v.supergradient[0] == doctest::Approx(expect[0]));
  CHECK(v.supergradient[1] == doctest::Approx(expect[1]));
}

TEST_CASE("concavity and supergradient inequality (property)") {
  std::mt19937_64 eng(31);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dm = 1 + eng() % 3;
    const auto model = gen::random_semiparametric(eng, 2 + eng() % 15, 1 + eng() % 6, dm);
    const auto p = gen::random_distribution(eng, model.correspondence().outcome_support(), true);
    std::vector<double> a(dm), b(dm), mid(dm);
    for (std::size_t i = 0; i < dm; ++i) {
      a[i] = coef(eng);
      b[i] = coef(eng);
      mid[i] = 0.5 * (a[i] + b[i]);
    }
    const auto fa = dual_objective(model, p, a);
    const auto fb = dual_objective(model, p, b);
    const auto fm = dual_objective(model, p, mid);
    CHECK(fm.value >= 0.5 * (fa.value + fb.value) - 1e-12);
    double lin = fa.value;
    for (std::size_t i = 0; i < dm; ++i) lin += fa.supergradient[i] * (b[i] - a[i]);
    CHECK(fb.value <= lin + 1e-12);
  }
}

TEST_CASE("maximize_dual examples") {
  const auto ok = maximize_dual(binary_response_pilot(0.5), pilot_distribution(0.5, 0.3, 0.7));
  CHECK(ok.T <= 1e-6);
  CHECK(ok.T >= 0.0);
  CHECK(ok.compatible);

  const auto model = binary_response_pilot(0.3);
  const auto p = pilot_distribution(0.5, 0.5, 0.7);
  const auto bad = maximize_dual(model, p);
  CHECK_FALSE(bad.compatible);
  CHECK(bad.T > 1e-6);
  CHECK(std::abs(bad.T - primal_lp(model, p).value) <= 1e-5);
  CHECK(bad.T == doctest::Approx(oracle::pilot_violation(0.3, 0.5, 0.5, 0.7)).epsilon(1e-6));
  CHECK(bad.minimizers.size() == 4);
  CHECK_FALSE(bad.trace.empty());

  const auto ex = example4_instance(100);
  const auto c = maximize_dual(ex.model, ex.p);
  CHECK(std::abs(c.T - 0.01) <= 1e-5);
  CHECK(c.upper_bound >= c.T);
}

TEST_CASE("the reported T is the objective at the reported lambda") {
  std::mt19937_64 eng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const auto model = gen::random_semiparametric(eng, 3 + eng() % 12, 2 + eng() % 4, 1 + eng() % 3);
    const auto p = gen::random_distribution(eng, model.correspondence().outcome_support());
    const auto c = maximize_dual(model, p);
    CHECK(dual_objective(model, p, c.lambda).value == c.T);
    const std::vector<double> zero(model.moment_count(), 0.0);
    CHECK(c.T >= dual_objective(model, p, zero).value);
  }
}

TEST_CASE("weak duality for arbitrary multipliers (property)") {
  std::mt19937_64 eng(43);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dm = 1 + eng() % 3;
    const auto model = gen::random_semiparametric(eng, 2 + eng() % 10, 1 + eng() % 5, dm);
    const auto p = gen::random_distribution(eng, model.correspondence().outcome_support());
    const double primal = primal_lp(model, p).value;
    for (int k = 0; k < 5; ++k) {
      std::vector<double> lambda(dm);
      for (auto& v : lambda) v = coef(eng);
      CHECK(dual_objective(model, p, lambda).value <= primal + 1e-9);
    }
  }
}

TEST_CASE("primal_lp: vacuous moments and infeasible grids") {
  const auto g = Correspondence::from_labels({"u1", "u2"}, {"a", "b"}, {{"a"}, {"b"}});
  const SemiparametricModel zero(g, {{0.0, 0.0}});
  const auto p = FiniteDistribution::from_numerators({"a", "b"}, {900'000'000, 100'000'000});
  CHECK(primal_lp(zero, p).value == doctest::Approx(0.0).epsilon(1e-12));
  const SemiparametricModel positive(g, {{1.0, 2.0}});
  try {
    primal_lp(positive, p);
    FAIL("expected Infeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInfeasible);
  }
}

TEST_CASE("primal plan has the right marginals and matches vertex enumeration") {
  std::mt19937_64 eng(47);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t nl = 2 + eng() % 3, ny = 1 + eng() % 2, dm = 1;
    const auto model = gen::random_semiparametric(eng, nl, ny, dm);
    const auto& g = model.correspondence();
    const auto p = gen::random_distribution(eng, g.outcome_support());
    const auto r = primal_lp(model, p);
    for (std::size_t y = 0; y < ny; ++y) {
      double s = 0.0;
      for (double v : r.plan[y]) s += v;
      CHECK(s == doctest::Approx(p.probability(y)).epsilon(1e-9));
    }
    // Standard form: variables pi(y,u), rows are the P marginals and moments.
    std::vector<std::vector<double>> a;
    std::vector<double> b, c;
    for (std::size_t y = 0; y < ny; ++y) {
      for (std::size_t u = 0; u < nl; ++u) c.push_back(g.image(u).contains(y) ? 0.0 : 1.0);
    }
    for (std::size_t y = 0; y < ny; ++y) {
      std::vector<double> row(ny * nl, 0.0);
      for (std::size_t u = 0; u < nl; ++u) row[y * nl + u] = 1.0;
      a.push_back(row);
      b.push_back(p.probability(y));
    }
    std::vector<double> row(ny * nl);
    for (std::size_t y = 0; y < ny; ++y) {
      for (std::size_t u = 0; u < nl; ++u) row[y * nl + u] = model.moment(0, u);
    }
    a.push_back(row);
    b.push_back(0.0);
    const auto ref = oracle::lp_vertex_enumeration(a, b, c);
    REQUIRE(ref.has_value());
    CHECK(r.value == doctest::Approx(*ref).epsilon(1e-9));
  }
}

TEST_CASE("pinned latent distribution reproduces the parametric verdict (property)") {
  std::mt19937_64 eng(53);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t nl = 1 + eng() % 6, ny = 1 + eng() % 5;
    const auto g = gen::random_correspondence(eng, nl, ny);
    const auto nu = gen::random_distribution(eng, g.latent_support());
    const auto p = gen::random_distribution(eng, g.outcome_support(), true);
    const auto model = pin_latent_distribution(g, nu);
    const double flow = solve_zero_one(p, nu, g).primal_value();
    CHECK(primal_lp(model, p).value == doctest::Approx(flow).epsilon(1e-8));
    CHECK(std::abs(maximize_dual(model, p).T - flow) <= 1e-5);
  }
}

TEST_CASE("pinned pilot reproduces the parametric verdict") {
  const auto pilot = binary_response_pilot(0.5);
  const auto& g = pilot.correspondence();
  // Mass on (x, eps) nodes with Pr(eps <= 0 | x) = 1/2.
  std::vector<double> w(g.latent_size(), 0.0);
  for (std::size_t u = 0; u < g.latent_size(); ++u) w[u] = 1.0 / static_cast<double>(g.latent_size());
  const auto nu = make_distribution(g.latent_support(), w);
  const auto model = pin_latent_distribution(g, nu);
  for (const auto& p : {pilot_distribution(0.5, 0.3, 0.7), pilot_distribution(0.5, 0.4, 0.6)}) {
    const auto flow = solve_zero_one(p, nu, g);
    CHECK(primal_lp(model, p).value == doctest::Approx(flow.primal_value()).epsilon(1e-8));
  }
}

TEST_CASE("empty moment list") {
  const auto g = Correspondence::from_labels({"u1", "u2"}, {"a", "b"}, {{"a"}, {"a", "b"}});
  const SemiparametricModel model(g, {});
  const auto p = FiniteDistribution::from_numerators({"a", "b"}, {300'000'000, 700'000'000});
  const auto c = maximize_dual(model, p);
  CHECK(c.T == 0.0);
  CHECK(c.lambda.empty());
  CHECK(primal_lp(model, p).value == doctest::Approx(0.0).epsilon(1e-12));
  const auto d = moment_diagnostics(model);
  CHECK(d.moment_count == 0);
  CHECK(d.assumptions_hold);
  REQUIRE_FALSE(d.notes.empty());
  CHECK(d.notes[0].find("d_m = 0") != std::string::npos);
}

TEST_CASE("moment diagnostics") {
  const auto pilot = moment_diagnostics(binary_response_pilot(0.5));
  CHECK(pilot.bounded);
  CHECK(pilot.assumptions_hold);
  CHECK_FALSE(pilot.truncated_unbounded);
  CHECK(pilot.max_norm == doctest::Approx(1.0));
  const auto ex = moment_diagnostics(example4_instance(100).model);
  CHECK(ex.bounded);
  CHECK(ex.truncated_unbounded);
  CHECK(ex.max_norm == doctest::Approx(99.0));
}

TEST_CASE("an empty V makes the dual diverge with a certificate") {
  const auto g = Correspondence::from_labels({"u1", "u2"}, {"a"}, {{"a"}, {"a"}});
  const SemiparametricModel model(g, {{1.0, 1.0}});
  const auto p = FiniteDistribution::from_numerators({"a"}, {kDenominator});
  try {
    maximize_dual(model, p);
    FAIL("expected Diverged");
  } catch (const DivergedError& e) {
    CHECK(e.code() == ErrorCode::kDiverged);
    CHECK(e.certificate().boundary_active);
    CHECK(e.certificate().escalated);
    CHECK(e.certificate().box == doctest::Approx(1e4));
    CHECK(e.certificate().T > 1e3);
  }
}

TEST_CASE("maximize_dual is deterministic") {
  std::mt19937_64 eng(59);
  const auto model = gen::random_semiparametric(eng, 12, 4, 2);
  const auto p = gen::random_distribution(eng, model.correspondence().outcome_support());
  const auto a = maximize_dual(model, p), b = maximize_dual(model, p);
  CHECK(a.T == b.T);
  CHECK(a.lambda == b.lambda);
  CHECK(a.iterations == b.iterations);
}

}  // namespace
}  // namespace falsiflow
