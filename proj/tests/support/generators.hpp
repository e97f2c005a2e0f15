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

// Random instance generators shared by unit and acceptance tests.

#ifndef FALSIFLOW_TESTS_GENERATORS_HPP
#define FALSIFLOW_TESTS_GENERATORS_HPP

#include <random>
#include <string>
#include <vector>

#include "falsiflow/correspondence.hpp"
#include "falsiflow/measure.hpp"
#include "falsiflow/semiparametric.hpp"
#include "oracles.hpp"

namespace gen {

using falsiflow::Correspondence;
using falsiflow::FiniteDistribution;
using falsiflow::Label;

inline std::vector<Label> labels(const std::string& prefix, std::size_t n) {
  std::vector<Label> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(prefix + std::to_string(i));
  return out;
}

// Each (u, y) pair adjacent with probability `density`; empty rows get one
// random outcome.
template <class Engine>
Correspondence random_correspondence(Engine& eng, std::size_t nl, std::size_t ny,
                                     double density = 0.5, std::size_t max_image = 64) {
  std::bernoulli_distribution coin(density);
  std::vector<std::vector<std::size_t>> images(nl);
  for (auto& img : images) {
    for (std::size_t y = 0; y < ny; ++y) {
      if (img.size() < max_image && coin(eng)) img.push_back(y);
    }
    if (img.empty()) img.push_back(eng() % ny);
  }
  return Correspondence(labels("u", nl), labels("y", ny), images);
}

// Bounded moments recentred at a random full-support latent distribution, so
// V is nonempty and contains an interior point.
template <class Engine>
falsiflow::SemiparametricModel random_semiparametric(Engine& eng, std::size_t nl, std::size_t ny,
                                                     std::size_t dm, double density = 0.5) {
  const Correspondence g = random_correspondence(eng, nl, ny, density);
  std::uniform_real_distribution<double> coef(-1.0, 1.0), w(0.1, 1.0);
  std::vector<double> nu0(nl);
  double total = 0.0;
  for (auto& v : nu0) total += (v = w(eng));
  for (auto& v : nu0) v /= total;
  std::vector<std::vector<double>> m(dm, std::vector<double>(nl));
  for (auto& row : m) {
    double mean = 0.0;
    for (std::size_t u = 0; u < nl; ++u) mean += nu0[u] * (row[u] = coef(eng));
    for (auto& v : row) v -= mean;
  }
  return falsiflow::SemiparametricModel(g, std::move(m), {"random", false});
}

template <class Engine>
FiniteDistribution random_distribution(Engine& eng, const std::vector<Label>& support,
                                       bool sparse = false) {
  return FiniteDistribution::from_numerators(support,
                                             oracle::random_masses(eng, support.size(), sparse));
}

}  // namespace gen

#endif  // FALSIFLOW_TESTS_GENERATORS_HPP
