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

#ifndef FALSIFLOW_SEMIPARAMETRIC_HPP
#define FALSIFLOW_SEMIPARAMETRIC_HPP

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "falsiflow/correspondence.hpp"
#include "falsiflow/error.hpp"
#include "falsiflow/measure.hpp"

namespace falsiflow {

struct ModelMetadata {
  std::string name;
  // The latent grid truncates an unbounded latent space.
  bool truncated_unbounded = false;
};

// Correspondence G plus moment functions m_i evaluated on the latent grid.
// V = { nu on the grid : E_nu m_i(U) = 0 for every i }.
class SemiparametricModel {
 public:
  SemiparametricModel() = default;
  // moments[i][u] = m_i(u); every row has one entry per latent atom.
  SemiparametricModel(Correspondence g, std::vector<std::vector<double>> moments,
                      ModelMetadata metadata = {});

  const Correspondence& correspondence() const { return g_; }
  std::size_t moment_count() const { return moments_.size(); }
  const std::vector<std::vector<double>>& moments() const { return moments_; }
  double moment(std::size_t i, std::size_t u) const { return moments_[i][u]; }
  const ModelMetadata& metadata() const { return metadata_; }

  SemiparametricModel with_extra_outcomes(std::span<const Label> extra) const;

 private:
  Correspondence g_;
  std::vector<std::vector<double>> moments_;
  ModelMetadata metadata_;
};

// Indicator moments m_v(u) = 1{u = v} - nu(v) that pin V down to {nu}.
SemiparametricModel pin_latent_distribution(const Correspondence& g,
                                            const FiniteDistribution& nu);

struct GLambda {
  double value = 0.0;
  std::size_t argmin = 0;  // latent index, smallest on ties
};

// inf_u [1{y not in G(u)} - lambda' m(u)].
GLambda g_lambda(const SemiparametricModel& model, const Label& y,
                 std::span<const double> lambda);
GLambda g_lambda(const SemiparametricModel& model, std::size_t outcome,
                 std::span<const double> lambda);

struct DualValue {
  double value = 0.0;
  std::vector<double> supergradient;
  std::vector<std::size_t> minimizers;  // per outcome of the model
};

// sum_y P(y) g_lambda(y) and the supergradient -sum_y P(y) m(u*(y)).
DualValue dual_objective(const SemiparametricModel& model,
                         const FiniteDistribution& p,
                         std::span<const double> lambda);

struct DualOptions {
  double box = 1e3;
  double step_scale = 1.0;   // step a / (k + b)
  double step_offset = 10.0;
  std::size_t max_iterations = 100000;
  std::size_t stall_window = 500;
  double stall_tolerance = 1e-10;
  double threshold = 1e-6;
  // Cutting-plane polish of the ascent iterate.
  bool refine = true;
  std::size_t refine_iterations = 400;
  double refine_tolerance = 1e-11;
};

struct TraceEntry {
  double objective;
  double step;
  double supergradient_norm;
};

struct DualCertificate {
  double T = 0.0;
  // Cutting-plane upper bound on the supremum within the box.
  double upper_bound = 0.0;
  std::vector<double> lambda;
  bool compatible = true;
  double threshold = 1e-6;
  std::vector<std::pair<Label, Label>> minimizers;  // outcome -> latent
  std::vector<TraceEntry> trace;
  std::size_t iterations = 0;
  double box = 0.0;
  bool boundary_active = false;
  bool escalated = false;
};

// Raised when the maximizer stays on the box boundary after escalation.
class DivergedError : public Error {
 public:
  DivergedError(const std::string& what, DualCertificate certificate)
      : Error(ErrorCode::kDiverged, what), certificate_(std::move(certificate)) {}
  const DualCertificate& certificate() const { return certificate_; }

 private:
  DualCertificate certificate_;
};

// Projected supergradient ascent on the box ||lambda||_inf <= box, polished by
// a cutting-plane phase; T is always the objective at a returned lambda.
DualCertificate maximize_dual(const SemiparametricModel& model,
                              const FiniteDistribution& p,
                              const DualOptions& options = {});

struct PrimalResult {
  double value = 0.0;
  // pi[y][u] over the model's outcome and latent supports.
  std::vector<std::vector<double>> plan;
  std::vector<double> latent_marginal;
};

// min pi(y not in G(u)) s.t. sum_u pi(y,u) = P(y), sum pi(y,u) m_i(u) = 0.
// Throws Infeasible when no latent distribution on the grid meets the moments.
PrimalResult primal_lp(const SemiparametricModel& model,
                       const FiniteDistribution& p);

struct MomentDiagnostics {
  std::size_t moment_count = 0;
  double max_norm = 0.0;  // max_u ||m(u)||_2
  bool bounded = true;
  bool assumptions_hold = true;  // uniform integrability, tightness, Slater
  bool truncated_unbounded = false;
  std::vector<std::string> notes;
};

MomentDiagnostics moment_diagnostics(const SemiparametricModel& model);

}  // namespace falsiflow

#endif  // FALSIFLOW_SEMIPARAMETRIC_HPP
