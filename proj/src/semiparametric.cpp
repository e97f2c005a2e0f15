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

#include "falsiflow/semiparametric.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "falsiflow/lp.hpp"

namespace falsiflow {

SemiparametricModel::SemiparametricModel(Correspondence g,
                                         std::vector<std::vector<double>> moments,
                                         ModelMetadata metadata)
    : g_(std::move(g)), moments_(std::move(moments)), metadata_(std::move(metadata)) {
  for (const auto& row : moments_) {
    if (row.size() != g_.latent_size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "moment row has " + std::to_string(row.size()) +
                      " entries for " + std::to_string(g_.latent_size()) +
                      " latent atoms");
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kBadParameters, "moment values must be finite");
      }
    }
  }
}

SemiparametricModel SemiparametricModel::with_extra_outcomes(
    std::span<const Label> extra) const {
  return SemiparametricModel(g_.with_extra_outcomes(extra), moments_, metadata_);
}

SemiparametricModel pin_latent_distribution(const Correspondence& g,
                                            const FiniteDistribution& nu) {
  const std::vector<Mass> nu_mass = nu.aligned_to(g.latent_support());
  std::vector<std::vector<double>> rows(g.latent_size(),
                                        std::vector<double>(g.latent_size(), 0.0));
  for (std::size_t v = 0; v < g.latent_size(); ++v) {
    for (std::size_t u = 0; u < g.latent_size(); ++u) {
      rows[v][u] = (u == v ? 1.0 : 0.0) - to_probability(nu_mass[v]);
    }
  }
  return SemiparametricModel(g, std::move(rows), {"pinned", false});
}

namespace {

// Evaluates sum_y P(y) inf_u [c(y,u) - lambda' m(u)] with supergradient.
class DualEvaluator {
 public:
  DualEvaluator(const SemiparametricModel& model, std::vector<double> weights)
      : model_(model), weights_(std::move(weights)),
        shifted_(model.correspondence().latent_size()) {}

  std::size_t dimension() const { return model_.moment_count(); }

  DualValue operator()(std::span<const double> lambda) {
    const auto& g = model_.correspondence();
    const std::size_t nl = g.latent_size();
    const std::size_t d = model_.moment_count();
    std::fill(shifted_.begin(), shifted_.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      if (lambda[i] == 0.0) continue;
      const auto& row = model_.moments()[i];
      for (std::size_t u = 0; u < nl; ++u) shifted_[u] += lambda[i] * row[u];
    }
    DualValue out;
    out.supergradient.assign(d, 0.0);
    out.minimizers.assign(g.outcome_size(), 0);
    for (std::size_t y = 0; y < g.outcome_size(); ++y) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t u = 0; u < nl; ++u) {
        const double v = (g.image(u).contains(y) ? 0.0 : 1.0) - shifted_[u];
        if (v < best) {
          best = v;
          arg = u;
        }
      }
      out.minimizers[y] = arg;
      if (weights_[y] == 0.0) continue;
      out.value += weights_[y] * best;
      for (std::size_t i = 0; i < d; ++i) {
        out.supergradient[i] -= weights_[y] * model_.moment(i, arg);
      }
    }
    return out;
  }

 private:
  const SemiparametricModel& model_;
  std::vector<double> weights_;
  std::vector<double> shifted_;
};

std::vector<double> probabilities_on(const SemiparametricModel& model,
                                     const FiniteDistribution& p) {
  const auto masses = p.aligned_to(model.correspondence().outcome_support());
  std::vector<double> w(masses.size());
  for (std::size_t i = 0; i < masses.size(); ++i) w[i] = to_probability(masses[i]);
  return w;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct Cut {
  std::vector<double> at;
  double value;
  std::vector<double> slope;
};

struct AscentOutcome {
  double best = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  std::vector<double> lambda;
  std::vector<TraceEntry> trace;
  std::size_t iterations = 0;
  bool boundary = false;
};

std::string format_box(double box) {
  std::ostringstream s;
  s << box;
  return s.str();
}

bool meaningful_gain(double candidate, double incumbent) {
  return candidate > incumbent + 1e-12 * std::max(1.0, std::abs(incumbent));
}

bool on_boundary(std::span<const double> lambda, double box) {
  return std::any_of(lambda.begin(), lambda.end(), [box](double v) {
    return std::abs(v) >= box * (1.0 - 1e-9);
  });
}

// Kelley master: max t s.t. t <= f_c + g_c'(lambda - lambda_c), |lambda| <= box.
std::pair<std::vector<double>, double> kelley_master(const std::deque<Cut>& cuts,
                                                     std::size_t d, double box,
                                                     double floor) {
  lp::LinearProgram prog(d + 1);
  for (std::size_t i = 0; i < d; ++i) prog.set_lower_bound(i, -box);
  prog.set_lower_bound(d, floor);
  prog.set_objective(d, -1.0);
  std::vector<double> row(d + 1, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    std::fill(row.begin(), row.end(), 0.0);
    row[i] = 1.0;
    prog.add_row(row, lp::RowSense::kLessEqual, box);
  }
  for (const Cut& c : cuts) {
    double rhs = c.value;
    for (std::size_t i = 0; i < d; ++i) {
      row[i] = -c.slope[i];
      rhs -= c.slope[i] * c.at[i];
    }
    row[d] = 1.0;
    prog.add_row(row, lp::RowSense::kLessEqual, rhs);
  }
  const lp::Solution sol = lp::solve(prog);
  if (sol.status != lp::Status::kOptimal) {
    throw Error(ErrorCode::kLpFailure,
                "cutting-plane master returned " + lp::to_string(sol.status));
  }
  std::vector<double> lambda(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(d));
  for (double& v : lambda) v = std::clamp(v, -box, box);
  return {lambda, sol.x[d]};
}

// Smallest-norm point whose cutting-plane model reaches `target`.
std::vector<double> pull_back_master(const std::deque<Cut>& cuts, std::size_t d,
                                     double box, double target) {
  // Variables: lambda (d, shifted by -box), s >= 0.
  lp::LinearProgram prog(d + 1);
  for (std::size_t i = 0; i < d; ++i) prog.set_lower_bound(i, -box);
  prog.set_objective(d, 1.0);
  std::vector<double> row(d + 1, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    std::fill(row.begin(), row.end(), 0.0);
    row[i] = 1.0;
    row[d] = -1.0;
    prog.add_row(row, lp::RowSense::kLessEqual, 0.0);
    row[i] = -1.0;
    prog.add_row(row, lp::RowSense::kLessEqual, 0.0);
  }
  for (const Cut& c : cuts) {
    double rhs = target - c.value;
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      row[i] = c.slope[i];
      rhs += c.slope[i] * c.at[i];
    }
    prog.add_row(row, lp::RowSense::kGreaterEqual, rhs);
  }
  const lp::Solution sol = lp::solve(prog);
  if (sol.status != lp::Status::kOptimal) return {};
  std::vector<double> lambda(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(d));
  for (double& v : lambda) v = std::clamp(v, -box, box);
  return lambda;
}

AscentOutcome ascend(DualEvaluator& f, double box, const DualOptions& opt) {
  const std::size_t d = f.dimension();
  AscentOutcome out;
  std::vector<double> lambda(d, 0.0);
  std::deque<Cut> recent;
  constexpr std::size_t kRecentCuts = 32;

  DualValue cur = f(lambda);
  out.best = cur.value;
  out.lambda = lambda;
  Cut best_cut{lambda, cur.value, cur.supergradient};
  double window_best = out.best;
  std::size_t window_start = 0;

  for (std::size_t k = 0; k < opt.max_iterations; ++k) {
    if (k > 0) {
      cur = f(lambda);
      if (meaningful_gain(cur.value, out.best)) {
        out.best = cur.value;
        out.lambda = lambda;
        best_cut = {lambda, cur.value, cur.supergradient};
      }
    }
    const double gnorm = norm2(cur.supergradient);
    const double step = opt.step_scale / (static_cast<double>(k) + opt.step_offset);
    out.trace.push_back({cur.value, step, gnorm});
    ++out.iterations;
    recent.push_back({lambda, cur.value, cur.supergradient});
    if (recent.size() > kRecentCuts) recent.pop_front();
    if (gnorm == 0.0) break;  // zero supergradient: lambda is a maximizer
    if (k + 1 - window_start >= opt.stall_window) {
      if (out.best - window_best < opt.stall_tolerance) break;
      window_start = k + 1;
      window_best = out.best;
    }
    for (std::size_t i = 0; i < d; ++i) {
      lambda[i] = std::clamp(lambda[i] + step * cur.supergradient[i] / gnorm, -box, box);
    }
  }

  if (opt.refine && d > 0) {
    std::deque<Cut> cuts = recent;
    cuts.push_back(best_cut);
    const double floor = out.best - 1.0 - std::abs(out.best);
    for (std::size_t r = 0; r < opt.refine_iterations; ++r) {
      auto [candidate, upper] = kelley_master(cuts, d, box, floor);
      out.upper = std::min(out.upper, upper);
      if (out.upper - out.best <= opt.refine_tolerance * std::max(1.0, std::abs(out.best))) {
        break;
      }
      DualValue v = f(candidate);
      out.trace.push_back({v.value, 0.0, norm2(v.supergradient)});
      ++out.iterations;
      if (meaningful_gain(v.value, out.best)) {
        out.best = v.value;
        out.lambda = candidate;
      }
      cuts.push_back({std::move(candidate), v.value, std::move(v.supergradient)});
    }
    out.upper = std::max(out.upper, out.best);

    // Flat optimal faces can put the polished lambda on the box; look for a
    // near-optimal point of smaller norm before declaring boundary activity.
    if (on_boundary(out.lambda, box)) {
      const double target = out.best - 1e-10 * std::max(1.0, std::abs(out.best));
      for (int attempt = 0; attempt < 50; ++attempt) {
        std::vector<double> candidate = pull_back_master(cuts, d, box, target);
        if (candidate.empty()) break;
        DualValue v = f(candidate);
        ++out.iterations;
        out.trace.push_back({v.value, 0.0, norm2(v.supergradient)});
        if (v.value >= target) {
          if (!on_boundary(candidate, box)) {
            out.best = v.value;
            out.lambda = std::move(candidate);
          }
          break;
        }
        cuts.push_back({std::move(candidate), v.value, std::move(v.supergradient)});
      }
    }
  } else {
    out.upper = std::numeric_limits<double>::infinity();
  }
  out.boundary = on_boundary(out.lambda, box);
  return out;
}

}  // namespace

GLambda g_lambda(const SemiparametricModel& model, std::size_t outcome,
                 std::span<const double> lambda) {
  const auto& g = model.correspondence();
  if (outcome >= g.outcome_size()) {
    throw Error(ErrorCode::kUnknownOutcome, "outcome index out of range");
  }
  if (lambda.size() != model.moment_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "lambda has the wrong dimension");
  }
  GLambda out{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t u = 0; u < g.latent_size(); ++u) {
    double v = g.image(u).contains(outcome) ? 0.0 : 1.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) v -= lambda[i] * model.moment(i, u);
    if (v < out.value) out = {v, u};
  }
  return out;
}

GLambda g_lambda(const SemiparametricModel& model, const Label& y,
                 std::span<const double> lambda) {
  auto idx = model.correspondence().outcome_index(y);
  if (!idx) throw Error(ErrorCode::kUnknownOutcome, "unknown outcome '" + y.text + "'");
  return g_lambda(model, *idx, lambda);
}

DualValue dual_objective(const SemiparametricModel& model,
                         const FiniteDistribution& p,
                         std::span<const double> lambda) {
  if (lambda.size() != model.moment_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "lambda has the wrong dimension");
  }
  DualEvaluator f(model, probabilities_on(model, p));
  return f(lambda);
}

namespace {

// Indices of a maximal linearly independent subset of the moment rows, in
// order. Dependent rows add a lineality space to the dual that would let the
// ascent drift to the box boundary without changing the objective.
std::vector<std::size_t> independent_rows(const SemiparametricModel& model) {
  const std::size_t nl = model.correspondence().latent_size();
  std::vector<std::vector<double>> basis;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < model.moment_count(); ++i) {
    std::vector<double> v = model.moments()[i];
    const double norm0 = norm2(v);
    if (norm0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        double dot = 0.0;
        for (std::size_t u = 0; u < nl; ++u) dot += q[u] * v[u];
        for (std::size_t u = 0; u < nl; ++u) v[u] -= dot * q[u];
      }
    }
    const double norm = norm2(v);
    if (norm <= 1e-10 * norm0) continue;
    for (double& x : v) x /= norm;
    basis.push_back(std::move(v));
    keep.push_back(i);
  }
  return keep;
}

}  // namespace

DualCertificate maximize_dual(const SemiparametricModel& model,
                              const FiniteDistribution& p,
                              const DualOptions& options) {
  const std::vector<std::size_t> rows = independent_rows(model);
  const bool reduced = rows.size() < model.moment_count();
  SemiparametricModel reduced_model;
  if (reduced) {
    std::vector<std::vector<double>> m;
    for (std::size_t i : rows) m.push_back(model.moments()[i]);
    reduced_model = SemiparametricModel(model.correspondence(), std::move(m), model.metadata());
  }
  const SemiparametricModel& work = reduced ? reduced_model : model;
  auto expand = [&](const std::vector<double>& mu) {
    if (!reduced) return mu;
    std::vector<double> lambda(model.moment_count(), 0.0);
    for (std::size_t k = 0; k < rows.size(); ++k) lambda[rows[k]] = mu[k];
    return lambda;
  };

  DualEvaluator f(work, probabilities_on(work, p));
  AscentOutcome run = ascend(f, options.box, options);
  double box = options.box;
  bool escalated = false;
  if (run.boundary) {
    box *= 10.0;
    escalated = true;
    run = ascend(f, box, options);
  }

  DualCertificate cert;
  cert.T = run.best;
  cert.upper_bound = run.upper;
  cert.lambda = expand(run.lambda);
  cert.threshold = options.threshold;
  cert.compatible = run.best <= options.threshold;
  cert.trace = std::move(run.trace);
  cert.iterations = run.iterations;
  cert.box = box;
  cert.boundary_active = run.boundary;
  cert.escalated = escalated;
  const DualValue at_best = f(run.lambda);
  const auto& g = model.correspondence();
  for (std::size_t y = 0; y < g.outcome_size(); ++y) {
    cert.minimizers.emplace_back(g.outcome_support()[y],
                                 g.latent_support()[at_best.minimizers[y]]);
  }
  if (run.boundary) {
    throw DivergedError("dual maximizer stays on the box boundary at " +
                            format_box(box) + "; the supremum may be unbounded",
                        std::move(cert));
  }
  return cert;
}

PrimalResult primal_lp(const SemiparametricModel& model,
                       const FiniteDistribution& p) {
  const auto& g = model.correspondence();
  const std::vector<double> w = probabilities_on(model, p);
  const std::size_t nl = g.latent_size();
  std::vector<std::size_t> active;
  for (std::size_t y = 0; y < g.outcome_size(); ++y) {
    if (w[y] > 0.0) active.push_back(y);
  }
  const std::size_t ny = active.size();
  if (ny * nl > 100000) {
    throw Error(ErrorCode::kSupportTooLarge, "primal LP is beyond desk scale");
  }
  // Variable (k, u) at k * nl + u, k indexing active outcomes.
  lp::LinearProgram prog(ny * nl);
  for (std::size_t k = 0; k < ny; ++k) {
    for (std::size_t u = 0; u < nl; ++u) {
      prog.set_objective(k * nl + u, g.image(u).contains(active[k]) ? 0.0 : 1.0);
    }
  }
  std::vector<double> row(ny * nl, 0.0);
  for (std::size_t k = 0; k < ny; ++k) {
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t u = 0; u < nl; ++u) row[k * nl + u] = 1.0;
    prog.add_row(row, lp::RowSense::kEqual, w[active[k]]);
  }
  for (std::size_t i = 0; i < model.moment_count(); ++i) {
    for (std::size_t k = 0; k < ny; ++k) {
      for (std::size_t u = 0; u < nl; ++u) row[k * nl + u] = model.moment(i, u);
    }
    prog.add_row(row, lp::RowSense::kEqual, 0.0);
  }
  const lp::Solution sol = lp::solve(prog);
  if (sol.status == lp::Status::kInfeasible) {
    throw Error(ErrorCode::kInfeasible,
                "no latent distribution on the grid satisfies the moments");
  }
  if (sol.status != lp::Status::kOptimal) {
    throw Error(ErrorCode::kLpFailure, "primal LP returned " + lp::to_string(sol.status));
  }
  PrimalResult out;
  out.value = sol.objective;
  out.plan.assign(g.outcome_size(), std::vector<double>(nl, 0.0));
  out.latent_marginal.assign(nl, 0.0);
  for (std::size_t k = 0; k < ny; ++k) {
    for (std::size_t u = 0; u < nl; ++u) {
      const double v = sol.x[k * nl + u];
      out.plan[active[k]][u] = v;
      out.latent_marginal[u] += v;
    }
  }
  return out;
}

MomentDiagnostics moment_diagnostics(const SemiparametricModel& model) {
  MomentDiagnostics d;
  d.moment_count = model.moment_count();
  d.truncated_unbounded = model.metadata().truncated_unbounded;
  const auto& g = model.correspondence();
  for (std::size_t u = 0; u < g.latent_size(); ++u) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.moment_count; ++i) s += model.moment(i, u) * model.moment(i, u);
    d.max_norm = std::max(d.max_norm, std::sqrt(s));
  }
  if (d.moment_count == 0) {
    d.notes.emplace_back("no moment restrictions (d_m = 0): V is every distribution on the grid");
  } else {
    d.notes.emplace_back(
        "moments are bounded on a finite grid: uniform integrability, tightness "
        "and the Slater condition hold");
  }
  if (d.truncated_unbounded) {
    d.notes.emplace_back(
        "warning: the grid truncates an unbounded latent family; the infimum "
        "of the untruncated problem may not be attained");
  }
  return d;
}

}  // namespace falsiflow
