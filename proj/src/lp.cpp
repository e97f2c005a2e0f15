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

#include "falsiflow/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "falsiflow/error.hpp"

namespace falsiflow::lp {

std::string to_string(Status status) {
  switch (status) {
    case Status::kOptimal: return "Optimal";
    case Status::kInfeasible: return "Infeasible";
    case Status::kUnbounded: return "Unbounded";
  }
  return "Unknown";
}

LinearProgram::LinearProgram(std::size_t num_vars)
    : objective_(num_vars, 0.0), lower_(num_vars, 0.0) {}

void LinearProgram::set_objective(std::vector<double> c) {
  if (c.size() != num_vars()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "objective has " + std::to_string(c.size()) + " entries, " +
                    "expected " + std::to_string(num_vars()));
  }
  objective_ = std::move(c);
}

std::size_t LinearProgram::add_row(std::span<const double> coefficients,
                                   RowSense sense, double rhs) {
  if (coefficients.size() != num_vars()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "row has " + std::to_string(coefficients.size()) +
                    " coefficients, expected " + std::to_string(num_vars()));
  }
  matrix_.insert(matrix_.end(), coefficients.begin(), coefficients.end());
  rhs_.push_back(rhs);
  senses_.push_back(sense);
  return rhs_.size() - 1;
}

std::size_t LinearProgram::add_sparse_row(
    std::span<const std::pair<std::size_t, double>> entries, RowSense sense,
    double rhs) {
  std::vector<double> dense(num_vars(), 0.0);
  for (const auto& [j, v] : entries) {
    if (j >= num_vars()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "column " + std::to_string(j) + " out of range");
    }
    dense[j] += v;
  }
  return add_row(dense, sense, rhs);
}

namespace {

// Standard-form working problem:  min c'z,  M z = b,  z >= 0,  b >= 0.
class Simplex {
 public:
  Simplex(const LinearProgram& lp, const Options& options)
      : lp_(lp), opt_(options) {
    validate();
    build();
  }

  Solution run() {
    Solution sol;
    if (trivially_infeasible_) {
      sol.status = Status::kInfeasible;
      return sol;
    }
    // Phase I.
    std::vector<double> phase1(num_cols_, 0.0);
    for (std::size_t j = first_art_; j < num_cols_; ++j) phase1[j] = 1.0;
    allow_artificial_entry_ = false;
    if (first_art_ < num_cols_) {
      iterate(phase1, /*phase_two=*/false);
      double infeasibility = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] >= first_art_) infeasibility += x_basic_[i];
      }
      if (infeasibility > opt_.feasibility_tolerance * std::max<double>(1.0, m_)) {
        sol.status = Status::kInfeasible;
        sol.iterations = iterations_;
        sol.bland_pivots = bland_pivots_;
        return sol;
      }
      drive_out_artificials();
    }
    // Phase II on the scaled objective.
    std::vector<double> phase2(num_cols_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) phase2[j] = cost_[j];
    const bool bounded = iterate(phase2, /*phase_two=*/true);
    sol.iterations = iterations_;
    sol.bland_pivots = bland_pivots_;
    sol.status = bounded ? Status::kOptimal : Status::kUnbounded;
    extract(phase2, sol);
    return sol;
  }

 private:
  void validate() const {
    const std::size_t n = lp_.num_vars();
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(lp_.objective()[j]) ||
          !std::isfinite(lp_.lower_bounds()[j])) {
        throw Error(ErrorCode::kBadParameters, "non-finite objective or bound");
      }
    }
    for (std::size_t i = 0; i < lp_.num_rows(); ++i) {
      if (!std::isfinite(lp_.rhs()[i])) {
        throw Error(ErrorCode::kBadParameters, "non-finite right-hand side");
      }
      for (double a : lp_.row(i)) {
        if (!std::isfinite(a)) {
          throw Error(ErrorCode::kBadParameters, "non-finite coefficient");
        }
      }
    }
  }

  void build() {
    n_ = lp_.num_vars();
    const std::size_t rows = lp_.num_rows();
    double cmax = 0.0;
    for (double c : lp_.objective()) cmax = std::max(cmax, std::abs(c));
    cost_scale_ = cmax > 0.0 ? cmax : 1.0;
    cost_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) cost_[j] = lp_.objective()[j] / cost_scale_;

    // Shift by lower bounds, scale rows to unit infinity norm, drop empty
    // rows after checking them.
    struct Working {
      std::size_t source;
      double scale;
      double sign;
      double rhs;
      RowSense sense;
    };
    std::vector<Working> work;
    for (std::size_t i = 0; i < rows; ++i) {
      auto a = lp_.row(i);
      double shifted = lp_.rhs()[i];
      double amax = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        shifted -= a[j] * lp_.lower_bounds()[j];
        amax = std::max(amax, std::abs(a[j]));
      }
      if (amax == 0.0) {
        const double tol = opt_.feasibility_tolerance;
        const RowSense s = lp_.senses()[i];
        const bool ok = (s == RowSense::kLessEqual && shifted >= -tol) ||
                        (s == RowSense::kGreaterEqual && shifted <= tol) ||
                        (s == RowSense::kEqual && std::abs(shifted) <= tol);
        if (!ok) trivially_infeasible_ = true;
        continue;
      }
      double b = shifted / amax;
      double sign = b < 0.0 ? -1.0 : 1.0;
      work.push_back({i, amax, sign, b * sign, lp_.senses()[i]});
    }
    m_ = work.size();
    row_source_.resize(m_);
    row_scale_.resize(m_);
    row_sign_.resize(m_);

    std::size_t num_slack = 0;
    for (const auto& w : work) num_slack += (w.sense != RowSense::kEqual);
    // Rows whose slack enters the starting basis need no artificial.
    std::vector<int> slack_of(m_, -1);
    std::vector<bool> needs_art(m_, true);
    std::size_t next_slack = n_;
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& w = work[i];
      if (w.sense == RowSense::kEqual) continue;
      slack_of[i] = static_cast<int>(next_slack++);
      const double coef = (w.sense == RowSense::kLessEqual ? 1.0 : -1.0) * w.sign;
      if (coef > 0.0) needs_art[i] = false;
    }
    first_art_ = n_ + num_slack;
    std::size_t num_art = 0;
    for (std::size_t i = 0; i < m_; ++i) num_art += needs_art[i];
    num_cols_ = first_art_ + num_art;

    mat_.assign(m_ * num_cols_, 0.0);
    b_.resize(m_);
    basis_.assign(m_, 0);
    std::size_t next_art = first_art_;
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& w = work[i];
      row_source_[i] = w.source;
      row_scale_[i] = w.scale;
      row_sign_[i] = w.sign;
      auto a = lp_.row(w.source);
      const double f = w.sign / w.scale;
      for (std::size_t j = 0; j < n_; ++j) at(i, j) = a[j] * f;
      if (slack_of[i] >= 0) {
        at(i, slack_of[i]) =
            (w.sense == RowSense::kLessEqual ? 1.0 : -1.0) * w.sign;
      }
      b_[i] = w.rhs;
      if (needs_art[i]) {
        at(i, next_art) = 1.0;
        basis_[i] = next_art++;
      } else {
        basis_[i] = static_cast<std::size_t>(slack_of[i]);
      }
    }
    in_basis_.assign(num_cols_, false);
    for (auto j : basis_) in_basis_[j] = true;
    binv_.assign(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) binv_[i * m_ + i] = 1.0;
    x_basic_ = b_;
    limit_ = opt_.iteration_limit != 0
                 ? opt_.iteration_limit
                 : std::max<std::size_t>(20000, 50 * (m_ + num_cols_));
  }

  double& at(std::size_t i, std::size_t j) { return mat_[i * num_cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return mat_[i * num_cols_ + j]; }

  void refactor() {
    // Gauss-Jordan inverse of the basis matrix with partial pivoting.
    std::vector<double> work(m_ * 2 * m_, 0.0);
    const std::size_t w = 2 * m_;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t k = 0; k < m_; ++k) work[i * w + k] = at(i, basis_[k]);
      work[i * w + m_ + i] = 1.0;
    }
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < m_; ++r) {
        if (std::abs(work[r * w + c]) > std::abs(work[piv * w + c])) piv = r;
      }
      if (std::abs(work[piv * w + c]) < 1e-13) {
        throw Error(ErrorCode::kLpFailure, "basis matrix became singular");
      }
      if (piv != c) {
        for (std::size_t k = 0; k < w; ++k) std::swap(work[c * w + k], work[piv * w + k]);
      }
      const double inv = 1.0 / work[c * w + c];
      for (std::size_t k = 0; k < w; ++k) work[c * w + k] *= inv;
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double f = work[r * w + c];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < w; ++k) work[r * w + k] -= f * work[c * w + k];
      }
    }
    // Row k of the inverse belongs to basis position k.
    for (std::size_t k = 0; k < m_; ++k) {
      for (std::size_t i = 0; i < m_; ++i) binv_[k * m_ + i] = work[k * w + m_ + i];
    }
    for (std::size_t k = 0; k < m_; ++k) {
      double v = 0.0;
      for (std::size_t i = 0; i < m_; ++i) v += binv_[k * m_ + i] * b_[i];
      x_basic_[k] = std::max(v, 0.0);
    }
  }

  std::vector<double> prices(const std::vector<double>& c) const {
    std::vector<double> y(m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      const double cb = c[basis_[k]];
      if (cb == 0.0) continue;
      for (std::size_t i = 0; i < m_; ++i) y[i] += cb * binv_[k * m_ + i];
    }
    return y;
  }

  std::vector<double> column_direction(std::size_t q) const {
    std::vector<double> w(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = at(i, q);
      if (a == 0.0) continue;
      for (std::size_t k = 0; k < m_; ++k) w[k] += binv_[k * m_ + i] * a;
    }
    return w;
  }

  void pivot(std::size_t r, std::size_t q, const std::vector<double>& w,
             double theta) {
    for (std::size_t k = 0; k < m_; ++k) {
      if (k == r) continue;
      x_basic_[k] -= theta * w[k];
      if (x_basic_[k] < 0.0) x_basic_[k] = 0.0;
    }
    x_basic_[r] = theta;
    const double inv = 1.0 / w[r];
    double* row_r = &binv_[r * m_];
    for (std::size_t i = 0; i < m_; ++i) row_r[i] *= inv;
    for (std::size_t k = 0; k < m_; ++k) {
      if (k == r || w[k] == 0.0) continue;
      double* row_k = &binv_[k * m_];
      const double f = w[k];
      for (std::size_t i = 0; i < m_; ++i) row_k[i] -= f * row_r[i];
    }
    in_basis_[basis_[r]] = false;
    basis_[r] = q;
    in_basis_[q] = true;
    ++iterations_;
    if (iterations_ % opt_.refactor_period == 0) refactor();
  }

  // Returns false when the phase objective is unbounded below.
  bool iterate(const std::vector<double>& c, bool phase_two) {
    bool bland = false;
    std::size_t degenerate_run = 0;
    const std::size_t bland_trigger = 3 * (m_ + num_cols_);
    const std::size_t eligible_end = phase_two ? first_art_ : num_cols_;
    for (;;) {
      if (iterations_ >= limit_) {
        throw Error(ErrorCode::kIterationLimit,
                    "simplex stopped after " + std::to_string(iterations_) +
                        " iterations (m=" + std::to_string(m_) +
                        ", n=" + std::to_string(num_cols_) +
                        ", bland=" + (bland ? "on" : "off") + ")");
      }
      const std::vector<double> y = prices(c);
      std::size_t entering = num_cols_;
      double best = -opt_.optimality_tolerance;
      for (std::size_t j = 0; j < eligible_end; ++j) {
        if (in_basis_[j]) continue;
        if (!phase_two && j >= first_art_ && !allow_artificial_entry_) continue;
        double d = c[j];
        for (std::size_t i = 0; i < m_; ++i) d -= y[i] * at(i, j);
        if (bland) {
          if (d < -opt_.optimality_tolerance) {
            entering = j;
            break;
          }
        } else if (d < best) {
          best = d;
          entering = j;
        }
      }
      if (entering == num_cols_) return true;

      const std::vector<double> w = column_direction(entering);
      // Harris two-pass ratio test.
      double bound = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < m_; ++k) {
        if (w[k] > opt_.pivot_tolerance) {
          bound = std::min(bound, (x_basic_[k] + opt_.feasibility_tolerance) / w[k]);
        }
      }
      if (!std::isfinite(bound)) return false;
      std::size_t leaving = m_;
      for (std::size_t k = 0; k < m_; ++k) {
        if (w[k] <= opt_.pivot_tolerance) continue;
        if (x_basic_[k] / w[k] > bound) continue;
        if (leaving == m_) {
          leaving = k;
        } else if (bland) {
          if (basis_[k] < basis_[leaving]) leaving = k;
        } else if (w[k] > w[leaving]) {
          leaving = k;
        }
      }
      const double theta = std::max(x_basic_[leaving] / w[leaving], 0.0);
      if (theta <= opt_.feasibility_tolerance) {
        if (++degenerate_run >= bland_trigger) bland = true;
      } else {
        degenerate_run = 0;
      }
      if (bland) ++bland_pivots_;
      pivot(leaving, entering, w, theta);
    }
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < first_art_) continue;
      std::size_t best_j = num_cols_;
      double best_abs = 1e-9;
      for (std::size_t j = 0; j < first_art_; ++j) {
        if (in_basis_[j]) continue;
        double alpha = 0.0;
        for (std::size_t i = 0; i < m_; ++i) alpha += binv_[r * m_ + i] * at(i, j);
        if (std::abs(alpha) > best_abs) {
          best_abs = std::abs(alpha);
          best_j = j;
        }
      }
      // No candidate: the row is redundant and the artificial stays at zero.
      if (best_j == num_cols_) continue;
      const std::vector<double> w = column_direction(best_j);
      const double theta = x_basic_[r] / w[r];
      for (std::size_t k = 0; k < m_; ++k) {
        if (k != r) x_basic_[k] -= theta * w[k];
      }
      x_basic_[r] = theta;
      const double inv = 1.0 / w[r];
      for (std::size_t i = 0; i < m_; ++i) binv_[r * m_ + i] *= inv;
      for (std::size_t k = 0; k < m_; ++k) {
        if (k == r || w[k] == 0.0) continue;
        for (std::size_t i = 0; i < m_; ++i) {
          binv_[k * m_ + i] -= w[k] * binv_[r * m_ + i];
        }
      }
      in_basis_[basis_[r]] = false;
      basis_[r] = best_j;
      in_basis_[best_j] = true;
    }
    refactor();
  }

  void extract(const std::vector<double>& c, Solution& sol) const {
    std::vector<double> z(num_cols_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) z[basis_[k]] = x_basic_[k];
    sol.x.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) sol.x[j] = lp_.lower_bounds()[j] + z[j];

    const std::vector<double> y_scaled = prices(c);
    const std::size_t rows = lp_.num_rows();
    sol.duals.assign(rows, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      sol.duals[row_source_[i]] =
          y_scaled[i] * row_sign_[i] / row_scale_[i] * cost_scale_;
    }
    sol.reduced_costs.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      double r = lp_.objective()[j];
      for (std::size_t i = 0; i < rows; ++i) r -= sol.duals[i] * lp_.coefficient(i, j);
      sol.reduced_costs[j] = r;
    }
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) sol.objective += lp_.objective()[j] * sol.x[j];
    sol.dual_objective = 0.0;
    for (std::size_t i = 0; i < rows; ++i) sol.dual_objective += lp_.rhs()[i] * sol.duals[i];
    for (std::size_t j = 0; j < n_; ++j) {
      sol.dual_objective += lp_.lower_bounds()[j] * sol.reduced_costs[j];
    }

    double primal = 0.0, dual = 0.0, comp = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      primal = std::max(primal, lp_.lower_bounds()[j] - sol.x[j]);
      dual = std::max(dual, -sol.reduced_costs[j]);
      comp = std::max(comp, std::abs(sol.reduced_costs[j] *
                                     (sol.x[j] - lp_.lower_bounds()[j])));
    }
    for (std::size_t i = 0; i < rows; ++i) {
      double ax = 0.0;
      for (std::size_t j = 0; j < n_; ++j) ax += lp_.coefficient(i, j) * sol.x[j];
      const double slack = lp_.rhs()[i] - ax;
      const double y = sol.duals[i];
      switch (lp_.senses()[i]) {
        case RowSense::kLessEqual:
          primal = std::max(primal, -slack);
          dual = std::max(dual, y);
          break;
        case RowSense::kGreaterEqual:
          primal = std::max(primal, slack);
          dual = std::max(dual, -y);
          break;
        case RowSense::kEqual:
          primal = std::max(primal, std::abs(slack));
          break;
      }
      comp = std::max(comp, std::abs(y * slack));
    }
    sol.primal_residual = primal;
    sol.dual_residual = dual;
    sol.complementarity = comp;
  }

  const LinearProgram& lp_;
  Options opt_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t num_cols_ = 0;
  std::size_t first_art_ = 0;
  bool trivially_infeasible_ = false;
  bool allow_artificial_entry_ = false;
  double cost_scale_ = 1.0;
  std::vector<double> cost_;
  std::vector<double> mat_;
  std::vector<double> b_;
  std::vector<std::size_t> row_source_;
  std::vector<double> row_scale_;
  std::vector<double> row_sign_;
  std::vector<std::size_t> basis_;
  std::vector<bool> in_basis_;
  std::vector<double> binv_;
  std::vector<double> x_basic_;
  std::size_t iterations_ = 0;
  std::size_t bland_pivots_ = 0;
  std::size_t limit_ = 0;
};

}  // namespace

Solution solve(const LinearProgram& problem, const Options& options) {
  Simplex simplex(problem, options);
  return simplex.run();
}

}  // namespace falsiflow::lp
