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

#ifndef FALSIFLOW_LP_HPP
#define FALSIFLOW_LP_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace falsiflow::lp {

enum class RowSense { kLessEqual, kEqual, kGreaterEqual };

enum class Status { kOptimal, kInfeasible, kUnbounded };

std::string to_string(Status status);

// min c'x  s.t.  A x (<=,=,>=) b,  x >= lower.  Dense row-major A.
class LinearProgram {
 public:
  explicit LinearProgram(std::size_t num_vars);

  std::size_t num_vars() const { return objective_.size(); }
  std::size_t num_rows() const { return rhs_.size(); }

  void set_objective(std::size_t j, double c) { objective_.at(j) = c; }
  void set_objective(std::vector<double> c);
  void set_lower_bound(std::size_t j, double lb) { lower_.at(j) = lb; }

  // Returns the new row's index.
  std::size_t add_row(std::span<const double> coefficients, RowSense sense,
                      double rhs);
  // Sparse convenience form: (column, coefficient) pairs.
  std::size_t add_sparse_row(
      std::span<const std::pair<std::size_t, double>> entries, RowSense sense,
      double rhs);

  const std::vector<double>& objective() const { return objective_; }
  const std::vector<double>& lower_bounds() const { return lower_; }
  const std::vector<double>& rhs() const { return rhs_; }
  const std::vector<RowSense>& senses() const { return senses_; }
  double coefficient(std::size_t row, std::size_t col) const {
    return matrix_[row * num_vars() + col];
  }
  std::span<const double> row(std::size_t i) const {
    return {matrix_.data() + i * num_vars(), num_vars()};
  }

 private:
  std::vector<double> objective_;
  std::vector<double> lower_;
  std::vector<double> matrix_;
  std::vector<double> rhs_;
  std::vector<RowSense> senses_;
};

struct Solution {
  Status status = Status::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;
  // Row multipliers y of the dual  max b'y + lower'r,  A'y + r = c,  r >= 0,
  // with y <= 0 on <= rows and y >= 0 on >= rows.
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  double dual_objective = 0.0;
  std::size_t iterations = 0;
  std::size_t bland_pivots = 0;
  // Residuals of the returned point, measured on the unscaled problem.
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double complementarity = 0.0;
};

struct Options {
  double feasibility_tolerance = 1e-9;
  double optimality_tolerance = 1e-9;
  double pivot_tolerance = 1e-10;
  std::size_t refactor_period = 64;
  // Zero means max(20000, 50 (m + n)).
  std::size_t iteration_limit = 0;
};

// Dense two-phase revised simplex. Dantzig pricing, switching to Bland's rule
// after 3 (m + n) consecutive degenerate pivots.
// Throws DimensionMismatch on inconsistent input, IterationLimit on stall.
Solution solve(const LinearProgram& problem, const Options& options = {});

}  // namespace falsiflow::lp

#endif  // FALSIFLOW_LP_HPP
