#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace climb {

// min c'x  s.t.  A x = b,  lower <= x <= upper
// Upper bounds may be +inf. Solved with a bounded-variable primal simplex
// using Bland's rule, so results are deterministic for identical inputs.
struct LpProblem {
  Eigen::VectorXd c;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Eigen::VectorXd x;
  double objective = std::numeric_limits<double>::quiet_NaN();
  // Equality rows that could not be met in phase 1.
  std::vector<int> violated_rows;
};

LpResult solve_lp(const LpProblem& prob, int max_iterations = 5000);

}  // namespace climb
