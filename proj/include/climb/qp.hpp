#pragma once

#include <Eigen/Dense>

namespace climb {

enum class QpStatus { kOptimal, kInfeasible, kDegenerate, kIterationLimit };

struct QpResult {
  QpStatus status = QpStatus::kInfeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  int active_constraints = 0;
};

// min 1/2 x'Gx + g0'x  s.t.  CE'x + ce0 = 0,  CI'x + ci0 >= 0
// G must be symmetric positive definite. Dual active-set method
// (Goldfarb-Idnani), so no feasible starting point is required.
QpResult solve_qp(const Eigen::MatrixXd& g, const Eigen::VectorXd& g0,
                  const Eigen::MatrixXd& ce, const Eigen::VectorXd& ce0,
                  const Eigen::MatrixXd& ci, const Eigen::VectorXd& ci0,
                  int max_iterations = 2000);

}  // namespace climb
