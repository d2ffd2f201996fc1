#include "climb/qp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace climb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Rotates J columns so the tail of d collapses into d(q); the leading part
// becomes the new column of R.
void add_column(Eigen::MatrixXd& j_mat, Eigen::VectorXd& d, int q) {
  const int n = static_cast<int>(d.size());
  for (int k = n - 1; k > q; --k) {
    double a = d(k - 1), b = d(k);
    const double h = std::hypot(a, b);
    if (h == 0.0) continue;
    const double c = a / h, s = b / h;
    d(k - 1) = h;
    d(k) = 0.0;
    for (int r = 0; r < n; ++r) {
      const double t1 = j_mat(r, k - 1), t2 = j_mat(r, k);
      j_mat(r, k - 1) = c * t1 + s * t2;
      j_mat(r, k) = -s * t1 + c * t2;
    }
  }
}

}  // namespace

QpResult solve_qp(const Eigen::MatrixXd& g_in, const Eigen::VectorXd& g0_in,
                  const Eigen::MatrixXd& ce_in, const Eigen::VectorXd& ce0_in,
                  const Eigen::MatrixXd& ci_in, const Eigen::VectorXd& ci0_in,
                  int max_iterations) {
  const int n = static_cast<int>(g_in.rows());
  const int m_eq = static_cast<int>(ce_in.cols());
  const int m_in = static_cast<int>(ci_in.cols());
  QpResult res;

  // Equilibrate: unit Hessian diagonal and unit constraint normals, so the
  // pivot tolerances below are meaningful regardless of problem scaling.
  Eigen::VectorXd dscale(n);
  for (int i = 0; i < n; ++i) dscale(i) = 1.0 / std::sqrt(std::max(g_in(i, i), 1e-300));
  const Eigen::MatrixXd g = dscale.asDiagonal() * g_in * dscale.asDiagonal();
  const Eigen::VectorXd g0 = dscale.asDiagonal() * g0_in;
  Eigen::MatrixXd ce = dscale.asDiagonal() * ce_in;
  Eigen::VectorXd ce0 = ce0_in;
  Eigen::MatrixXd ci = dscale.asDiagonal() * ci_in;
  Eigen::VectorXd ci0 = ci0_in;
  for (int k = 0; k < m_eq; ++k) {
    const double s = ce.col(k).norm();
    if (s > 1e-300) {
      ce.col(k) /= s;
      ce0(k) /= s;
    }
  }
  for (int k = 0; k < m_in; ++k) {
    const double s = ci.col(k).norm();
    if (s > 1e-300) {
      ci.col(k) /= s;
      ci0(k) /= s;
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) {
    res.status = QpStatus::kDegenerate;
    return res;
  }
  // J = L^{-T}: the unconstrained metric for constraint normals.
  Eigen::MatrixXd j_mat = llt.matrixL().transpose().solve(Eigen::MatrixXd::Identity(n, n));

  Eigen::VectorXd x = -llt.solve(g0);

  Eigen::MatrixXd r_mat = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> active;       // constraint ids: 0..m_eq-1 eq, then m_eq+i for ineq i
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n + 1);
  const double tol = 1e-10;

  auto constraint_normal = [&](int id) -> Eigen::VectorXd {
    return id < m_eq ? ce.col(id) : ci.col(id - m_eq);
  };
  auto constraint_value = [&](int id, const Eigen::VectorXd& xx) {
    return id < m_eq ? ce.col(id).dot(xx) + ce0(id) : ci.col(id - m_eq).dot(xx) + ci0(id - m_eq);
  };

  int q = 0;
  auto drop_constraint = [&](int pos) {
    // Remove active constraint at position `pos`, re-triangularizing R.
    for (int k = pos; k + 1 < q; ++k) {
      active[k] = active[k + 1];
      u(k) = u(k + 1);
      r_mat.col(k) = r_mat.col(k + 1);
    }
    --q;
    active.resize(q);
    // Givens to clear the subdiagonal entries introduced by the shift.
    for (int k = pos; k < q; ++k) {
      double a = r_mat(k, k), b = r_mat(k + 1, k);
      const double h = std::hypot(a, b);
      if (h == 0.0) continue;
      const double c = a / h, s = b / h;
      for (int col = k; col < q; ++col) {
        const double t1 = r_mat(k, col), t2 = r_mat(k + 1, col);
        r_mat(k, col) = c * t1 + s * t2;
        r_mat(k + 1, col) = -s * t1 + c * t2;
      }
      for (int row = 0; row < n; ++row) {
        const double t1 = j_mat(row, k), t2 = j_mat(row, k + 1);
        j_mat(row, k) = c * t1 + s * t2;
        j_mat(row, k + 1) = -s * t1 + c * t2;
      }
    }
    r_mat.col(q).setZero();
  };

  // Pending constraint loop: equalities first (forced), then the most
  // violated inequality until none remain.
  int iter = 0;
  int pending_eq = 0;
  while (true) {
    if (++iter > max_iterations) {
      res.status = QpStatus::kIterationLimit;
      return res;
    }
    int p = -1;
    double worst = -tol;
    if (pending_eq < m_eq) {
      p = pending_eq;
    } else {
      for (int i = 0; i < m_in; ++i) {
        bool is_active = false;
        for (int a : active)
          if (a == m_eq + i) is_active = true;
        if (is_active) continue;
        const double s = constraint_value(m_eq + i, x);
        if (s < worst) {
          worst = s;
          p = m_eq + i;
        }
      }
      if (p < 0) {
        res.status = QpStatus::kOptimal;
        res.x = dscale.asDiagonal() * x;
        res.objective = 0.5 * res.x.dot(g_in * res.x) + g0_in.dot(res.x);
        res.active_constraints = q;
        return res;
      }
    }

    const Eigen::VectorXd np = constraint_normal(p);
    double u_plus = 0.0;

    // Inner loop: take primal/dual steps until p becomes active or the
    // problem proves infeasible.
    while (true) {
      if (++iter > max_iterations) {
        res.status = QpStatus::kIterationLimit;
        return res;
      }
      Eigen::VectorXd d = j_mat.transpose() * np;
      Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
      for (int k = q; k < n; ++k) z += j_mat.col(k) * d(k);
      Eigen::VectorXd r = Eigen::VectorXd::Zero(q);
      if (q > 0) {
        r = r_mat.topLeftCorner(q, q)
                .triangularView<Eigen::Upper>()
                .solve(d.head(q));
      }

      // Longest dual step that keeps inequality duals non-negative.
      double t1 = kInf;
      int drop = -1;
      for (int k = 0; k < q; ++k) {
        if (active[k] >= m_eq && r(k) > tol) {
          const double ratio = u(k) / r(k);
          if (ratio < t1) {
            t1 = ratio;
            drop = k;
          }
        }
      }
      const double znorm2 = z.squaredNorm();
      const double sp = constraint_value(p, x);
      double t2 = kInf;
      if (znorm2 > tol * tol) t2 = -sp / z.dot(np);
      const double t = std::min(t1, t2);

      if (t == kInf) {
        res.status = QpStatus::kInfeasible;  // constraints are inconsistent
        return res;
      }

      if (t2 == kInf) {
        // Dual-only step.
        for (int k = 0; k < q; ++k) u(k) -= t * r(k);
        u_plus += t;
        drop_constraint(drop);
        continue;
      }

      x += t * z;
      for (int k = 0; k < q; ++k) u(k) -= t * r(k);
      u_plus += t;

      if (t == t2) {
        // Constraint p enters the active set.
        add_column(j_mat, d, q);
        r_mat.col(q).head(q + 1) = d.head(q + 1);
        if (std::abs(d(q)) < tol) {
          res.status = QpStatus::kDegenerate;  // linearly dependent normal
          return res;
        }
        u(q) = u_plus;
        active.push_back(p);
        ++q;
        if (p < m_eq) ++pending_eq;
        break;
      }
      drop_constraint(drop);
    }
  }
}

}  // namespace climb
