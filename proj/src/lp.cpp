#include "climb/lp.hpp"

#include <cmath>
#include <stdexcept>

namespace climb {

namespace {

constexpr double kTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarState { kBasic, kAtLower, kAtUpper };

struct Tableau {
  Eigen::MatrixXd a;       // m x n (columns for all variables incl. artificials)
  Eigen::VectorXd b;       // m
  Eigen::VectorXd lo, hi;  // n
  Eigen::VectorXd x;       // n, current values
  std::vector<VarState> state;
  std::vector<int> basis;  // m basic columns

  int rows() const { return static_cast<int>(a.rows()); }
  int cols() const { return static_cast<int>(a.cols()); }
};

// One simplex phase over the given costs. Returns false on iteration limit.
bool run_simplex(Tableau& t, const Eigen::VectorXd& cost, int max_iter, bool* unbounded) {
  *unbounded = false;
  const int m = t.rows();
  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::MatrixXd basis_mat(m, m);
    for (int i = 0; i < m; ++i) basis_mat.col(i) = t.a.col(t.basis[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_mat);

    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) cb(i) = cost(t.basis[i]);
    const Eigen::VectorXd y = lu.transpose().solve(cb);

    // Bland: smallest eligible index enters (fixed-range variables never do).
    int enter = -1;
    bool from_lower = true;
    for (int j = 0; j < t.cols(); ++j) {
      if (t.state[j] == VarState::kBasic || t.hi(j) - t.lo(j) < kTol) continue;
      const double d = cost(j) - t.a.col(j).dot(y);
      if (t.state[j] == VarState::kAtLower && d < -kTol) {
        enter = j;
        from_lower = true;
        break;
      }
      if (t.state[j] == VarState::kAtUpper && d > kTol) {
        enter = j;
        from_lower = false;
        break;
      }
    }
    if (enter < 0) return true;  // optimal

    const Eigen::VectorXd w = lu.solve(t.a.col(enter));
    const double dir = from_lower ? 1.0 : -1.0;  // movement of entering variable

    double t_max = t.hi(enter) - t.lo(enter);  // bound flip distance
    int leave = -1;                            // -1 means bound flip
    for (int i = 0; i < m; ++i) {
      // x_basis[i] changes by -dir * w(i) * step
      const double delta = -dir * w(i);
      const int bj = t.basis[i];
      double lim = kInf;
      if (delta < -kTol) {
        lim = (t.x(bj) - t.lo(bj)) / (-delta);
      } else if (delta > kTol) {
        lim = t.hi(bj) == kInf ? kInf : (t.hi(bj) - t.x(bj)) / delta;
      }
      if (lim < 0.0) lim = 0.0;
      if (lim < t_max - 1e-12) {
        t_max = lim;
        leave = i;
      } else if (leave >= 0 && lim <= t_max + 1e-12 && bj < t.basis[leave]) {
        leave = i;  // Bland tie-break on the leaving index
      }
    }
    if (t_max == kInf) {
      *unbounded = true;
      return true;
    }

    // Apply the step.
    t.x(enter) += dir * t_max;
    for (int i = 0; i < m; ++i) t.x(t.basis[i]) -= dir * w(i) * t_max;

    if (leave < 0) {
      // Entering variable flipped to its other bound; basis unchanged.
      t.state[enter] = from_lower ? VarState::kAtUpper : VarState::kAtLower;
      t.x(enter) = from_lower ? t.hi(enter) : t.lo(enter);
    } else {
      const int out = t.basis[leave];
      const double delta = -dir * w(leave);
      t.state[out] = delta < 0 ? VarState::kAtLower : VarState::kAtUpper;
      t.x(out) = delta < 0 ? t.lo(out) : (t.hi(out) == kInf ? t.x(out) : t.hi(out));
      t.basis[leave] = enter;
      t.state[enter] = VarState::kBasic;
    }
  }
  return false;
}

}  // namespace

LpResult solve_lp(const LpProblem& prob, int max_iterations) {
  const int m = static_cast<int>(prob.a_eq.rows());
  const int n = static_cast<int>(prob.c.size());
  if (prob.a_eq.cols() != n || prob.b_eq.size() != m || prob.lower.size() != n ||
      prob.upper.size() != n)
    throw std::invalid_argument("lp: inconsistent problem dimensions");

  LpResult res;
  for (int j = 0; j < n; ++j) {
    if (prob.lower(j) > prob.upper(j) + kTol) {
      res.status = LpStatus::kInfeasible;
      return res;
    }
  }

  Tableau t;
  t.a.resize(m, n + m);
  t.a.leftCols(n) = prob.a_eq;
  t.b = prob.b_eq;
  t.lo.resize(n + m);
  t.hi.resize(n + m);
  t.lo.head(n) = prob.lower;
  t.hi.head(n) = prob.upper;
  t.x.resize(n + m);
  t.state.assign(n + m, VarState::kAtLower);

  // Start with originals at their finite bound nearest zero; artificials
  // absorb the residual so the initial basis is trivially feasible.
  for (int j = 0; j < n; ++j) {
    double v;
    if (std::isfinite(prob.lower(j)) && std::isfinite(prob.upper(j)))
      v = std::abs(prob.lower(j)) <= std::abs(prob.upper(j)) ? prob.lower(j) : prob.upper(j);
    else if (std::isfinite(prob.lower(j)))
      v = prob.lower(j);
    else
      v = prob.upper(j);
    t.x(j) = v;
    t.state[j] = (v == prob.upper(j) && prob.lower(j) != prob.upper(j)) ? VarState::kAtUpper
                                                                        : VarState::kAtLower;
  }
  Eigen::VectorXd resid = prob.b_eq - t.a.leftCols(n) * t.x.head(n);
  t.basis.resize(m);
  for (int i = 0; i < m; ++i) {
    const int aj = n + i;
    t.a.col(aj).setZero();
    t.a(i, aj) = resid(i) >= 0 ? 1.0 : -1.0;
    t.lo(aj) = 0.0;
    t.hi(aj) = kInf;
    t.x(aj) = std::abs(resid(i));
    t.state[aj] = VarState::kBasic;
    t.basis[i] = aj;
  }

  // Phase 1: drive artificials to zero.
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
  phase1.tail(m).setOnes();
  bool unbounded = false;
  if (!run_simplex(t, phase1, max_iterations, &unbounded)) {
    res.status = LpStatus::kIterationLimit;
    return res;
  }
  double art_sum = 0.0;
  for (int i = 0; i < m; ++i) art_sum += t.x(n + i);
  const double scale = 1.0 + prob.b_eq.cwiseAbs().maxCoeff();
  if (art_sum > 1e-7 * scale) {
    res.status = LpStatus::kInfeasible;
    for (int i = 0; i < m; ++i)
      if (t.x(n + i) > 1e-7 * scale) res.violated_rows.push_back(i);
    return res;
  }
  // Pin artificials at zero for phase 2.
  for (int i = 0; i < m; ++i) {
    t.hi(n + i) = 0.0;
    if (t.state[n + i] != VarState::kBasic) t.x(n + i) = 0.0;
  }

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + m);
  phase2.head(n) = prob.c;
  if (!run_simplex(t, phase2, max_iterations, &unbounded)) {
    res.status = LpStatus::kIterationLimit;
    return res;
  }
  if (unbounded) {
    res.status = LpStatus::kUnbounded;
    return res;
  }
  res.status = LpStatus::kOptimal;
  res.x = t.x.head(n);
  res.objective = prob.c.dot(res.x);
  return res;
}

}  // namespace climb
