#pragma once

#include <cstddef>
#include <vector>

namespace wmr::detail {

/// a . t (= or >=) b
struct LinearConstraint {
  std::vector<double> a;
  double b = 0.0;
};

/// minimize 1/2 sum_i w_i (t_i - y_i)^2 subject to equalities and a.t >= b rows.
struct QpProblem {
  std::vector<double> weights;
  std::vector<double> target;
  std::vector<LinearConstraint> equalities;
  std::vector<LinearConstraint> inequalities;
};

struct QpResult {
  std::vector<double> t;
  std::vector<double> eq_multipliers;
  std::vector<double> ineq_multipliers;
  double kkt_residual = 0.0;
  std::size_t iterations = 0;
};

/// Largest violation of the constraints at t (0 when feasible).
double primal_violation(const QpProblem& qp, const std::vector<double>& t);

/// Primal active-set method started from a feasible point. `scale` sets the
/// activity and step tolerances. Throws SolverError after max_iter iterations.
QpResult solve_projection_qp(const QpProblem& qp, std::vector<double> start, double scale,
                             std::size_t max_iter = 20000);

/// Euclidean projection in the w-metric (same solver, target = y).
std::vector<double> project(const QpProblem& qp, const std::vector<double>& y,
                            const std::vector<double>& start, double scale);

}  // namespace wmr::detail
