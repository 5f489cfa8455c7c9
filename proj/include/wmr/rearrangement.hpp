#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wmr/cost.hpp"
#include "wmr/measures.hpp"
#include "wmr/monotone_map.hpp"

namespace wmr {

struct SolveOptions {
  /// Projected subgradient iteration cap for non-quadratic costs.
  std::size_t max_iterations = 100000;
  /// Start the subgradient loop from the quadratic optimum (false: from the
  /// block conditional means of nu).
  bool warm_start = true;
};

struct WeakSolution {
  MonotoneMap map;
  DiscreteMeasure pushforward;
  double value = 0.0;
  std::vector<Interval> irreducibles;  // of (pushforward, nu)
  double kkt_residual = 0.0;
  CostSpec cost;
  std::vector<double> images;          // t_i, one per atom of mu
  bool unique = true;                  // false for rho == 1
  std::size_t iterations = 0;
};

WeakSolution solve_weak_transport(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  const CostSpec& cost, const SolveOptions& opts = {});
WeakSolution weak_monotone_rearrangement(const DiscreteMeasure& mu, const DiscreteMeasure& nu);
double value(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostSpec& cost);

/// Wraps a hand-made map as a solution: pushforward, value and (when the
/// pushforward is below nu) irreducible intervals.
WeakSolution make_solution(const MonotoneMap& map, const DiscreteMeasure& mu,
                           const DiscreteMeasure& nu, const CostSpec& cost);

/// sum_i p_i theta(x_i - t_i)
double transport_cost(const DiscreteMeasure& mu, const std::vector<double>& images,
                      const CostSpec& cost);

struct AdmissibilityReport {
  bool increasing = true;
  bool lipschitz = true;
  bool ordered = true;
  double worst_decrease = 0.0;  // max_i (t_i - t_{i+1})
  double worst_stretch = 0.0;   // max_i (t_{i+1} - t_i) - (x_{i+1} - x_i)
  OrderVerdict order;
  std::vector<std::string> messages;
  bool ok() const { return increasing && lipschitz && ordered; }
};

AdmissibilityReport verify_admissible(const MonotoneMap& map, const DiscreteMeasure& mu,
                                      const DiscreteMeasure& nu, double tol);

struct SlopeViolation {
  std::size_t index = 0;  // pair (x_index, x_index+1)
  double dx = 0.0;
  double dt = 0.0;
  Interval component;
};

struct Slope1Report {
  AdmissibilityReport admissible;
  std::vector<Interval> irreducibles;
  std::vector<SlopeViolation> violations;
  bool ok() const { return admissible.ok() && violations.empty(); }
};

Slope1Report verify_slope1_characterization(const MonotoneMap& map, const DiscreteMeasure& mu,
                                            const DiscreteMeasure& nu, double tol);
Slope1Report verify_slope1_characterization(const WeakSolution& sol, const DiscreteMeasure& mu,
                                            const DiscreteMeasure& nu, double tol);

/// candidate(mu) <=_c sol.pushforward. Throws PreconditionError if the
/// candidate is not admissible.
bool check_maximality(const MonotoneMap& candidate, const WeakSolution& sol,
                      const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct MapDecomposition {
  std::vector<Interval> slope1;       // closed knot ranges [lo, hi]
  std::vector<Interval> contractive;  // knot segments with slope < 1
};

MapDecomposition map_decomposition(const MonotoneMap& map, double tol);

struct OracleResult {
  double value = 0.0;
  std::vector<double> t;
  double bound = 0.0;  // guaranteed distance to the true optimum
  std::size_t feasible_points = 0;
};

/// Grid search over admissible images, n <= 4 atoms.
OracleResult oracle_solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          const CostSpec& cost, double grid_step);

/// Makes flat runs strictly increasing, within eps in sup norm.
MonotoneMap smooth_strictify(const MonotoneMap& map, double eps);

namespace detail {
struct QpProblem;
/// Feasible polyhedron of the quantile-space problem plus a feasible point.
QpProblem build_feasible_set(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             std::vector<double>& feasible_start);
}  // namespace detail

}  // namespace wmr
