#pragma once

#include <cstddef>
#include <vector>

namespace wmr::detail {

struct FeasibilityResult {
  bool feasible = false;
  double infeasibility = 0.0;  // phase-1 objective at termination
  std::vector<double> x;
  std::size_t pivots = 0;
};

/// Finds x >= 0 with A x = b by a dense phase-1 simplex (Bland's rule).
/// A is row-major, rows x cols.
FeasibilityResult find_feasible_point(const std::vector<double>& A, std::size_t rows,
                                      std::size_t cols, const std::vector<double>& b,
                                      double tol = 1e-11);

}  // namespace wmr::detail
