#include "wmr/detail/simplex.hpp"

#include <cmath>
#include <limits>

namespace wmr::detail {

FeasibilityResult find_feasible_point(const std::vector<double>& A, std::size_t rows,
                                      std::size_t cols, const std::vector<double>& b,
                                      double tol) {
  // Tableau columns: originals, one artificial per row, then rhs.
  const std::size_t width = cols + rows + 1;
  std::vector<double> tab(rows * width, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return tab[r * width + c]; };
  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double sign = b[r] < 0.0 ? -1.0 : 1.0;
    for (std::size_t c = 0; c < cols; ++c) at(r, c) = sign * A[r * cols + c];
    at(r, cols + r) = 1.0;
    at(r, width - 1) = sign * b[r];
    basis[r] = cols + r;
  }
  // Reduced costs of min sum(artificials): -(column sums) on originals.
  std::vector<double> cost(width, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) cost[c] -= at(r, c);
    cost[width - 1] -= at(r, width - 1);
  }

  FeasibilityResult out;
  const std::size_t cap = 50 * (rows + cols) + 1000;
  for (; out.pivots < cap; ++out.pivots) {
    // Bland: lowest-index improving column that admits a pivot row.
    std::size_t enter = width;
    std::size_t leave = rows;
    for (std::size_t c = 0; c + 1 < width && leave == rows; ++c) {
      if (!(cost[c] < -tol)) continue;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows; ++r) {
        const double a = at(r, c);
        if (a <= 1e-9) continue;
        const double ratio = std::max(0.0, at(r, width - 1)) / a;
        if (ratio < best - 1e-15) {
          best = ratio;
          leave = r;
        } else if (ratio <= best + 1e-15 && basis[r] < basis[leave]) {
          leave = r;
        }
      }
      if (leave < rows) enter = c;
    }
    if (enter == width) break;
    const double piv = at(leave, enter);
    for (std::size_t c = 0; c < width; ++c) at(leave, c) /= piv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) at(r, c) -= f * at(leave, c);
    }
    const double f = cost[enter];
    for (std::size_t c = 0; c < width; ++c) cost[c] -= f * at(leave, c);
    basis[leave] = enter;
    for (std::size_t r = 0; r < rows; ++r) {
      if (at(r, width - 1) < 0.0 && at(r, width - 1) > -1e-13) at(r, width - 1) = 0.0;
    }
  }

  out.x.assign(cols, 0.0);
  double art = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double v = at(r, width - 1);
    if (basis[r] < cols) {
      out.x[basis[r]] = std::max(0.0, v);
    } else {
      art += std::abs(v);
    }
  }
  out.infeasibility = art;
  out.feasible = art <= 1e-9;
  return out;
}

}  // namespace wmr::detail
