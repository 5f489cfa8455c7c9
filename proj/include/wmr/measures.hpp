#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace wmr {

/// Finitely supported probability measure on the real line.
///
/// Atoms are kept strictly increasing; duplicates passed to the constructor
/// are merged by summing their weights. Weights must be positive and sum to
/// one within 1e-9, after which they are renormalised exactly.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<double> atoms, std::vector<double> weights);

  /// Builds a measure from non-negative masses, silently dropping atoms whose
  /// mass is at most `drop_below`. Used for intermediate constructions that
  /// can produce empty atoms.
  static DiscreteMeasure from_masses(std::vector<double> atoms,
                                     std::vector<double> masses,
                                     double drop_below = 0.0);
  static DiscreteMeasure dirac(double x);
  static DiscreteMeasure uniform(std::vector<double> atoms);

  std::span<const double> atoms() const noexcept { return atoms_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double atom(std::size_t i) const { return atoms_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  std::size_t size() const noexcept { return atoms_.size(); }

  double min() const noexcept { return atoms_.front(); }
  double max() const noexcept { return atoms_.back(); }
  double diameter() const noexcept { return atoms_.back() - atoms_.front(); }
  double mean() const noexcept { return mean_; }

  /// Cumulative weights c_1 < ... < c_n, with c_n == 1 exactly.
  std::span<const double> cumulative() const noexcept { return cumulative_; }

  /// F(x) = mass of (-inf, x].
  double cdf(double x) const;
  /// Left-continuous inverse inf{x : F(x) >= level}, level in (0, 1].
  double quantile(double level) const;
  /// Index of the atom returned by quantile(level).
  std::size_t quantile_index(double level) const;

  DiscreteMeasure shifted(double h) const;

  std::string describe() const;

 private:
  DiscreteMeasure() = default;
  void finish();

  std::vector<double> atoms_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  double mean_ = 0.0;
};

/// Piecewise-linear function on the whole line, stored as values at
/// breakpoints plus the two outer slopes.
class PiecewiseLinearFn {
 public:
  PiecewiseLinearFn(std::vector<double> breakpoints, std::vector<double> values,
                    double left_slope, double right_slope);

  double operator()(double y) const;

  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> values() const noexcept { return values_; }
  double left_slope() const noexcept { return left_slope_; }
  double right_slope() const noexcept { return right_slope_; }
  std::size_t size() const noexcept { return breakpoints_.size(); }

  /// Slope on [b_i, b_{i+1}]; for the last breakpoint, the right slope.
  double slope_after(std::size_t i) const;
  double right_derivative(double y) const;

  /// Interior slopes nondecreasing (within tol) and bracketed by the outer slopes.
  bool is_convex(double tol = 1e-12) const;

  /// Pointwise maximum, with crossing points inserted as breakpoints.
  static PiecewiseLinearFn max(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g);
  /// Largest convex minorant of min(f, g); f and g must be convex.
  static PiecewiseLinearFn lower_convex_envelope(const PiecewiseLinearFn& f,
                                                 const PiecewiseLinearFn& g);

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  double left_slope_;
  double right_slope_;
};

/// Open interval (lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x, double margin = 0.0) const {
    return x > lo + margin && x < hi - margin;
  }
  bool contains_closed(double x, double margin = 0.0) const {
    return x >= lo - margin && x <= hi + margin;
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

double mean(const DiscreteMeasure& m);
double quantile(const DiscreteMeasure& m, double level);

/// u_m(y) = sum_i w_i |x_i - y|; breakpoints at the atoms, outer slopes -1 and +1.
PiecewiseLinearFn potential(const DiscreteMeasure& m);

/// G(s) = integral over [0, s] of the quantile function; breakpoints at
/// 0 and the cumulative weights.
PiecewiseLinearFn quantile_integral(const DiscreteMeasure& m);

/// Recovers the measure whose potential is `u` (atoms at kinks, mass = jump / 2).
DiscreteMeasure measure_from_potential(const PiecewiseLinearFn& u, double jump_tol = 1e-13);

/// max(1, diameter of the joint support).
double joint_scale(const DiscreteMeasure& a, const DiscreteMeasure& b);
/// Default order tolerance 1e-9 * joint_scale(a, b).
double order_tolerance(const DiscreteMeasure& a, const DiscreteMeasure& b);

struct OrderVerdict {
  bool leq = false;
  double mean_gap = 0.0;       // |mean(a) - mean(b)|
  double worst_point = 0.0;    // atom of b maximising u_a - u_b
  double worst_excess = 0.0;   // u_a - u_b at worst_point
};

OrderVerdict convex_order_check(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol);
bool convex_order_leq(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol);
bool convex_order_leq(const DiscreteMeasure& a, const DiscreteMeasure& b);

/// Maximal open intervals of {u_a < u_b - tol}. Throws OrderError unless a <=_c b.
std::vector<Interval> irreducible_components(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                             double tol);
std::vector<Interval> irreducible_components(const DiscreteMeasure& a, const DiscreteMeasure& b);

/// rho-Wasserstein distance via the quantile representation.
double wasserstein(const DiscreteMeasure& a, const DiscreteMeasure& b, double rho);

/// Barycentric coarsening onto half-open bins [k delta, (k+1) delta).
DiscreteMeasure quantize(const DiscreteMeasure& m, double delta);

/// Atom-by-atom comparison (same support size, atoms and weights within tol).
bool same_measure(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol);

}  // namespace wmr
