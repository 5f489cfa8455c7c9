#pragma once

#include <span>
#include <vector>

#include "wmr/measures.hpp"

namespace wmr {

struct Knot {
  double x = 0.0;
  double t = 0.0;
};

/// Piecewise-linear map through knots with strictly increasing x.
/// Linear between knots, constant beyond the outermost ones. Monotonicity and
/// the Lipschitz bound are not enforced here; see is_increasing/is_one_lipschitz.
class MonotoneMap {
 public:
  explicit MonotoneMap(std::vector<Knot> knots);

  /// Knots (x_i, images[i]) over the atoms of mu.
  static MonotoneMap on_atoms(const DiscreteMeasure& mu, std::vector<double> images);
  static MonotoneMap identity_on(const DiscreteMeasure& mu);
  static MonotoneMap affine_on(const DiscreteMeasure& mu, double slope, double intercept);

  double operator()(double x) const;
  std::span<const Knot> knots() const noexcept { return knots_; }
  std::size_t size() const noexcept { return knots_.size(); }

  /// Images of the atoms of mu, in atom order.
  std::vector<double> images(const DiscreteMeasure& mu) const;

  bool is_increasing(double tol = 0.0) const;
  bool is_one_lipschitz(double tol = 0.0) const;

 private:
  std::vector<Knot> knots_;
};

/// Law of x_i -> images[i] under mu; images within merge_tol of each other
/// (after sorting) collapse onto their weighted mean.
DiscreteMeasure pushforward(const DiscreteMeasure& mu, const std::vector<double>& images,
                            double merge_tol);
/// Default merge tolerance 1e-12 * max(1, spread of atoms and images).
DiscreteMeasure pushforward(const MonotoneMap& map, const DiscreteMeasure& mu);

}  // namespace wmr
