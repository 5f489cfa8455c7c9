#pragma once

#include <string>

namespace wmr {

/// Convex cost theta applied to the displacement x - barycenter.
class CostSpec {
 public:
  enum class Kind { Power, Quadratic, Quartic };

  static CostSpec power(double rho);
  static CostSpec quadratic() { return CostSpec(Kind::Quadratic, 2.0); }
  static CostSpec quartic() { return CostSpec(Kind::Quartic, 4.0); }
  /// Parses "quadratic", "quartic" or "power" (the latter uses `rho`).
  static CostSpec parse(const std::string& kind, double rho);

  Kind kind() const noexcept { return kind_; }
  /// Exponent of |x|; equals the growth exponent of the cost.
  double rho() const noexcept { return rho_; }
  double growth_exponent() const noexcept { return rho_; }
  bool strictly_convex() const noexcept { return rho_ > 1.0; }

  double operator()(double x) const;
  /// Right derivative.
  double derivative(double x) const;
  /// Second derivative where it exists; non-negative everywhere (convexity witness).
  /// For rho == 1 the kink at 0 is reported as +infinity.
  double curvature(double x) const;
  /// sup |theta'| over [-radius, radius].
  double lipschitz_on(double radius) const;

  std::string name() const;

 private:
  CostSpec(Kind kind, double rho) : kind_(kind), rho_(rho) {}

  Kind kind_;
  double rho_;
};

}  // namespace wmr
