#include "wmr/cost.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "wmr/errors.hpp"

namespace wmr {

CostSpec CostSpec::power(double rho) {
  if (!(rho >= 1.0) || !std::isfinite(rho)) {
    throw DomainError("power cost needs a finite exponent rho >= 1");
  }
  return CostSpec(Kind::Power, rho);
}

CostSpec CostSpec::parse(const std::string& kind, double rho) {
  if (kind == "quadratic") return quadratic();
  if (kind == "quartic") return quartic();
  if (kind == "power") return power(rho);
  throw DomainError("unknown cost kind '" + kind + "'");
}

double CostSpec::operator()(double x) const {
  switch (kind_) {
    case Kind::Quadratic:
      return x * x;
    case Kind::Quartic: {
      const double x2 = x * x;
      return x2 * x2;
    }
    case Kind::Power:
      break;
  }
  return std::pow(std::abs(x), rho_);
}

double CostSpec::derivative(double x) const {
  switch (kind_) {
    case Kind::Quadratic:
      return 2.0 * x;
    case Kind::Quartic:
      return 4.0 * x * x * x;
    case Kind::Power:
      break;
  }
  if (rho_ == 1.0) return x < 0.0 ? -1.0 : 1.0;
  const double mag = rho_ * std::pow(std::abs(x), rho_ - 1.0);
  return x < 0.0 ? -mag : mag;
}

double CostSpec::curvature(double x) const {
  switch (kind_) {
    case Kind::Quadratic:
      return 2.0;
    case Kind::Quartic:
      return 12.0 * x * x;
    case Kind::Power:
      break;
  }
  if (rho_ == 1.0) return x == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  if (x == 0.0) return rho_ < 2.0 ? std::numeric_limits<double>::infinity() : (rho_ == 2.0 ? 2.0 : 0.0);
  return rho_ * (rho_ - 1.0) * std::pow(std::abs(x), rho_ - 2.0);
}

double CostSpec::lipschitz_on(double radius) const {
  return std::abs(derivative(std::abs(radius)));
}

std::string CostSpec::name() const {
  switch (kind_) {
    case Kind::Quadratic:
      return "quadratic";
    case Kind::Quartic:
      return "quartic";
    case Kind::Power:
      break;
  }
  std::ostringstream os;
  os << "power(" << rho_ << ")";
  return os.str();
}

}  // namespace wmr
