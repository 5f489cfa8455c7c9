#include "wmr/monotone_map.hpp"

#include <algorithm>
#include <numeric>

#include "wmr/errors.hpp"

namespace wmr {

MonotoneMap::MonotoneMap(std::vector<Knot> knots) : knots_(std::move(knots)) {
  if (knots_.empty()) throw DomainError("a map needs at least one knot");
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i].x > knots_[i - 1].x)) {
      throw DomainError("knot abscissae must be strictly increasing");
    }
  }
}

MonotoneMap MonotoneMap::on_atoms(const DiscreteMeasure& mu, std::vector<double> images) {
  if (images.size() != mu.size()) throw DomainError("one image per atom expected");
  std::vector<Knot> k(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) k[i] = {mu.atom(i), images[i]};
  return MonotoneMap(std::move(k));
}

MonotoneMap MonotoneMap::identity_on(const DiscreteMeasure& mu) {
  return on_atoms(mu, std::vector<double>(mu.atoms().begin(), mu.atoms().end()));
}

MonotoneMap MonotoneMap::affine_on(const DiscreteMeasure& mu, double slope, double intercept) {
  std::vector<double> t(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) t[i] = slope * mu.atom(i) + intercept;
  return on_atoms(mu, std::move(t));
}

double MonotoneMap::operator()(double x) const {
  if (x <= knots_.front().x) return knots_.front().t;
  if (x >= knots_.back().x) return knots_.back().t;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                             [](double v, const Knot& k) { return v < k.x; });
  const Knot& hi = *it;
  const Knot& lo = *(it - 1);
  if (x == lo.x) return lo.t;
  const double lambda = (x - lo.x) / (hi.x - lo.x);
  return lo.t + lambda * (hi.t - lo.t);
}

std::vector<double> MonotoneMap::images(const DiscreteMeasure& mu) const {
  std::vector<double> out(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) out[i] = (*this)(mu.atom(i));
  return out;
}

bool MonotoneMap::is_increasing(double tol) const {
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (knots_[i].t < knots_[i - 1].t - tol) return false;
  }
  return true;
}

bool MonotoneMap::is_one_lipschitz(double tol) const {
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (knots_[i].t - knots_[i - 1].t > knots_[i].x - knots_[i - 1].x + tol) return false;
  }
  return true;
}

DiscreteMeasure pushforward(const DiscreteMeasure& mu, const std::vector<double>& images,
                            double merge_tol) {
  if (images.size() != mu.size()) throw DomainError("one image per atom expected");
  std::vector<std::size_t> order(images.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return images[l] < images[r]; });
  std::vector<double> atoms;
  std::vector<double> masses;
  double mass = 0.0;
  double moment = 0.0;
  double first = 0.0;
  double last = 0.0;
  // Clusters of identical images keep the image exactly instead of moment / mass.
  auto flush = [&] {
    atoms.push_back(first == last ? first : moment / mass);
    masses.push_back(mass);
    mass = moment = 0.0;
  };
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    if (k > 0 && images[i] - last > merge_tol) flush();
    if (mass == 0.0) first = images[i];
    mass += mu.weight(i);
    moment += mu.weight(i) * images[i];
    last = images[i];
  }
  flush();
  return DiscreteMeasure(std::move(atoms), std::move(masses));
}

DiscreteMeasure pushforward(const MonotoneMap& map, const DiscreteMeasure& mu) {
  const std::vector<double> t = map.images(mu);
  double lo = mu.min();
  double hi = mu.max();
  for (double v : t) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return pushforward(mu, t, 1e-12 * std::max(1.0, hi - lo));
}

}  // namespace wmr
