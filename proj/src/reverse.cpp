#include "wmr/reverse.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "wmr/errors.hpp"

namespace wmr {

namespace {

std::string potentials_dump(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  const PiecewiseLinearFn ua = potential(a);
  const PiecewiseLinearFn ub = potential(b);
  std::ostringstream os;
  os.precision(17);
  os << "mu = " << a.describe() << ", nu* = " << b.describe() << "; u_mu - u_nu* at atoms of nu*:";
  for (std::size_t j = 0; j < b.size(); ++j) os << " " << ua(b.atom(j)) - ub.values()[j];
  return os.str();
}

std::size_t nearest(const DiscreteMeasure& m, double x) {
  auto it = std::lower_bound(m.atoms().begin(), m.atoms().end(), x);
  std::size_t k = static_cast<std::size_t>(it - m.atoms().begin());
  if (k == m.size()) return k - 1;
  if (k > 0 && x - m.atom(k - 1) < m.atom(k) - x) return k - 1;
  return k;
}

}  // namespace

DiscreteMeasure displacement_law(const MonotoneMap& map, const DiscreteMeasure& m) {
  std::vector<double> d(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) d[i] = m.atom(i) - map(m.atom(i));
  return pushforward(m, d, 1e-12 * std::max(1.0, m.diameter()));
}

ReverseSolution reverse_optimizer(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  const CostSpec& cost) {
  WeakSolution T = solve_weak_transport(mu, nu, cost);
  const double scale = joint_scale(mu, nu);
  const double tol = 1e-9 * scale;
  const DiscreteMeasure& eta = T.pushforward;

  // z -> (mass, image); coincident atoms must agree on the image.
  std::map<double, std::pair<double, double>> atoms;
  auto put = [&](double z, double mass, double image) {
    if (mass <= 0.0) return;
    const double snapped = nu.atom(nearest(nu, image));
    if (std::abs(snapped - image) <= tol) image = snapped;
    auto it = atoms.lower_bound(z - 1e-12 * scale);
    if (it != atoms.end() && std::abs(it->first - z) <= 1e-12 * scale) {
      if (std::abs(it->second.second - image) > tol) {
        std::ostringstream os;
        os.precision(17);
        os << "reverse construction sends atom " << z << " to both " << it->second.second
           << " and " << image;
        throw ConsistencyError(os.str());
      }
      it->second.first += mass;
      return;
    }
    atoms[z] = {mass, image};
  };

  std::vector<bool> in_block(mu.size(), false);
  for (const Interval& I : T.irreducibles) {
    double mass = 0.0;
    double disp = 0.0;
    double lo = 1e300;
    double hi = -1e300;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (!I.contains(T.images[i], tol)) continue;
      in_block[i] = true;
      const double d = mu.atom(i) - T.images[i];
      mass += mu.weight(i);
      disp += mu.weight(i) * d;
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    if (mass == 0.0) continue;
    const double c = disp / mass;
    if (hi - lo > 1e-8 * scale) {
      std::ostringstream os;
      os << "displacement varies by " << hi - lo << " on an irreducible interval";
      throw ConsistencyError(os.str());
    }
    // Endpoint shares of nu, from mass and mean balance over I.
    double emass = 0.0;
    double emoment = 0.0;
    for (std::size_t k = 0; k < eta.size(); ++k) {
      if (!I.contains(eta.atom(k), tol)) continue;
      emass += eta.weight(k);
      emoment += eta.weight(k) * eta.atom(k);
    }
    double inner_mass = 0.0;
    double inner_moment = 0.0;
    for (std::size_t j = 0; j < nu.size(); ++j) {
      if (!I.contains(nu.atom(j))) continue;
      inner_mass += nu.weight(j);
      inner_moment += nu.weight(j) * nu.atom(j);
      put(nu.atom(j) + c, nu.weight(j), nu.atom(j));
    }
    const double rest = emass - inner_mass;
    const double b = std::max(0.0, ((emoment - inner_moment) - rest * I.lo) / (I.hi - I.lo));
    const double a = std::max(0.0, rest - b);
    put(I.lo + c, a, I.lo);
    put(I.hi + c, b, I.hi);
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!in_block[i]) put(mu.atom(i), mu.weight(i), T.images[i]);
  }

  std::vector<double> z;
  std::vector<double> w;
  std::vector<Knot> knots;
  for (const auto& [x, mi] : atoms) {
    if (mi.first <= 1e-15) continue;
    z.push_back(x);
    w.push_back(mi.first);
    knots.push_back({x, mi.second});
  }
  DiscreteMeasure nu_star(std::move(z), std::move(w));
  MonotoneMap tilde(std::move(knots));

  const double v = T.value;
  double rv = 0.0;
  for (std::size_t j = 0; j < nu_star.size(); ++j) {
    rv += nu_star.weight(j) * cost(nu_star.atom(j) - tilde(nu_star.atom(j)));
  }

  std::ostringstream err;
  err.precision(17);
  const OrderVerdict ord = convex_order_check(mu, nu_star, order_tolerance(mu, nu_star));
  if (!ord.leq) err << "mu is not below nu*; ";
  if (!same_measure(pushforward(tilde, nu_star), nu, tol)) err << "tilde map does not push nu* onto nu; ";
  if (!tilde.is_increasing(tol) || !tilde.is_one_lipschitz(tol)) err << "tilde map is not admissible-shaped; ";
  if (std::abs(rv - v) > tol) err << "reverse value " << rv << " differs from " << v << "; ";
  std::vector<Interval> irr;
  if (ord.leq) {
    irr = irreducible_components(mu, nu_star);
    for (std::size_t j = 0; j + 1 < nu_star.size(); ++j) {
      const double z0 = nu_star.atom(j);
      const double z1 = nu_star.atom(j + 1);
      for (const Interval& I : irr) {
        if (I.contains_closed(z0) && I.contains_closed(z1) && I.contains(0.5 * (z0 + z1)) &&
            std::abs((tilde(z1) - tilde(z0)) - (z1 - z0)) > 1e-8 * scale) {
          err << "tilde map is not slope 1 on (" << I.lo << ", " << I.hi << "); ";
        }
      }
    }
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (std::abs(tilde(mu.atom(i)) - T.images[i]) > 1e-8 * scale) {
      err << "tilde map differs from the rearrangement at " << mu.atom(i) << "; ";
      break;
    }
  }
  if (!err.str().empty()) throw ConsistencyError(err.str() + potentials_dump(mu, nu_star));

  return ReverseSolution{std::move(nu_star), std::move(tilde), std::move(irr), v, rv, std::move(T)};
}

MonotoneMap convex_order_max_map(const MonotoneMap& T, const MonotoneMap& S,
                                 const DiscreteMeasure& mu) {
  const DiscreteMeasure tm = pushforward(T, mu);
  const DiscreteMeasure sm = pushforward(S, mu);
  const double scale = joint_scale(tm, sm);
  if (std::abs(tm.mean() - sm.mean()) > 1e-9 * scale) {
    throw PreconditionError("maps must have the same mean under mu");
  }
  const PiecewiseLinearFn u = PiecewiseLinearFn::max(potential(tm), potential(sm));
  const DiscreteMeasure rho = measure_from_potential(u, 1e-12);
  const PiecewiseLinearFn g = quantile_integral(rho);
  std::vector<double> r(mu.size());
  double prev = 0.0;
  double gprev = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double c = mu.cumulative()[i];
    const double gi = g(c);
    r[i] = (gi - gprev) / (c - prev);
    prev = c;
    gprev = gi;
  }
  return MonotoneMap::on_atoms(mu, std::move(r));
}

std::pair<DiscreteMeasure, MonotoneMap> convex_order_min_with_maps(const DiscreteMeasure& eta1,
                                                                   const MonotoneMap& T1,
                                                                   const DiscreteMeasure& eta2,
                                                                   const MonotoneMap& T2) {
  const DiscreteMeasure nu1 = pushforward(T1, eta1);
  const DiscreteMeasure nu2 = pushforward(T2, eta2);
  const double scale = std::max(joint_scale(eta1, eta2), joint_scale(nu1, nu2));
  if (!same_measure(nu1, nu2, 1e-9 * scale)) {
    throw PreconditionError("T1(eta1) and T2(eta2) differ: " + nu1.describe() + " vs " +
                            nu2.describe());
  }
  const PiecewiseLinearFn u1 = potential(eta1);
  const PiecewiseLinearFn u2 = potential(eta2);
  const PiecewiseLinearFn u = PiecewiseLinearFn::lower_convex_envelope(u1, u2);
  const DiscreteMeasure eta = measure_from_potential(u, 1e-12);
  // Where u touches u_i, eta's quantile block at z sits inside eta_i's, so T_i(z) works.
  std::vector<double> images(eta.size());
  for (std::size_t k = 0; k < eta.size(); ++k) {
    const double z = eta.atom(k);
    const double g1 = std::abs(u1(z) - u(z));
    const double g2 = std::abs(u2(z) - u(z));
    images[k] = g1 <= g2 ? T1(eta1.atom(nearest(eta1, z))) : T2(eta2.atom(nearest(eta2, z)));
  }
  MonotoneMap tstar = MonotoneMap::on_atoms(eta, std::move(images));
  if (!same_measure(pushforward(tstar, eta), nu1, 1e-9 * scale)) {
    throw ConsistencyError("T* does not push the minimum onto nu");
  }
  return {eta, std::move(tstar)};
}

bool residual_order_check(const DiscreteMeasure& eta1, const DiscreteMeasure& eta2,
                          const MonotoneMap& T1, const MonotoneMap& T2) {
  const double tol = order_tolerance(eta1, eta2);
  if (!convex_order_leq(eta1, eta2, tol)) throw PreconditionError("eta1 is not below eta2");
  const DiscreteMeasure n1 = pushforward(T1, eta1);
  const DiscreteMeasure n2 = pushforward(T2, eta2);
  if (!convex_order_leq(n2, n1, order_tolerance(n1, n2))) {
    throw PreconditionError("T2(eta2) is not below T1(eta1)");
  }
  auto admissible_on = [&](const MonotoneMap& T, const DiscreteMeasure& m) {
    for (std::size_t i = 0; i + 1 < m.size(); ++i) {
      const double dt = T(m.atom(i + 1)) - T(m.atom(i));
      if (dt < -tol || dt > m.atom(i + 1) - m.atom(i) + tol) return false;
    }
    return true;
  };
  if (!admissible_on(T1, eta1) || !admissible_on(T2, eta2)) {
    throw PreconditionError("maps must be increasing and 1-Lipschitz on the atoms");
  }
  const DiscreteMeasure d1 = displacement_law(T1, eta1);
  const DiscreteMeasure d2 = displacement_law(T2, eta2);
  return convex_order_leq(d1, d2, order_tolerance(d1, d2));
}

}  // namespace wmr
