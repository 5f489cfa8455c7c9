#include "wmr/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wmr/detail/qp.hpp"
#include "wmr/errors.hpp"

namespace wmr {

namespace detail {

QpProblem build_feasible_set(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             std::vector<double>& feasible_start) {
  const std::size_t n = mu.size();
  const auto cm = mu.cumulative();
  const auto cn = nu.cumulative();
  const PiecewiseLinearFn g = quantile_integral(nu);

  QpProblem qp;
  qp.weights.assign(mu.weights().begin(), mu.weights().end());
  qp.target.assign(mu.atoms().begin(), mu.atoms().end());
  qp.equalities.push_back({qp.weights, nu.mean()});

  for (std::size_t i = 0; i + 1 < n; ++i) {
    LinearConstraint c{std::vector<double>(n, 0.0), 0.0};
    c.a[i] = -1.0;
    c.a[i + 1] = 1.0;
    qp.inequalities.push_back(std::move(c));
  }

  std::vector<double> levels;
  std::merge(cm.begin(), cm.end(), cn.begin(), cn.end(), std::back_inserter(levels));
  std::vector<double> kept;
  for (double s : levels) {
    if (s >= 1.0 - 1e-12) continue;
    if (!kept.empty() && s - kept.back() <= 1e-12) continue;
    kept.push_back(s);
  }
  for (double s : kept) {
    LinearConstraint c{std::vector<double>(n, 0.0), g(s)};
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      c.a[i] = std::clamp(s - prev, 0.0, mu.weight(i));
      prev = cm[i];
    }
    qp.inequalities.push_back(std::move(c));
  }

  feasible_start.resize(n);
  double prev = 0.0;
  double gprev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double gi = g(cm[i]);
    feasible_start[i] = (gi - gprev) / mu.weight(i);
    gprev = gi;
    prev = cm[i];
  }
  (void)prev;
  return qp;
}

}  // namespace detail

namespace {

double images_scale(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return joint_scale(mu, nu);
}

WeakSolution assemble(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostSpec& cost,
                      std::vector<double> t, double kkt, std::size_t iterations) {
  MonotoneMap map = MonotoneMap::on_atoms(mu, t);
  DiscreteMeasure pf = pushforward(map, mu);
  std::vector<Interval> irr = irreducible_components(pf, nu);
  const double v = transport_cost(mu, t, cost);
  return WeakSolution{std::move(map), std::move(pf), v,
                      std::move(irr), kkt,           cost,
                      std::move(t),   cost.strictly_convex(), iterations};
}

std::vector<double> quadratic_images(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     double& kkt, std::size_t& iterations) {
  const double scale = images_scale(mu, nu);
  kkt = 0.0;
  iterations = 0;
  if (mu.size() == 1) {
    const double x = mu.atom(0);
    return {std::abs(x - nu.mean()) <= 1e-12 * scale ? x : nu.mean()};
  }
  std::vector<double> start;
  const detail::QpProblem qp = detail::build_feasible_set(mu, nu, start);
  const double viol = detail::primal_violation(qp, qp.target);
  if (viol <= 1e-12 * scale) {
    kkt = viol;
    return qp.target;
  }
  detail::QpResult r = detail::solve_projection_qp(qp, std::move(start), scale);
  kkt = r.kkt_residual;
  iterations = r.iterations;
  if (kkt > 1e-8 * scale) {
    std::ostringstream os;
    os << "quadratic solve ended with KKT residual " << kkt;
    throw SolverError(os.str(), kkt);
  }
  return r.t;
}

}  // namespace

double transport_cost(const DiscreteMeasure& mu, const std::vector<double>& images,
                      const CostSpec& cost) {
  double v = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) v += mu.weight(i) * cost(mu.atom(i) - images[i]);
  return v;
}

WeakSolution solve_weak_transport(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  const CostSpec& cost, const SolveOptions& opts) {
  const double scale = images_scale(mu, nu);
  double kkt = 0.0;
  std::size_t iterations = 0;
  std::vector<double> t = quadratic_images(mu, nu, kkt, iterations);
  if (cost.kind() == CostSpec::Kind::Quadratic || mu.size() == 1 || !cost.strictly_convex()) {
    return assemble(mu, nu, cost, std::move(t), kkt, iterations);
  }

  std::vector<double> start;
  const detail::QpProblem qp = detail::build_feasible_set(mu, nu, start);
  if (!opts.warm_start) t = start;
  const std::size_t n = mu.size();
  const double alpha0 = 0.5 * scale / std::max(1.0, cost.lipschitz_on(2.0 * scale));
  auto step = [&](const std::vector<double>& from, double alpha) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = from[i] + alpha * cost.derivative(mu.atom(i) - from[i]);
    }
    return detail::project(qp, y, from, scale);
  };
  auto residual = [&](const std::vector<double>& at) {
    const std::vector<double> z = step(at, alpha0);
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::abs(z[i] - at[i]));
    return r;
  };

  double res = residual(t);
  std::size_t k = 0;
  while (res > 1e-9 * scale && k < opts.max_iterations) {
    ++k;
    t = step(t, alpha0 / static_cast<double>(k));
    if (k % 10 == 0) res = residual(t);
  }
  if (k > 0 && k % 10 != 0) res = residual(t);
  if (res > 1e-8 * scale) {
    std::ostringstream os;
    os << "projected subgradient stopped after " << k << " iterations with residual " << res;
    throw SolverError(os.str(), res);
  }
  return assemble(mu, nu, cost, std::move(t), res, iterations + k);
}

WeakSolution weak_monotone_rearrangement(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return solve_weak_transport(mu, nu, CostSpec::quadratic());
}

double value(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostSpec& cost) {
  return solve_weak_transport(mu, nu, cost).value;
}

WeakSolution make_solution(const MonotoneMap& map, const DiscreteMeasure& mu,
                           const DiscreteMeasure& nu, const CostSpec& cost) {
  std::vector<double> t = map.images(mu);
  DiscreteMeasure pf = pushforward(map, mu);
  std::vector<Interval> irr;
  if (convex_order_leq(pf, nu)) irr = irreducible_components(pf, nu);
  const double v = transport_cost(mu, t, cost);
  return WeakSolution{map,  std::move(pf), v, std::move(irr), std::numeric_limits<double>::quiet_NaN(),
                      cost, std::move(t),  cost.strictly_convex(), 0};
}

AdmissibilityReport verify_admissible(const MonotoneMap& map, const DiscreteMeasure& mu,
                                      const DiscreteMeasure& nu, double tol) {
  AdmissibilityReport rep;
  const std::vector<double> t = map.images(mu);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double dt = t[i + 1] - t[i];
    const double dx = mu.atom(i + 1) - mu.atom(i);
    rep.worst_decrease = std::max(rep.worst_decrease, -dt);
    rep.worst_stretch = std::max(rep.worst_stretch, dt - dx);
  }
  std::ostringstream os;
  os.precision(17);
  if (rep.worst_decrease > tol) {
    rep.increasing = false;
    os << "map decreases by " << rep.worst_decrease << " between consecutive atoms";
    rep.messages.push_back(os.str());
    os.str("");
  }
  if (rep.worst_stretch > tol) {
    rep.lipschitz = false;
    os << "map stretches a gap by " << rep.worst_stretch;
    rep.messages.push_back(os.str());
    os.str("");
  }
  rep.order = convex_order_check(pushforward(mu, t, 1e-12 * joint_scale(mu, nu)), nu, tol);
  if (!rep.order.leq) {
    rep.ordered = false;
    os << "image not below nu in convex order: mean gap " << rep.order.mean_gap
       << ", potential excess " << rep.order.worst_excess << " at " << rep.order.worst_point;
    rep.messages.push_back(os.str());
  }
  return rep;
}

Slope1Report verify_slope1_characterization(const MonotoneMap& map, const DiscreteMeasure& mu,
                                            const DiscreteMeasure& nu, double tol) {
  Slope1Report rep;
  rep.admissible = verify_admissible(map, mu, nu, tol);
  if (!rep.admissible.ordered) return rep;
  const std::vector<double> t = map.images(mu);
  const DiscreteMeasure pf = pushforward(mu, t, 1e-12 * joint_scale(mu, nu));
  rep.irreducibles = irreducible_components(pf, nu, std::max(tol, order_tolerance(pf, nu)));
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    for (const Interval& I : rep.irreducibles) {
      if (!I.contains(t[i], tol) || !I.contains(t[i + 1], tol)) continue;
      const double dx = mu.atom(i + 1) - mu.atom(i);
      const double dt = t[i + 1] - t[i];
      if (std::abs(dt - dx) > tol) rep.violations.push_back({i, dx, dt, I});
    }
  }
  return rep;
}

Slope1Report verify_slope1_characterization(const WeakSolution& sol, const DiscreteMeasure& mu,
                                            const DiscreteMeasure& nu, double tol) {
  return verify_slope1_characterization(sol.map, mu, nu, tol);
}

bool check_maximality(const MonotoneMap& candidate, const WeakSolution& sol,
                      const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const double tol = order_tolerance(mu, nu);
  const AdmissibilityReport rep = verify_admissible(candidate, mu, nu, tol);
  if (!rep.ok()) {
    std::string msg = "candidate map is not admissible";
    for (const std::string& m : rep.messages) msg += "; " + m;
    throw PreconditionError(msg);
  }
  const DiscreteMeasure pf = pushforward(candidate, mu);
  return convex_order_leq(pf, sol.pushforward, tol);
}

MapDecomposition map_decomposition(const MonotoneMap& map, double tol) {
  MapDecomposition out;
  const auto k = map.knots();
  bool open = false;
  double start = 0.0;
  for (std::size_t i = 0; i + 1 < k.size(); ++i) {
    const double dx = k[i + 1].x - k[i].x;
    const double dt = k[i + 1].t - k[i].t;
    if (std::abs(dt - dx) <= tol) {
      if (!open) {
        open = true;
        start = k[i].x;
      }
      continue;
    }
    if (open) {
      out.slope1.push_back({start, k[i].x});
      open = false;
    }
    out.contractive.push_back({k[i].x, k[i + 1].x});
  }
  if (open) out.slope1.push_back({start, k.back().x});
  return out;
}

OracleResult oracle_solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          const CostSpec& cost, double grid_step) {
  const std::size_t n = mu.size();
  if (n > 4) throw SizeError("oracle_solve handles at most 4 source atoms");
  if (!(grid_step > 0.0)) throw DomainError("grid step must be positive");

  const double m = nu.mean();
  const double lo = std::min(mu.min(), nu.min());
  const double hi = std::max(mu.max(), nu.max());
  const double diam = hi - lo;
  const double scale = std::max(1.0, diam);
  OracleResult best;
  best.value = std::numeric_limits<double>::infinity();
  best.bound = cost.lipschitz_on(2.0 * diam) * grid_step * static_cast<double>(n);

  // Potential of nu at its own atoms; a candidate is feasible iff its
  // potential stays below these values (means agree by construction).
  const PiecewiseLinearFn unu = potential(nu);
  const std::vector<double> cap(unu.values().begin(), unu.values().end());
  const double slack = 1e-12 * scale;

  std::vector<double> t(n);
  auto consider = [&] {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (t[i] > t[i + 1] + slack) return;
    }
    if (t[n - 1] > nu.max() + slack || t[0] < nu.min() - slack) return;
    for (std::size_t j = 0; j < nu.size(); ++j) {
      double u = 0.0;
      for (std::size_t i = 0; i < n; ++i) u += mu.weight(i) * std::abs(t[i] - nu.atom(j));
      if (u > cap[j] + slack) return;
    }
    ++best.feasible_points;
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += mu.weight(i) * cost(mu.atom(i) - t[i]);
    if (v < best.value) {
      best.value = v;
      best.t = t;
    }
  };

  // Grid anchored at mean(nu), restricted to the hull of nu (anything outside
  // it violates the order constraints).
  const auto kmin = static_cast<long>(std::ceil((nu.min() - m) / grid_step - 1e-9));
  const auto kmax = static_cast<long>(std::floor((nu.max() - m) / grid_step + 1e-9));
  auto at = [&](long k) { return m + static_cast<double>(k) * grid_step; };
  auto close_last = [&] {
    double rest = m;
    for (std::size_t i = 0; i + 1 < n; ++i) rest -= mu.weight(i) * t[i];
    t[n - 1] = rest / mu.weight(n - 1);
    consider();
  };

  // Coordinate d ranges upward from t[d-1]; once the remaining mass can no
  // longer sit at or above t[d] with the right mean, larger values fail too.
  auto fill = [&](auto&& self, std::size_t d, long from, double used, double mass) -> void {
    if (d + 1 == n) {
      close_last();
      return;
    }
    for (long q = from; q <= kmax; ++q) {
      t[d] = at(q);
      const double u = used + mu.weight(d) * t[d];
      const double rest = 1.0 - (mass + mu.weight(d));
      if (m - u < rest * t[d] - slack) break;
      self(self, d + 1, q, u, mass + mu.weight(d));
    }
  };
  if (n == 1) {
    t[0] = m;
    consider();
  } else {
    fill(fill, 0, kmin, 0.0, 0.0);
  }
  if (best.t.empty()) throw ConsistencyError("oracle found no feasible grid point");
  return best;
}

MonotoneMap smooth_strictify(const MonotoneMap& map, double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const auto k = map.knots();
  double lo = k.front().t;
  double hi = k.front().t;
  for (const Knot& q : k) {
    lo = std::min({lo, q.t, q.x});
    hi = std::max({hi, q.t, q.x});
  }
  const double flat_tol = 1e-12 * std::max(1.0, hi - lo);

  std::vector<Knot> out(k.begin(), k.end());
  double added = 0.0;
  int run = 0;
  std::size_t i = 0;
  while (i + 1 < k.size()) {
    if (k[i + 1].t - k[i].t > flat_tol) {
      out[i + 1].t = k[i + 1].t + added;
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < k.size() && k[j + 1].t - k[j].t <= flat_tol) ++j;
    ++run;
    const double len = k[j].x - k[i].x;
    const double slope = std::min(eps / (len * std::ldexp(1.0, run)), 1.0);
    for (std::size_t q = i + 1; q <= j; ++q) {
      out[q].t = k[q].t + added + slope * (k[q].x - k[i].x);
    }
    added += slope * len;
    i = j;
  }
  return MonotoneMap(std::move(out));
}

}  // namespace wmr
