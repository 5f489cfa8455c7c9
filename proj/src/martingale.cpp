#include "wmr/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "wmr/detail/simplex.hpp"
#include "wmr/errors.hpp"
#include "wmr/rearrangement.hpp"

namespace wmr {

namespace {

std::string dump_potentials(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  const PiecewiseLinearFn ua = potential(a);
  const PiecewiseLinearFn ub = potential(b);
  std::ostringstream os;
  os.precision(17);
  os << "u_eta at atoms of nu:";
  for (std::size_t j = 0; j < b.size(); ++j) os << " " << ua(b.atom(j));
  os << "; u_nu:";
  for (std::size_t j = 0; j < b.size(); ++j) os << " " << ub.values()[j];
  return os.str();
}

std::size_t nearest_atom(const DiscreteMeasure& m, double x) {
  auto it = std::lower_bound(m.atoms().begin(), m.atoms().end(), x);
  std::size_t k = static_cast<std::size_t>(it - m.atoms().begin());
  if (k == m.size()) return k - 1;
  if (k > 0 && x - m.atom(k - 1) < m.atom(k) - x) return k - 1;
  return k;
}

}  // namespace

double Coupling::row_mass(std::size_t i) const {
  double s = 0.0;
  for (const CouplingEntry& e : entries) {
    if (e.source == i) s += e.mass;
  }
  return s;
}

double Coupling::col_mass(std::size_t j) const {
  double s = 0.0;
  for (const CouplingEntry& e : entries) {
    if (e.target == j) s += e.mass;
  }
  return s;
}

double Coupling::marginal_defect() const {
  std::vector<double> rows(source.size(), 0.0);
  std::vector<double> cols(target.size(), 0.0);
  for (const CouplingEntry& e : entries) {
    rows[e.source] += e.mass;
    cols[e.target] += e.mass;
  }
  double d = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) d = std::max(d, std::abs(rows[i] - source.weight(i)));
  for (std::size_t j = 0; j < cols.size(); ++j) d = std::max(d, std::abs(cols[j] - target.weight(j)));
  return d;
}

double Coupling::barycenter_defect() const {
  std::vector<double> mass(source.size(), 0.0);
  std::vector<double> moment(source.size(), 0.0);
  for (const CouplingEntry& e : entries) {
    mass[e.source] += e.mass;
    moment[e.source] += e.mass * target.atom(e.target);
  }
  double d = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] > 0.0) d = std::max(d, std::abs(moment[i] / mass[i] - source.atom(i)));
  }
  return d;
}

void validate_coupling(const Coupling& c, double tol) {
  for (const CouplingEntry& e : c.entries) {
    if (e.source >= c.source.size() || e.target >= c.target.size() || !(e.mass > 0.0)) {
      throw CouplingError("coupling entry out of range or with non-positive mass");
    }
  }
  const double d = c.marginal_defect();
  if (d > tol) {
    std::ostringstream os;
    os << "coupling marginals off by " << d;
    throw CouplingError(os.str());
  }
}

MartingaleCoupling build_martingale_coupling(const DiscreteMeasure& eta, const DiscreteMeasure& nu) {
  const OrderVerdict v = convex_order_check(eta, nu, order_tolerance(eta, nu));
  if (!v.leq) {
    std::ostringstream os;
    os.precision(17);
    os << "martingale coupling needs eta <=_c nu; mean gap " << v.mean_gap << ", excess "
       << v.worst_excess << " at " << v.worst_point;
    throw OrderError(os.str());
  }
  // Mass on F stays put; each irreducible component is an independent
  // feasibility problem whose boundary atoms of nu carry just enough mass to
  // balance the component's total mass and mean.
  const std::vector<Interval> comps = irreducible_components(eta, nu);
  const double tol = order_tolerance(eta, nu);
  MartingaleCoupling out{eta, nu, {}};
  std::vector<bool> placed(eta.size(), false);
  for (const Interval& I : comps) {
    std::vector<std::size_t> src;
    double mass = 0.0;
    double moment = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i) {
      if (!I.contains(eta.atom(i))) continue;
      src.push_back(i);
      placed[i] = true;
      mass += eta.weight(i);
      moment += eta.weight(i) * eta.atom(i);
    }
    std::vector<std::size_t> tgt;
    std::vector<double> tw;
    const std::size_t jlo = nearest_atom(nu, I.lo);
    const std::size_t jhi = nearest_atom(nu, I.hi);
    double inner_mass = 0.0;
    double inner_moment = 0.0;
    for (std::size_t j = jlo + 1; j < jhi; ++j) {
      inner_mass += nu.weight(j);
      inner_moment += nu.weight(j) * nu.atom(j);
    }
    // a + b = mass - inner_mass, a lo + b hi = moment - inner_moment
    const double rest = mass - inner_mass;
    const double b_hi = std::max(0.0, ((moment - inner_moment) - rest * I.lo) / (I.hi - I.lo));
    const double a_lo = std::max(0.0, rest - b_hi);
    tgt.push_back(jlo);
    tw.push_back(a_lo);
    for (std::size_t j = jlo + 1; j < jhi; ++j) {
      tgt.push_back(j);
      tw.push_back(nu.weight(j));
    }
    tgt.push_back(jhi);
    tw.push_back(b_hi);

    const std::size_t n = src.size();
    const std::size_t m = tgt.size();
    const std::size_t rows = 2 * n + m;
    const std::size_t cols = n * m;
    std::vector<double> A(rows * cols, 0.0);
    std::vector<double> b(rows, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < m; ++c) {
        const std::size_t v = r * m + c;
        A[r * cols + v] = 1.0;
        A[(n + c) * cols + v] = 1.0;
        A[(n + m + r) * cols + v] = nu.atom(tgt[c]) - eta.atom(src[r]);
      }
      b[r] = eta.weight(src[r]);
    }
    for (std::size_t c = 0; c < m; ++c) b[n + c] = tw[c];
    const detail::FeasibilityResult res = detail::find_feasible_point(A, rows, cols, b);
    if (!res.feasible) {
      std::ostringstream os;
      os << "phase-1 simplex left infeasibility " << res.infeasibility << " on component ("
         << I.lo << ", " << I.hi << "); " << dump_potentials(eta, nu);
      throw ConsistencyError(os.str());
    }
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < m; ++c) {
        const double x = res.x[r * m + c];
        if (x > 1e-14) out.entries.push_back({src[r], tgt[c], x});
      }
    }
  }
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (placed[i]) continue;
    const std::size_t j = nearest_atom(nu, eta.atom(i));
    if (std::abs(nu.atom(j) - eta.atom(i)) > tol) {
      throw ConsistencyError("atom of eta outside every component is not an atom of nu; " +
                             dump_potentials(eta, nu));
    }
    out.entries.push_back({i, j, eta.weight(i)});
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const CouplingEntry& l, const CouplingEntry& r) {
    return std::tie(l.source, l.target) < std::tie(r.source, r.target);
  });
  const double scale = joint_scale(eta, nu);
  if (out.marginal_defect() > 1e-10 || out.barycenter_defect() > 1e-9 * scale) {
    std::ostringstream os;
    os << "martingale coupling defects: marginal " << out.marginal_defect() << ", barycenter "
       << out.barycenter_defect() << "; " << dump_potentials(eta, nu);
    throw ConsistencyError(os.str());
  }
  return out;
}

Coupling compose_with_map(const DiscreteMeasure& mu, const MonotoneMap& map,
                          const MartingaleCoupling& mg) {
  const DiscreteMeasure pf = pushforward(map, mu);
  const double tol = 1e-9 * joint_scale(mu, mg.source);
  if (!same_measure(pf, mg.source, tol)) {
    throw CompositionError("martingale source " + mg.source.describe() +
                           " is not the image of mu, which is " + pf.describe());
  }
  std::vector<std::vector<CouplingEntry>> rows(mg.source.size());
  for (const CouplingEntry& e : mg.entries) rows[e.source].push_back(e);
  Coupling out{mu, mg.target, {}};
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const std::size_t k = nearest_atom(mg.source, map(mu.atom(i)));
    const double wk = mg.source.weight(k);
    for (const CouplingEntry& e : rows[k]) {
      out.entries.push_back({i, e.target, mu.weight(i) * e.mass / wk});
    }
  }
  return out;
}

MartingaleDecomposition decompose_martingale(const MartingaleCoupling& mg) {
  const std::vector<Interval> comps = irreducible_components(mg.source, mg.target);
  const double tol = order_tolerance(mg.source, mg.target);
  MartingaleDecomposition out;
  for (const Interval& I : comps) out.pieces.push_back({I, {}, 0.0});
  for (std::size_t i = 0; i < mg.source.size(); ++i) {
    const double x = mg.source.atom(i);
    for (std::size_t k = 0; k + 1 < comps.size(); ++k) {
      if (comps[k].hi == x && comps[k + 1].lo == x) out.ambiguous_sources.push_back(i);
    }
  }
  for (const CouplingEntry& e : mg.entries) {
    const double x = mg.source.atom(e.source);
    const double y = mg.target.atom(e.target);
    auto it = std::find_if(comps.begin(), comps.end(),
                           [&](const Interval& I) { return I.contains(x); });
    std::ostringstream os;
    os.precision(17);
    if (it == comps.end()) {
      if (std::abs(y - x) > tol) {
        os << "entry (" << x << " -> " << y << ", mass " << e.mass
           << ") leaves a fixed point of the source/target potentials";
        throw StructureError(os.str());
      }
      out.fixed.push_back(e);
      continue;
    }
    if (!it->contains_closed(y, tol)) {
      os << "entry (" << x << " -> " << y << ", mass " << e.mass << ") leaves component ("
         << it->lo << ", " << it->hi << ")";
      throw StructureError(os.str());
    }
    ComponentPiece& piece = out.pieces[static_cast<std::size_t>(it - comps.begin())];
    piece.entries.push_back(e);
    piece.mass += e.mass;
  }
  return out;
}

MonotoneMap barycenter_map(const Coupling& pi) {
  std::vector<double> mass(pi.source.size(), 0.0);
  std::vector<double> moment(pi.source.size(), 0.0);
  for (const CouplingEntry& e : pi.entries) {
    mass[e.source] += e.mass;
    moment[e.source] += e.mass * pi.target.atom(e.target);
  }
  std::vector<double> t(pi.source.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = moment[i] / mass[i];
  return MonotoneMap::on_atoms(pi.source, std::move(t));
}

CertificateReport optimality_certificate(const Coupling& pi, const DiscreteMeasure& mu,
                                         const DiscreteMeasure& nu, const CostSpec& cost,
                                         double tol) {
  if (!same_measure(pi.source, mu, 1e-12) || !same_measure(pi.target, nu, 1e-12)) {
    throw CouplingError("coupling marginals are not (mu, nu)");
  }
  validate_coupling(pi);

  CertificateReport rep;
  const MonotoneMap bary = barycenter_map(pi);
  const std::vector<double> t = bary.images(mu);
  const WeakSolution sol = weak_monotone_rearrangement(mu, nu);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    rep.map_gap = std::max(rep.map_gap, std::abs(t[i] - sol.images[i]));
  }
  rep.admissible = verify_admissible(bary, mu, nu, tol).ok();

  // Second stage: rows regrouped by their barycenter.
  const double scale = joint_scale(mu, nu);
  const DiscreteMeasure eta = pushforward(mu, t, 1e-12 * scale);
  std::vector<double> mass(eta.size(), 0.0);
  std::vector<double> moment(eta.size(), 0.0);
  for (const CouplingEntry& e : pi.entries) {
    const std::size_t k = nearest_atom(eta, t[e.source]);
    mass[k] += e.mass;
    moment[k] += e.mass * nu.atom(e.target);
  }
  for (std::size_t k = 0; k < eta.size(); ++k) {
    rep.martingale_defect = std::max(rep.martingale_defect, std::abs(moment[k] / mass[k] - eta.atom(k)));
  }

  rep.cost = transport_cost(mu, t, cost);
  rep.solver_value = solve_weak_transport(mu, nu, cost).value;

  std::ostringstream os;
  os.precision(17);
  if (rep.map_gap > tol) {
    os << "barycenter map differs from the rearrangement by " << rep.map_gap;
    rep.messages.push_back(os.str());
    os.str("");
  }
  if (!rep.admissible) rep.messages.push_back("barycenter map is not admissible");
  if (rep.martingale_defect > 1e-9 * scale) {
    os << "second stage is not a martingale (defect " << rep.martingale_defect << ")";
    rep.messages.push_back(os.str());
  }
  rep.certified = rep.messages.empty();
  return rep;
}

bool supports_overlap(const DiscreteMeasure& p, const DiscreteMeasure& q) {
  auto one_way = [](double pl, double ph, double ql, double qh) {
    // (pl, ph) open meets [ql, qh]
    return pl < ph && ql < ph && qh > pl;
  };
  return one_way(p.min(), p.max(), q.min(), q.max()) ||
         one_way(q.min(), q.max(), p.min(), p.max());
}

namespace {

// Mass alpha taken from the bottom of m, as (atom, mass) pairs.
std::vector<std::pair<double, double>> lower_part(const DiscreteMeasure& m, double alpha) {
  std::vector<std::pair<double, double>> out;
  if (alpha <= 0.0) return out;
  const std::size_t k = m.quantile_index(std::min(alpha, 1.0));
  double below = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    out.emplace_back(m.atom(i), m.weight(i));
    below += m.weight(i);
  }
  const double rest = std::min(alpha, 1.0) - below;
  if (rest > 0.0) out.emplace_back(m.atom(k), rest);
  return out;
}

}  // namespace

std::pair<DiscreteMeasure, DiscreteMeasure> competitor_curve(const DiscreteMeasure& p,
                                                             const DiscreteMeasure& q,
                                                             double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
  if (alpha == 1.0) return {p, q};
  std::map<double, double> pa;
  for (const auto& [x, w] : lower_part(p, alpha)) pa[x] += w;
  for (const auto& [x, w] : lower_part(q, 1.0 - alpha)) pa[x] += w;
  std::map<double, double> total;
  for (std::size_t i = 0; i < p.size(); ++i) total[p.atom(i)] += p.weight(i);
  for (std::size_t j = 0; j < q.size(); ++j) total[q.atom(j)] += q.weight(j);

  std::vector<double> xa, wa, xb, wb;
  for (const auto& [x, w] : pa) {
    xa.push_back(x);
    wa.push_back(w);
  }
  for (const auto& [x, w] : total) {
    auto it = pa.find(x);
    const double rest = w - (it == pa.end() ? 0.0 : it->second);
    xb.push_back(x);
    wb.push_back(rest > 1e-15 ? rest : 0.0);
  }
  return {DiscreteMeasure::from_masses(std::move(xa), std::move(wa)),
          DiscreteMeasure::from_masses(std::move(xb), std::move(wb))};
}

DiscreteMeasure row_conditional(const Coupling& c, std::size_t i) {
  std::vector<double> atoms;
  std::vector<double> masses;
  double total = 0.0;
  for (const CouplingEntry& e : c.entries) {
    if (e.source != i) continue;
    atoms.push_back(c.target.atom(e.target));
    masses.push_back(e.mass);
    total += e.mass;
  }
  for (double& w : masses) w /= total;
  return DiscreteMeasure(std::move(atoms), std::move(masses));
}

}  // namespace wmr
