#include "wmr/stability.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <sstream>

#include "wmr/errors.hpp"
#include "wmr/martingale.hpp"
#include "wmr/rearrangement.hpp"

namespace wmr {

namespace {

DiscreteMeasure sample(const DiscreteMeasure& m, std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> atoms(n);
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  for (double& a : atoms) a = m.quantile(1.0 - u(rng));
  return DiscreteMeasure::from_masses(std::move(atoms), std::move(w));
}

}  // namespace

PerturbationLadder PerturbationLadder::shift(DiscreteMeasure mu, DiscreteMeasure nu,
                                             std::vector<double> h, double rho) {
  return PerturbationLadder{std::move(mu), std::move(nu), LadderKind::Shift, std::move(h), 0, rho};
}

PerturbationLadder PerturbationLadder::empirical(DiscreteMeasure mu, DiscreteMeasure nu,
                                                 std::vector<double> sizes, std::uint64_t seed,
                                                 double rho) {
  return PerturbationLadder{std::move(mu), std::move(nu), LadderKind::Empirical, std::move(sizes),
                            seed, rho};
}

PerturbationLadder PerturbationLadder::quantized(DiscreteMeasure mu, DiscreteMeasure nu,
                                                 std::vector<double> deltas, double rho) {
  return PerturbationLadder{std::move(mu), std::move(nu), LadderKind::Quantize, std::move(deltas),
                            0, rho};
}

std::pair<DiscreteMeasure, DiscreteMeasure> PerturbationLadder::rung(std::size_t k) const {
  if (k < 1 || k > steps.size()) throw DomainError("rung index out of range");
  const double s = steps[k - 1];
  switch (kind) {
    case LadderKind::Shift:
      return {mu, nu.shifted(s)};
    case LadderKind::Empirical: {
      if (!(s >= 1.0)) throw DomainError("empirical sample size must be at least 1");
      std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * k);
      const auto n = static_cast<std::size_t>(std::llround(s));
      DiscreteMeasure a = sample(mu, n, rng);
      DiscreteMeasure b = sample(nu, n, rng);
      return {std::move(a), std::move(b)};
    }
    case LadderKind::Quantize:
      return {quantize(mu, s), quantize(nu, s)};
  }
  throw DomainError("unknown ladder kind");
}

std::pair<double, double> quantile_map_gap(const DiscreteMeasure& a, const std::vector<double>& fa,
                                           const DiscreteMeasure& b, const std::vector<double>& gb,
                                           double eps) {
  const auto ca = a.cumulative();
  const auto cb = b.cumulative();
  std::size_t i = 0;
  std::size_t j = 0;
  double level = 0.0;
  double measure = 0.0;
  double sup = 0.0;
  while (i < a.size() && j < b.size()) {
    const double next = std::min(ca[i], cb[j]);
    if (next > level) {
      const double d = std::abs(fa[i] - gb[j]);
      sup = std::max(sup, d);
      if (d > eps) measure += next - level;
      level = next;
    }
    if (ca[i] <= next) ++i;
    if (j < b.size() && cb[j] <= next) ++j;
  }
  return {measure, sup};
}

StabilityReport run_stability_experiment(const PerturbationLadder& ladder, const CostSpec& cost,
                                         std::vector<double> eps_grid) {
  if (cost.growth_exponent() > ladder.rho) {
    std::ostringstream os;
    os << "cost " << cost.name() << " grows like |x|^" << cost.growth_exponent()
       << ", faster than the ladder's rho = " << ladder.rho;
    throw HypothesisError(os.str());
  }
  const WeakSolution base = solve_weak_transport(ladder.mu, ladder.nu, cost);
  StabilityReport report;
  report.base_value = base.value;
  report.eps_grid = std::move(eps_grid);
  report.quantile_identification = ladder.kind != LadderKind::Shift;

  auto solve_rung = [&](std::size_t k) {
    const auto [mk, nk] = ladder.rung(k);
    const WeakSolution s = solve_weak_transport(mk, nk, cost);
    RungReport r;
    r.k = k;
    r.step = ladder.steps[k - 1];
    r.value = s.value;
    r.value_gap = std::abs(s.value - base.value);
    r.optimizer_gap = wasserstein(s.pushforward, base.pushforward, 1.0);
    for (double eps : report.eps_grid) {
      r.map_gaps.push_back(quantile_map_gap(mk, s.images, ladder.mu, base.images, eps).first);
    }
    r.map_sup_gap = quantile_map_gap(mk, s.images, ladder.mu, base.images, 0.0).second;
    return r;
  };

  std::vector<std::future<RungReport>> jobs;
  for (std::size_t k = 1; k <= ladder.length(); ++k) {
    jobs.push_back(std::async(std::launch::async, solve_rung, k));
  }
  for (auto& j : jobs) report.rungs.push_back(j.get());
  return report;
}

std::vector<double> eta_transfer_images(const DiscreteMeasure& eta, const DiscreteMeasure& nu,
                                        const DiscreteMeasure& nu_k) {
  const MartingaleCoupling M = build_martingale_coupling(eta, nu);
  // Conditional mean of nu_k over nu's quantile block j.
  const PiecewiseLinearFn g = quantile_integral(nu_k);
  std::vector<double> block(nu.size());
  double prev = 0.0;
  double gprev = 0.0;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    const double c = j + 1 == nu.size() ? 1.0 : nu.cumulative()[j];
    const double gc = g(c);
    block[j] = (gc - gprev) / (c - prev);
    prev = c;
    gprev = gc;
  }
  std::vector<double> num(eta.size(), 0.0);
  std::vector<double> den(eta.size(), 0.0);
  for (const CouplingEntry& e : M.entries) {
    num[e.source] += e.mass * block[e.target];
    den[e.source] += e.mass;
  }
  for (std::size_t i = 0; i < eta.size(); ++i) num[i] /= den[i];
  return num;
}

DiscreteMeasure eta_transfer(const DiscreteMeasure& eta, const DiscreteMeasure& nu,
                             const DiscreteMeasure& nu_k) {
  return pushforward(eta, eta_transfer_images(eta, nu, nu_k),
                     1e-12 * std::max(1.0, joint_scale(nu, nu_k)));
}

Truncation truncate_mean_preserving(const DiscreteMeasure& eta, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
  const std::vector<double> all(eta.weights().begin(), eta.weights().end());
  if (eta.size() == 1) return {all, eta};
  const PiecewiseLinearFn g = quantile_integral(eta);
  const double m = eta.mean();
  // Left removal a, right removal eps - a; f is nonincreasing in a.
  auto f = [&](double a) { return g(a) + m - g(1.0 - eps + a) - m * eps; };
  double lo = 0.0;
  double hi = eps;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (f(mid) > 0.0) lo = mid; else hi = mid;
  }
  const double a = std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
  const double b = eps - a;

  std::vector<double> sub(all);
  double left = a;
  for (std::size_t i = 0; i < sub.size() && left > 0.0; ++i) {
    const double take = std::min(sub[i], left);
    sub[i] -= take;
    left -= take;
  }
  double right = b;
  for (std::size_t i = sub.size(); i-- > 0 && right > 0.0;) {
    const double take = std::min(sub[i], right);
    sub[i] -= take;
    right -= take;
  }
  std::vector<double> atoms;
  std::vector<double> masses;
  double kept = 0.0;
  for (double s : sub) kept += s;
  for (std::size_t i = 0; i < sub.size(); ++i) {
    if (sub[i] > 1e-15) {
      atoms.push_back(eta.atom(i));
      masses.push_back(sub[i] / kept);
    }
  }
  return {std::move(sub), DiscreteMeasure(std::move(atoms), std::move(masses))};
}

DiscreteMeasure finite_support_approx(const DiscreteMeasure& eta, int k) {
  if (k < 1) throw DomainError("finite_support_approx needs k >= 1");
  const double lo = eta.min();
  const double width = eta.diameter() / k;
  std::vector<double> atoms;
  std::vector<double> masses;
  long cell = -1;
  std::size_t first = 0;
  double mass = 0.0;
  double moment = 0.0;
  auto flush = [&](std::size_t end) {
    atoms.push_back(end - first == 1 ? eta.atom(first) : moment / mass);
    masses.push_back(mass);
    mass = moment = 0.0;
    first = end;
  };
  for (std::size_t i = 0; i < eta.size(); ++i) {
    long c = width > 0.0 ? static_cast<long>(std::floor((eta.atom(i) - lo) / width)) : 0;
    c = std::min<long>(c, k - 1);
    if (cell >= 0 && c != cell) flush(i);
    cell = c;
    mass += eta.weight(i);
    moment += eta.weight(i) * eta.atom(i);
  }
  flush(eta.size());
  return DiscreteMeasure(std::move(atoms), std::move(masses));
}

}  // namespace wmr
