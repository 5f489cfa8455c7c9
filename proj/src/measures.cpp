#include "wmr/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "wmr/errors.hpp"

namespace wmr {

namespace {

constexpr double kNormalisationTol = 1e-9;
// Slack used when comparing a level against cumulative weights built from prefix sums.
constexpr double kLevelSlack = 1e-12;

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.size() != weights.size()) {
    throw MeasureError("atoms and weights differ in length");
  }
  if (atoms.empty()) {
    throw MeasureError("measure needs at least one atom");
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!std::isfinite(atoms[i]) || !std::isfinite(weights[i])) {
      throw MeasureError("non-finite atom or weight");
    }
    if (weights[i] <= 0.0) {
      throw MeasureError("weights must be positive");
    }
  }
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return atoms[l] < atoms[r]; });
  for (std::size_t k : order) {
    if (!atoms_.empty() && atoms_.back() == atoms[k]) {
      weights_.back() += weights[k];
    } else {
      atoms_.push_back(atoms[k]);
      weights_.push_back(weights[k]);
    }
  }
  finish();
}

void DiscreteMeasure::finish() {
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - 1.0) > kNormalisationTol) {
    std::ostringstream os;
    os << "weights sum to " << total << ", expected 1";
    throw MeasureError(os.str());
  }
  if (total != 1.0) {
    for (double& w : weights_) w /= total;
  }
  cumulative_.resize(weights_.size());
  double acc = 0.0;
  mean_ = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    acc += weights_[i];
    cumulative_[i] = acc;
    mean_ += weights_[i] * atoms_[i];
  }
  cumulative_.back() = 1.0;
}

DiscreteMeasure DiscreteMeasure::from_masses(std::vector<double> atoms,
                                             std::vector<double> masses,
                                             double drop_below) {
  if (atoms.size() != masses.size()) {
    throw MeasureError("atoms and masses differ in length");
  }
  std::vector<double> a;
  std::vector<double> w;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (masses[i] > drop_below) {
      a.push_back(atoms[i]);
      w.push_back(masses[i]);
    }
  }
  return DiscreteMeasure(std::move(a), std::move(w));
}

DiscreteMeasure DiscreteMeasure::dirac(double x) { return DiscreteMeasure({x}, {1.0}); }

DiscreteMeasure DiscreteMeasure::uniform(std::vector<double> atoms) {
  const std::size_t n = atoms.size();
  return DiscreteMeasure(std::move(atoms), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double DiscreteMeasure::cdf(double x) const {
  auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x);
  if (it == atoms_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

std::size_t DiscreteMeasure::quantile_index(double level) const {
  if (!(level > 0.0 && level <= 1.0)) {
    throw DomainError("quantile level must lie in (0, 1]");
  }
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), level - kLevelSlack);
  if (it == cumulative_.end()) return atoms_.size() - 1;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

double DiscreteMeasure::quantile(double level) const { return atoms_[quantile_index(level)]; }

DiscreteMeasure DiscreteMeasure::shifted(double h) const {
  DiscreteMeasure out = *this;
  for (double& x : out.atoms_) x += h;
  out.mean_ += h;
  return out;
}

std::string DiscreteMeasure::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "{";
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (i) os << ", ";
    os << weights_[i] << "@" << atoms_[i];
  }
  os << "}";
  return os.str();
}

// ---------------------------------------------------------------------------

PiecewiseLinearFn::PiecewiseLinearFn(std::vector<double> breakpoints, std::vector<double> values,
                                     double left_slope, double right_slope)
    : breakpoints_(std::move(breakpoints)),
      values_(std::move(values)),
      left_slope_(left_slope),
      right_slope_(right_slope) {
  if (breakpoints_.empty() || breakpoints_.size() != values_.size()) {
    throw DomainError("piecewise-linear function needs matching, non-empty breakpoints/values");
  }
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] > breakpoints_[i - 1])) {
      throw DomainError("breakpoints must be strictly increasing");
    }
  }
}

double PiecewiseLinearFn::operator()(double y) const {
  if (y <= breakpoints_.front()) {
    return values_.front() + left_slope_ * (y - breakpoints_.front());
  }
  if (y >= breakpoints_.back()) {
    return values_.back() + right_slope_ * (y - breakpoints_.back());
  }
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), y);
  const std::size_t j = static_cast<std::size_t>(it - breakpoints_.begin());
  const double x0 = breakpoints_[j - 1];
  const double x1 = breakpoints_[j];
  const double lambda = (y - x0) / (x1 - x0);
  return values_[j - 1] + lambda * (values_[j] - values_[j - 1]);
}

double PiecewiseLinearFn::slope_after(std::size_t i) const {
  if (i + 1 >= breakpoints_.size()) return right_slope_;
  return (values_[i + 1] - values_[i]) / (breakpoints_[i + 1] - breakpoints_[i]);
}

double PiecewiseLinearFn::right_derivative(double y) const {
  if (y < breakpoints_.front()) return left_slope_;
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), y);
  return slope_after(static_cast<std::size_t>(it - breakpoints_.begin()) - 1);
}

bool PiecewiseLinearFn::is_convex(double tol) const {
  double prev = left_slope_;
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    const double s = slope_after(i);
    if (s < prev - tol) return false;
    prev = s;
  }
  return true;
}

namespace {

void push_point(std::vector<double>& xs, std::vector<double>& ys, double x, double y) {
  const double eps = 1e-14 * std::max(1.0, std::abs(x));
  if (!xs.empty() && x <= xs.back() + eps) return;
  xs.push_back(x);
  ys.push_back(y);
}

std::vector<double> merged_breakpoints(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g) {
  std::vector<double> out;
  out.reserve(f.size() + g.size());
  std::merge(f.breakpoints().begin(), f.breakpoints().end(), g.breakpoints().begin(),
             g.breakpoints().end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

PiecewiseLinearFn PiecewiseLinearFn::max(const PiecewiseLinearFn& f, const PiecewiseLinearFn& g) {
  const std::vector<double> grid = merged_breakpoints(f, g);
  std::vector<double> xs;
  std::vector<double> ys;
  auto diff = [&](double y) { return f(y) - g(y); };

  // Crossing on the left ray.
  {
    const double b = grid.front();
    const double ds = f.left_slope() - g.left_slope();
    if (ds != 0.0) {
      const double y = b - diff(b) / ds;
      if (y < b) push_point(xs, ys, y, std::max(f(y), g(y)));
    }
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double y0 = grid[k];
    push_point(xs, ys, y0, std::max(f(y0), g(y0)));
    if (k + 1 < grid.size()) {
      const double y1 = grid[k + 1];
      const double d0 = diff(y0);
      const double d1 = diff(y1);
      if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) {
        const double y = y0 + (y1 - y0) * d0 / (d0 - d1);
        if (y > y0 && y < y1) push_point(xs, ys, y, std::max(f(y), g(y)));
      }
    }
  }
  {
    const double b = grid.back();
    const double ds = f.right_slope() - g.right_slope();
    if (ds != 0.0) {
      const double y = b - diff(b) / ds;
      if (y > b) push_point(xs, ys, y, std::max(f(y), g(y)));
    }
  }
  return PiecewiseLinearFn(std::move(xs), std::move(ys), std::min(f.left_slope(), g.left_slope()),
                           std::max(f.right_slope(), g.right_slope()));
}

PiecewiseLinearFn PiecewiseLinearFn::lower_convex_envelope(const PiecewiseLinearFn& f,
                                                           const PiecewiseLinearFn& g) {
  const std::vector<double> grid = merged_breakpoints(f, g);
  // Crossings of f and g are concave kinks of min(f, g), so the envelope's
  // vertices are among the merged breakpoints.
  std::vector<double> hx;
  std::vector<double> hy;
  auto cross = [](double ax, double ay, double bx, double by, double cx, double cy) {
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  };
  for (double y : grid) {
    const double v = std::min(f(y), g(y));
    while (hx.size() >= 2 &&
           cross(hx[hx.size() - 2], hy[hy.size() - 2], hx.back(), hy.back(), y, v) <= 0.0) {
      hx.pop_back();
      hy.pop_back();
    }
    hx.push_back(y);
    hy.push_back(v);
  }
  const double left = std::max(f.left_slope(), g.left_slope());
  const double right = std::min(f.right_slope(), g.right_slope());
  std::size_t first = 0;
  while (first + 1 < hx.size() &&
         (hy[first + 1] - hy[first]) / (hx[first + 1] - hx[first]) < left) {
    ++first;
  }
  std::size_t last = hx.size() - 1;
  while (last > first && (hy[last] - hy[last - 1]) / (hx[last] - hx[last - 1]) > right) {
    --last;
  }
  std::vector<double> xs(hx.begin() + static_cast<std::ptrdiff_t>(first),
                         hx.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  std::vector<double> ys(hy.begin() + static_cast<std::ptrdiff_t>(first),
                         hy.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  return PiecewiseLinearFn(std::move(xs), std::move(ys), left, right);
}

// ---------------------------------------------------------------------------

double mean(const DiscreteMeasure& m) { return m.mean(); }

double quantile(const DiscreteMeasure& m, double level) { return m.quantile(level); }

PiecewiseLinearFn potential(const DiscreteMeasure& m) {
  const std::size_t n = m.size();
  const auto x = m.atoms();
  const auto w = m.weights();
  // left[j] = sum_{i<j} w_i (x_j - x_i), right[j] = sum_{i>j} w_i (x_i - x_j).
  std::vector<double> left(n, 0.0);
  std::vector<double> right(n, 0.0);
  double mass = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    mass += w[j - 1];
    left[j] = left[j - 1] + mass * (x[j] - x[j - 1]);
  }
  mass = 0.0;
  for (std::size_t j = n - 1; j-- > 0;) {
    mass += w[j + 1];
    right[j] = right[j + 1] + mass * (x[j + 1] - x[j]);
  }
  std::vector<double> values(n);
  for (std::size_t j = 0; j < n; ++j) values[j] = left[j] + right[j];
  return PiecewiseLinearFn(std::vector<double>(x.begin(), x.end()), std::move(values), -1.0, 1.0);
}

PiecewiseLinearFn quantile_integral(const DiscreteMeasure& m) {
  const std::size_t n = m.size();
  std::vector<double> levels(n + 1);
  std::vector<double> values(n + 1);
  levels[0] = 0.0;
  values[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    levels[i + 1] = m.cumulative()[i];
    values[i + 1] = values[i] + m.weight(i) * m.atom(i);
  }
  return PiecewiseLinearFn(std::move(levels), std::move(values), m.min(), m.max());
}

DiscreteMeasure measure_from_potential(const PiecewiseLinearFn& u, double jump_tol) {
  if (std::abs(u.left_slope() + 1.0) > 1e-9 || std::abs(u.right_slope() - 1.0) > 1e-9) {
    throw DomainError("a potential has outer slopes -1 and +1");
  }
  std::vector<double> atoms;
  std::vector<double> masses;
  double prev = u.left_slope();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double s = u.slope_after(i);
    const double jump = s - prev;
    if (jump > jump_tol) {
      atoms.push_back(u.breakpoints()[i]);
      masses.push_back(0.5 * jump);
    }
    prev = s;
  }
  return DiscreteMeasure::from_masses(std::move(atoms), std::move(masses));
}

double joint_scale(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  const double lo = std::min(a.min(), b.min());
  const double hi = std::max(a.max(), b.max());
  return std::max(1.0, hi - lo);
}

double order_tolerance(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return 1e-9 * joint_scale(a, b);
}

OrderVerdict convex_order_check(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol) {
  OrderVerdict v;
  v.mean_gap = std::abs(a.mean() - b.mean());
  const PiecewiseLinearFn ua = potential(a);
  const PiecewiseLinearFn ub = potential(b);
  v.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < b.size(); ++j) {
    const double y = b.atom(j);
    const double excess = ua(y) - ub.values()[j];
    if (excess > v.worst_excess) {
      v.worst_excess = excess;
      v.worst_point = y;
    }
  }
  v.leq = v.mean_gap <= tol && v.worst_excess <= tol;
  return v;
}

bool convex_order_leq(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol) {
  return convex_order_check(a, b, tol).leq;
}

bool convex_order_leq(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return convex_order_leq(a, b, order_tolerance(a, b));
}

std::vector<Interval> irreducible_components(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                             double tol) {
  const OrderVerdict verdict = convex_order_check(a, b, tol);
  if (!verdict.leq) {
    std::ostringstream os;
    os.precision(17);
    os << "irreducible components need a <=_c b; mean gap " << verdict.mean_gap
       << ", potential excess " << verdict.worst_excess << " at " << verdict.worst_point;
    throw OrderError(os.str());
  }
  const PiecewiseLinearFn ua = potential(a);
  const PiecewiseLinearFn ub = potential(b);
  const std::size_t m = b.size();
  std::vector<double> gap(m);
  for (std::size_t j = 0; j < m; ++j) gap[j] = ub.values()[j] - ua(b.atom(j));

  // Between consecutive atoms of b the gap u_b - u_a is concave, so its zero
  // set is a union of b-atoms and whole b-segments. A segment is strict iff
  // the gap exceeds tol at one of its endpoints or at an interior atom of a.
  std::vector<Interval> out;
  std::size_t ia = 0;
  bool open = false;
  double start = 0.0;
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double y0 = b.atom(j);
    const double y1 = b.atom(j + 1);
    double best = std::max(gap[j], gap[j + 1]);
    while (ia < a.size() && a.atom(ia) <= y0) ++ia;
    for (std::size_t k = ia; k < a.size() && a.atom(k) < y1; ++k) {
      best = std::max(best, ub(a.atom(k)) - ua.values()[k]);
    }
    if (!(best > tol)) continue;
    if (!open) {
      open = true;
      start = y0;
    }
    if (gap[j + 1] <= tol) {
      out.push_back({start, y1});
      open = false;
    }
  }
  if (open) out.push_back({start, b.max()});
  return out;
}

std::vector<Interval> irreducible_components(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return irreducible_components(a, b, order_tolerance(a, b));
}

double wasserstein(const DiscreteMeasure& a, const DiscreteMeasure& b, double rho) {
  if (!(rho >= 1.0) || !std::isfinite(rho)) {
    throw DomainError("wasserstein order must be a finite rho >= 1");
  }
  const auto ca = a.cumulative();
  const auto cb = b.cumulative();
  std::size_t i = 0;
  std::size_t j = 0;
  double level = 0.0;
  double total = 0.0;
  while (i < a.size() && j < b.size()) {
    const double next = std::min(ca[i], cb[j]);
    const double width = next - level;
    if (width > 0.0) {
      total += width * std::pow(std::abs(a.atom(i) - b.atom(j)), rho);
    }
    level = std::max(level, next);
    if (ca[i] <= next) ++i;
    if (j < b.size() && cb[j] <= next) ++j;
  }
  return std::pow(total, 1.0 / rho);
}

DiscreteMeasure quantize(const DiscreteMeasure& m, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw DomainError("quantization width must be positive");
  }
  std::vector<double> atoms;
  std::vector<double> masses;
  double bin = 0.0;
  double mass = 0.0;
  double moment = 0.0;
  bool have = false;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double k = std::floor(m.atom(i) / delta);
    if (have && k != bin) {
      atoms.push_back(moment / mass);
      masses.push_back(mass);
      mass = moment = 0.0;
    }
    bin = k;
    have = true;
    mass += m.weight(i);
    moment += m.weight(i) * m.atom(i);
  }
  atoms.push_back(moment / mass);
  masses.push_back(mass);
  return DiscreteMeasure(std::move(atoms), std::move(masses));
}

bool same_measure(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a.atom(i) - b.atom(i)) > tol || std::abs(a.weight(i) - b.weight(i)) > tol) {
      return false;
    }
  }
  return true;
}

}  // namespace wmr
