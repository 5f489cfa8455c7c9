#include "doctest.h"
#include "support.hpp"
#include "wmr/errors.hpp"
#include "wmr/measures.hpp"

using namespace wmr;
using wmr::testing::Rng;

namespace {

DiscreteMeasure two(double a, double b) { return DiscreteMeasure({a, b}, {0.5, 0.5}); }

// Brute-force convex order over hinge functions |x - c| on a fine grid plus
// the mean; independent of the potential-at-atoms criterion.
bool hinge_leq(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol) {
  if (std::abs(a.mean() - b.mean()) > tol) return false;
  const double lo = std::min(a.min(), b.min()) - 0.5;
  const double hi = std::max(a.max(), b.max()) + 0.5;
  std::vector<double> probes;
  for (int k = 0; k <= 4000; ++k) probes.push_back(lo + (hi - lo) * k / 4000.0);
  for (double y : b.atoms()) probes.push_back(y);
  for (double c : probes) {
    double ia = 0.0;
    double ib = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) ia += a.weight(i) * std::abs(a.atom(i) - c);
    for (std::size_t j = 0; j < b.size(); ++j) ib += b.weight(j) * std::abs(b.atom(j) - c);
    if (ia > ib + tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("construction merges duplicates and validates weights") {
  DiscreteMeasure m({1.0, 0.0, 1.0}, {0.25, 0.5, 0.25});
  REQUIRE(m.size() == 2);
  CHECK(m.atom(0) == 0.0);
  CHECK(m.weight(1) == doctest::Approx(0.5));
  CHECK(m.cumulative().back() == 1.0);
  CHECK_THROWS_AS(DiscreteMeasure({0.0}, {0.5}), MeasureError);
  CHECK_THROWS_AS(DiscreteMeasure({0.0, 1.0}, {1.0, 0.0}), MeasureError);
  CHECK_THROWS_AS(DiscreteMeasure({}, {}), MeasureError);
  DiscreteMeasure rounded({0.0, 1.0}, {0.3333333333, 0.6666666667});
  CHECK(rounded.weight(0) + rounded.weight(1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("mean") {
  CHECK(mean(DiscreteMeasure::dirac(0.0)) == 0.0);
  CHECK(mean(two(-1, 1)) == 0.0);
  CHECK(mean(DiscreteMeasure({0.0, 4.0}, {0.25, 0.75})) == doctest::Approx(3.0));
}

TEST_CASE("quantile") {
  CHECK(quantile(two(-1, 1), 0.5) == -1.0);
  CHECK(quantile(two(-1, 1), 0.75) == 1.0);
  CHECK(quantile(DiscreteMeasure({0.0, 4.0}, {0.25, 0.75}), 0.25) == 0.0);
  CHECK(quantile(two(-1, 1), 1.0) == 1.0);
  CHECK_THROWS_AS(quantile(two(-1, 1), 0.0), DomainError);
  CHECK_THROWS_AS(quantile(two(-1, 1), 1.5), DomainError);
}

TEST_CASE("potential") {
  CHECK(potential(DiscreteMeasure::dirac(0.0))(2.0) == 2.0);
  const PiecewiseLinearFn u = potential(two(-1, 1));
  CHECK(u(0.0) == 1.0);
  CHECK(u(2.0) == 2.0);
  CHECK(potential(DiscreteMeasure({0.0, 4.0}, {0.25, 0.75}))(1.0) == doctest::Approx(2.5));
  CHECK(u.left_slope() == -1.0);
  CHECK(u.right_slope() == 1.0);
  CHECK(u.is_convex());
}

TEST_CASE("convex order examples") {
  CHECK(convex_order_leq(DiscreteMeasure::dirac(0.0), two(-1, 1), 1e-9));
  CHECK_FALSE(convex_order_leq(two(-1, 1), DiscreteMeasure::dirac(0.0), 1e-9));
  CHECK_FALSE(convex_order_leq(two(-2, 2), two(-1, 1), 1e-9));
  const OrderVerdict v = convex_order_check(two(-2, 2), two(-1, 1), 1e-9);
  CHECK(v.worst_excess == doctest::Approx(1.0));
}

TEST_CASE("irreducible components examples") {
  auto c = irreducible_components(DiscreteMeasure::dirac(0.0), two(-1, 1), 1e-9);
  REQUIRE(c.size() == 1);
  CHECK(c[0] == Interval{-1.0, 1.0});

  CHECK(irreducible_components(two(-1, 1), two(-1, 1), 1e-9).empty());

  // The potentials of these two coincide on [-1, 1]: u_a = u_b = 2 there.
  const DiscreteMeasure nu({-3.0, -1.0, 1.0, 3.0}, {0.25, 0.25, 0.25, 0.25});
  c = irreducible_components(two(-2, 2), nu, 1e-9);
  REQUIRE(c.size() == 2);
  CHECK(c[0] == Interval{-3.0, -1.0});
  CHECK(c[1] == Interval{1.0, 3.0});

  CHECK_THROWS_AS(irreducible_components(two(-1, 1), DiscreteMeasure::dirac(0.0), 1e-9),
                  OrderError);
}

TEST_CASE("irreducible components touching at a single atom") {
  // Potentials meet at 0 (both equal 2) and at the outer atoms.
  const DiscreteMeasure b({-3.0, 0.0, 3.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  const DiscreteMeasure a = two(-2, 2);
  REQUIRE(convex_order_leq(a, b, 1e-9));
  const auto c = irreducible_components(a, b, 1e-9);
  REQUIRE(c.size() == 2);
  CHECK(c[0] == Interval{-3.0, 0.0});
  CHECK(c[1] == Interval{0.0, 3.0});
}

TEST_CASE("wasserstein") {
  CHECK(wasserstein(DiscreteMeasure::dirac(0.0), DiscreteMeasure::dirac(1.0), 1.0) == 1.0);
  CHECK(wasserstein(two(-1, 1), two(-1, 1), 3.0) == 0.0);
  CHECK(wasserstein(two(0, 2), DiscreteMeasure::dirac(1.0), 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(wasserstein(two(0, 2), two(0, 2), 0.5), DomainError);
}

TEST_CASE("quantize") {
  CHECK(same_measure(quantize(DiscreteMeasure::dirac(0.0), 0.3), DiscreteMeasure::dirac(0.0), 0.0));
  const DiscreteMeasure q = quantize(two(0.1, 0.2), 1.0);
  REQUIRE(q.size() == 1);
  CHECK(q.atom(0) == doctest::Approx(0.15));
  CHECK(same_measure(quantize(two(-1, 1), 0.5), two(-1, 1), 0.0));
  CHECK_THROWS_AS(quantize(two(0, 1), 0.0), DomainError);
}

TEST_CASE("lower convex envelope and max of potentials") {
  const PiecewiseLinearFn f = potential(two(-1, 1));
  const PiecewiseLinearFn g = potential(DiscreteMeasure({-3.0, 3.0}, {0.1, 0.9}));
  const PiecewiseLinearFn mx = PiecewiseLinearFn::max(f, g);
  const PiecewiseLinearFn env = PiecewiseLinearFn::lower_convex_envelope(f, g);
  CHECK(mx.is_convex(1e-12));
  CHECK(env.is_convex(1e-12));
  for (double y = -5.0; y <= 5.0; y += 0.01) {
    CHECK(mx(y) == doctest::Approx(std::max(f(y), g(y))).epsilon(1e-12));
    CHECK(env(y) <= std::min(f(y), g(y)) + 1e-12);
  }
}

TEST_CASE("measure_from_potential inverts potential") {
  Rng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const DiscreteMeasure m = wmr::testing::random_measure(rng, wmr::testing::uniform_int(rng, 1, 8));
    CHECK(same_measure(measure_from_potential(potential(m)), m, 1e-12));
  }
}

TEST_CASE("property: potential dominates the mean hinge") {
  Rng rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    const DiscreteMeasure m = wmr::testing::random_measure(rng, wmr::testing::uniform_int(rng, 1, 10));
    const PiecewiseLinearFn u = potential(m);
    for (int k = 0; k <= 60; ++k) {
      const double y = -2.0 + 4.0 * k / 60.0;
      CHECK(u(y) >= std::abs(y - m.mean()) - 1e-12);
      if (y <= m.min() || y >= m.max()) {
        CHECK(u(y) == doctest::Approx(std::abs(y - m.mean())).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("property: convex order is a preorder and matches hinge oracle") {
  Rng rng(13);
  for (int rep = 0; rep < 100; ++rep) {
    const DiscreteMeasure c = wmr::testing::random_measure(rng, wmr::testing::uniform_int(rng, 1, 6));
    const DiscreteMeasure b = wmr::testing::random_coarsening(rng, c);
    const DiscreteMeasure a = wmr::testing::random_coarsening(rng, b);
    CHECK(convex_order_leq(a, a));
    CHECK(convex_order_leq(a, b));
    CHECK(convex_order_leq(b, c));
    CHECK(convex_order_leq(a, c));
    if (convex_order_leq(b, a)) CHECK(same_measure(a, b, 1e-9));

    const DiscreteMeasure x = wmr::testing::random_measure(rng, wmr::testing::uniform_int(rng, 1, 6));
    const DiscreteMeasure y = wmr::testing::random_measure(rng, wmr::testing::uniform_int(rng, 1, 6));
    const DiscreteMeasure ys = y.shifted(x.mean() - y.mean());
    CHECK(convex_order_leq(x, ys, 1e-9) == hinge_leq(x, ys, 1e-9));
    CHECK(convex_order_leq(a, c, 1e-9) == hinge_leq(a, c, 1e-9));
  }
}

TEST_CASE("property: irreducible components") {
  Rng rng(17);
  for (int rep = 0; rep < 100; ++rep) {
    const DiscreteMeasure b = wmr::testing::random_measure(rng, wmr::testing::uniform_int(rng, 1, 10));
    const DiscreteMeasure a = wmr::testing::random_coarsening(rng, b);
    const double tol = order_tolerance(a, b);
    const auto comps = irreducible_components(a, b, tol);
    const PiecewiseLinearFn ua = potential(a);
    const PiecewiseLinearFn ub = potential(b);
    double prev = -1e300;
    for (const Interval& I : comps) {
      CHECK(I.lo < I.hi);
      CHECK(I.lo >= prev);
      prev = I.hi;
      CHECK(I.lo >= b.min());
      CHECK(I.hi <= b.max());
      CHECK(std::abs(ua(I.lo) - ub(I.lo)) <= tol);
      CHECK(std::abs(ua(I.hi) - ub(I.hi)) <= tol);
      CHECK(ub(0.5 * (I.lo + I.hi)) - ua(0.5 * (I.lo + I.hi)) > 0.0);
    }
    // Off the components the potentials agree.
    for (int k = 0; k <= 200; ++k) {
      const double y = -1.5 + 3.0 * k / 200.0;
      bool inside = false;
      for (const Interval& I : comps) inside = inside || I.contains(y);
      if (!inside) CHECK(ub(y) - ua(y) <= tol);
    }
  }
}

TEST_CASE("property: quantize and wasserstein") {
  Rng rng(19);
  for (int rep = 0; rep < 100; ++rep) {
    const DiscreteMeasure a = wmr::testing::random_measure(rng, wmr::testing::uniform_int(rng, 1, 8));
    const DiscreteMeasure b = wmr::testing::random_measure(rng, wmr::testing::uniform_int(rng, 1, 8));
    const DiscreteMeasure c = wmr::testing::random_measure(rng, wmr::testing::uniform_int(rng, 1, 8));
    const double delta = wmr::testing::uniform(rng, 0.01, 1.0);
    const DiscreteMeasure q = quantize(a, delta);
    CHECK(convex_order_leq(q, a));
    CHECK(q.mean() == doctest::Approx(a.mean()).epsilon(1e-12));
    CHECK(wasserstein(q, a, 1.0) <= delta + 1e-12);
    for (double rho : {1.0, 2.0, 3.5}) {
      CHECK(wasserstein(a, c, rho) <= wasserstein(a, b, rho) + wasserstein(b, c, rho) + 1e-9);
    }
  }
}
