#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "wmr/errors.hpp"
#include "wmr/rearrangement.hpp"
#include "wmr/stability.hpp"

using namespace wmr;
using wmr::testing::Rng;

namespace {

DiscreteMeasure two(double a, double b) { return DiscreteMeasure({a, b}, {0.5, 0.5}); }

std::vector<double> harmonic(int K) {
  std::vector<double> h;
  for (int k = 1; k <= K; ++k) h.push_back(1.0 / k);
  return h;
}

}  // namespace

TEST_CASE("shift ladder on a single atom") {
  const auto ladder = PerturbationLadder::shift(DiscreteMeasure::dirac(0), two(-1, 1), harmonic(100));
  const StabilityReport r = run_stability_experiment(ladder, CostSpec::quadratic());
  REQUIRE(r.rungs.size() == 100);
  CHECK(r.base_value == 0.0);
  for (const RungReport& g : r.rungs) {
    const double h = 1.0 / static_cast<double>(g.k);
    CHECK(std::abs(g.value_gap - h * h) <= 1e-10);
    CHECK(std::abs(g.map_sup_gap - h) <= 1e-10);
    CHECK(std::abs(g.optimizer_gap - h) <= 1e-10);
    REQUIRE(g.map_gaps.size() == 3);
    CHECK(g.map_gaps[0] == (h > 0.1 ? 1.0 : 0.0));
    CHECK(g.map_gaps[2] == 1.0);
  }
}

TEST_CASE("constant ladder has zero gaps") {
  const DiscreteMeasure mu({-1.0, 0.3, 2.0}, {0.2, 0.5, 0.3});
  const DiscreteMeasure nu({-0.5, 0.0, 1.5}, {0.4, 0.4, 0.2});
  const auto ladder = PerturbationLadder::shift(mu, nu, {0.0, 0.0, 0.0});
  const StabilityReport r = run_stability_experiment(ladder, CostSpec::quadratic());
  for (const RungReport& g : r.rungs) {
    CHECK(g.value_gap == 0.0);
    CHECK(g.optimizer_gap == 0.0);
    CHECK(g.map_sup_gap == 0.0);
    for (double m : g.map_gaps) CHECK(m == 0.0);
  }
}

TEST_CASE("quantize ladder stays inside the Lipschitz bound") {
  Rng rng(6101);
  const DiscreteMeasure mu = testing::random_measure(rng, 10, -2, 2);
  const DiscreteMeasure nu = testing::random_measure(rng, 10, -1, 1);
  std::vector<double> deltas;
  for (int k = 1; k <= 12; ++k) deltas.push_back(std::ldexp(1.0, -k));
  const StabilityReport r =
      run_stability_experiment(PerturbationLadder::quantized(mu, nu, deltas), CostSpec::quadratic());
  const double root = std::sqrt(r.base_value);
  for (const RungReport& g : r.rungs) {
    CHECK(g.value_gap <= 4.0 * g.step * (root + g.step) + 1e-12);
  }
  CHECK(r.rungs.back().value_gap <= 1e-8 + 4.0 * deltas.back() * (root + deltas.back()));
}

TEST_CASE("empirical ladder approaches the base value") {
  const DiscreteMeasure mu({-2.0, -0.5, 0.4, 1.7, 3.0}, {0.1, 0.3, 0.2, 0.25, 0.15});
  const DiscreteMeasure nu({-1.0, 0.0, 0.5, 1.0}, {0.25, 0.25, 0.3, 0.2});
  std::vector<double> sizes;
  for (int k = 1; k <= 12; ++k) sizes.push_back(std::ldexp(1.0, k));
  const auto ladder = PerturbationLadder::empirical(mu, nu, sizes, 2024);
  const StabilityReport a = run_stability_experiment(ladder, CostSpec::quadratic());
  const StabilityReport b = run_stability_experiment(ladder, CostSpec::quadratic());
  REQUIRE(a.rungs.size() == 12);
  CHECK(a.rungs[11].value_gap < a.rungs[3].value_gap);
  CHECK(a.quantile_identification);
  for (std::size_t k = 0; k < 12; ++k) CHECK(a.rungs[k].value == b.rungs[k].value);
}

TEST_CASE("growth hypothesis is checked before solving") {
  const auto ladder = PerturbationLadder::shift(DiscreteMeasure::dirac(0), two(-1, 1), {0.5});
  CHECK_THROWS_AS(run_stability_experiment(ladder, CostSpec::quartic()), HypothesisError);
  CHECK_THROWS_AS(run_stability_experiment(ladder, CostSpec::power(3.0)), HypothesisError);
  CHECK_NOTHROW(run_stability_experiment(ladder, CostSpec::power(1.5)));
  auto ladder4 = ladder;
  ladder4.rho = 4.0;
  CHECK_NOTHROW(run_stability_experiment(ladder4, CostSpec::quartic()));
}

TEST_CASE("eta_transfer examples") {
  const DiscreteMeasure nu({-1.0, 0.5, 2.0}, {0.25, 0.5, 0.25});
  const DiscreteMeasure eta({0.0, 1.0}, {0.5, 0.5});
  REQUIRE(convex_order_leq(eta, nu));
  CHECK(same_measure(eta_transfer(eta, nu, nu), eta, 1e-12));
  CHECK(same_measure(eta_transfer(eta, nu, nu.shifted(0.3)), eta.shifted(0.3), 1e-12));
  for (int k = 1; k <= 5; ++k) {
    const double h = 1.0 / k;
    const DiscreteMeasure out =
        eta_transfer(DiscreteMeasure::dirac(0), two(-1, 1), two(-1 + h, 1 + h));
    CHECK(same_measure(out, DiscreteMeasure::dirac(h), 1e-12));
  }
  CHECK_THROWS_AS(eta_transfer(two(-2, 2), two(-1, 1), two(-1, 1)), OrderError);
}

TEST_CASE("property: eta_transfer keeps order and the Jensen chain") {
  Rng rng(6202);
  for (int trial = 0; trial < 100; ++trial) {
    const DiscreteMeasure nu = testing::random_measure(rng, testing::uniform_int(rng, 1, 8), -2, 2);
    const DiscreteMeasure eta = testing::random_coarsening(rng, nu);
    const DiscreteMeasure nu_k = testing::random_measure(rng, testing::uniform_int(rng, 1, 8), -2, 2);
    const std::vector<double> r = eta_transfer_images(eta, nu, nu_k);
    const DiscreteMeasure eta_k = eta_transfer(eta, nu, nu_k);
    CHECK(convex_order_leq(eta_k, nu_k, order_tolerance(eta_k, nu_k)));
    for (double rho : {1.0, 2.0, 3.0}) {
      CHECK(wasserstein(eta, eta_k, rho) <= wasserstein(nu, nu_k, rho) + 1e-12);
    }
    double wmin = 1.0;
    for (double w : eta.weights()) wmin = std::min(wmin, w);
    const double w1 = wasserstein(nu, nu_k, 1.0);
    for (std::size_t i = 0; i < eta.size(); ++i) {
      CHECK(std::abs(eta.atom(i) - r[i]) <= w1 / wmin + 1e-12);
    }
  }
}

TEST_CASE("truncate_mean_preserving examples") {
  Truncation t = truncate_mean_preserving(DiscreteMeasure::dirac(2.5), 0.3);
  CHECK(t.sub_masses == std::vector<double>{1.0});
  CHECK(same_measure(t.renormalized, DiscreteMeasure::dirac(2.5), 0.0));

  t = truncate_mean_preserving(two(-1, 1), 0.5);
  CHECK(t.sub_masses[0] == doctest::Approx(0.25));
  CHECK(t.sub_masses[1] == doctest::Approx(0.25));
  CHECK(same_measure(t.renormalized, two(-1, 1), 1e-12));

  const DiscreteMeasure m({0.0, 4.0}, {0.25, 0.75});
  t = truncate_mean_preserving(m, 0.2);
  CHECK(t.sub_masses[0] == doctest::Approx(0.2));
  CHECK(t.sub_masses[1] == doctest::Approx(0.6));
  CHECK(std::abs(t.renormalized.mean() - 3.0) <= 1e-12);

  CHECK_THROWS_AS(truncate_mean_preserving(m, 0.0), DomainError);
  CHECK_THROWS_AS(truncate_mean_preserving(m, 1.0), DomainError);
}

TEST_CASE("property: truncation removes eps and keeps the mean") {
  Rng rng(6303);
  for (int trial = 0; trial < 300; ++trial) {
    const DiscreteMeasure m = testing::random_measure(rng, testing::uniform_int(rng, 2, 10), -3, 3);
    const double eps = testing::uniform(rng, 0.01, 0.9);
    const Truncation t = truncate_mean_preserving(m, eps);
    double kept = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(t.sub_masses[i] >= 0.0);
      CHECK(t.sub_masses[i] <= m.weight(i));
      kept += t.sub_masses[i];
    }
    CHECK(std::abs(kept - (1.0 - eps)) <= 1e-12);
    CHECK(std::abs(t.renormalized.mean() - m.mean()) <= 1e-12 * joint_scale(m, m));
  }
}

TEST_CASE("finite_support_approx examples") {
  const DiscreteMeasure u = DiscreteMeasure::uniform({0.0, 1.0, 2.0, 3.0});
  CHECK(same_measure(finite_support_approx(u, 1), DiscreteMeasure::dirac(1.5), 1e-15));
  CHECK(same_measure(finite_support_approx(u, 2), two(0.5, 2.5), 1e-15));
  CHECK(same_measure(finite_support_approx(u, 4), u, 0.0));
  CHECK(same_measure(finite_support_approx(DiscreteMeasure::dirac(7), 3), DiscreteMeasure::dirac(7), 0.0));
}

TEST_CASE("property: finite support approximation is below and close") {
  Rng rng(6404);
  int separated = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const DiscreteMeasure m = testing::random_measure(rng, testing::uniform_int(rng, 1, 12), -3, 3);
    const int k = testing::uniform_int(rng, 1, 30);
    const DiscreteMeasure a = finite_support_approx(m, k);
    CHECK(convex_order_leq(a, m, order_tolerance(a, m)));
    CHECK(wasserstein(a, m, 1.0) <= m.diameter() / k + 1e-12);
    if (a.size() == m.size()) {
      ++separated;
      CHECK(same_measure(a, m, 1e-15));
      CHECK(same_measure(finite_support_approx(a, k), a, 1e-15));
    }
  }
  CHECK(separated > 20);
}
