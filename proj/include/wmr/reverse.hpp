#pragma once

#include <utility>
#include <vector>

#include "wmr/cost.hpp"
#include "wmr/measures.hpp"
#include "wmr/monotone_map.hpp"
#include "wmr/rearrangement.hpp"

namespace wmr {

struct ReverseSolution {
  DiscreteMeasure nu_star;
  MonotoneMap tilde_map;                     // knots at the atoms of nu_star
  std::vector<Interval> irreducibles_mu_nustar;
  double value = 0.0;                        // V_theta(mu, nu)
  double reverse_value = 0.0;                // sum theta(z - tilde_map(z)) nu_star(dz)
  WeakSolution forward;                      // the rearrangement it was built from
};

/// Smallest nu* >=_c mu that an increasing 1-Lipschitz map pushes onto nu,
/// together with that map. Throws ConsistencyError if a post-check fails.
ReverseSolution reverse_optimizer(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  const CostSpec& cost);

/// Increasing map R on the atoms of mu with R(mu) = T(mu) v S(mu).
MonotoneMap convex_order_max_map(const MonotoneMap& T, const MonotoneMap& S,
                                 const DiscreteMeasure& mu);

/// Convex-order minimum eta of eta1, eta2 and an increasing T* with T*(eta) = nu.
std::pair<DiscreteMeasure, MonotoneMap> convex_order_min_with_maps(const DiscreteMeasure& eta1,
                                                                   const MonotoneMap& T1,
                                                                   const DiscreteMeasure& eta2,
                                                                   const MonotoneMap& T2);

/// (id - T1)(eta1) <=_c (id - T2)(eta2), under eta1 <=_c eta2 and T2(eta2) <=_c T1(eta1).
bool residual_order_check(const DiscreteMeasure& eta1, const DiscreteMeasure& eta2,
                          const MonotoneMap& T1, const MonotoneMap& T2);

/// Law of x - map(x) under m.
DiscreteMeasure displacement_law(const MonotoneMap& map, const DiscreteMeasure& m);

}  // namespace wmr
